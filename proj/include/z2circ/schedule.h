// Copyright 2026 The z2circ Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "z2circ/lattice.h"
#include "z2circ/random.h"

namespace z2circ {

enum class EventKind : std::uint8_t {
    MeasureX = 0,   ///< measure X on the site
    BondRound = 1,  ///< measure ZZ on every bond at the site, then majority feedback
};

struct Event {
    EventKind kind;
    Site site;

    bool operator==(const Event &) const = default;
};

enum class SiteOrder : std::uint8_t { Raster = 0, Random = 1 };

enum class InitialState : std::uint8_t { AllZero = 0, AllPlus = 1 };

std::string to_string(InitialState initial);
InitialState initial_state_from_string(const std::string &text);

std::string to_string(SiteOrder order);
SiteOrder site_order_from_string(const std::string &text);

/// A realized measurement schedule: `sweeps` consecutive sweeps, each one
/// event per site.
struct Schedule {
    int dimension = 1;
    int linear_size = 0;
    double p = 0.0;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
    SiteOrder order = SiteOrder::Raster;
    std::size_t sites_per_sweep = 0;
    std::vector<Event> events;

    std::size_t num_sweeps() const { return sites_per_sweep == 0 ? 0 : events.size() / sites_per_sweep; }
    std::span<const Event> sweep(std::size_t t) const {
        return {events.data() + t * sites_per_sweep, sites_per_sweep};
    }
    bool operator==(const Schedule &) const = default;
};

/// Draws `sweeps` sweeps with P(BondRound) = p for each site independently.
/// With SiteOrder::Random every sweep visits the sites in a fresh uniformly
/// random permutation drawn from the same stream.
/// Produces the sweeps of a schedule one at a time, drawing exactly what
/// generate_schedule() draws.
class SweepGenerator {
  public:
    SweepGenerator(const Lattice &lattice, double p, RandomStream stream, SiteOrder order = SiteOrder::Raster);

    /// Events of the next sweep; valid until the following call.
    std::span<const Event> next();

  private:
    double p_;
    RandomStream stream_;
    SiteOrder order_;
    std::vector<Site> visit_;
    std::vector<Event> events_;
};

Schedule generate_schedule(
    const Lattice &lattice, double p, std::size_t sweeps, RandomStream stream, SiteOrder order = SiteOrder::Raster);

/// Validates a schedule against a lattice (one event per site per sweep).
void check_schedule(const Schedule &schedule, const Lattice &lattice);

}  // namespace z2circ
