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

#include "z2circ/schedule.h"

#include <numeric>
#include <stdexcept>

namespace z2circ {

std::string to_string(SiteOrder order) { return order == SiteOrder::Raster ? "raster" : "random"; }

SiteOrder site_order_from_string(const std::string &text) {
    if (text == "raster") {
        return SiteOrder::Raster;
    }
    if (text == "random") {
        return SiteOrder::Random;
    }
    throw std::invalid_argument("unknown site order '" + text + "' (expected raster or random)");
}

std::string to_string(InitialState initial) { return initial == InitialState::AllZero ? "all-zero" : "all-plus"; }

InitialState initial_state_from_string(const std::string &text) {
    if (text == "all-zero" || text == "zero") {
        return InitialState::AllZero;
    }
    if (text == "all-plus" || text == "plus") {
        return InitialState::AllPlus;
    }
    throw std::invalid_argument("unknown initial state '" + text + "' (expected all-zero or all-plus)");
}

SweepGenerator::SweepGenerator(const Lattice &lattice, double p, RandomStream stream, SiteOrder order)
    : p_(p), stream_(stream), order_(order), visit_(lattice.num_sites()), events_(lattice.num_sites()) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw std::invalid_argument("p must lie in [0, 1]");
    }
    std::iota(visit_.begin(), visit_.end(), Site{0});
}

std::span<const Event> SweepGenerator::next() {
    const auto n = visit_.size();
    if (order_ == SiteOrder::Random) {
        // Fisher-Yates; modulo bias is below 2^-40 for n <= 2^20.
        for (std::size_t i = n - 1; i > 0; --i) {
            const auto j = static_cast<std::size_t>(stream_() % (i + 1));
            std::swap(visit_[i], visit_[j]);
        }
    }
    for (std::size_t k = 0; k < n; ++k) {
        const EventKind kind = stream_.uniform() < p_ ? EventKind::BondRound : EventKind::MeasureX;
        events_[k] = {kind, visit_[k]};
    }
    return events_;
}

Schedule generate_schedule(
    const Lattice &lattice, double p, std::size_t sweeps, RandomStream stream, SiteOrder order) {
    SweepGenerator gen(lattice, p, stream, order);
    Schedule s;
    s.dimension = lattice.dimension();
    s.linear_size = lattice.linear_size();
    s.p = p;
    s.seed = stream.seed();
    s.stream = stream.stream();
    s.order = order;
    s.sites_per_sweep = lattice.num_sites();
    s.events.reserve(s.sites_per_sweep * sweeps);
    for (std::size_t t = 0; t < sweeps; ++t) {
        const auto sweep = gen.next();
        s.events.insert(s.events.end(), sweep.begin(), sweep.end());
    }
    return s;
}

void check_schedule(const Schedule &schedule, const Lattice &lattice) {
    if (schedule.dimension != lattice.dimension() || schedule.linear_size != lattice.linear_size()) {
        throw std::invalid_argument("schedule was generated for a different lattice");
    }
    const auto n = lattice.num_sites();
    if (schedule.sites_per_sweep != n || schedule.events.size() % n != 0) {
        throw std::invalid_argument("schedule sweeps do not contain one event per site");
    }
    std::vector<std::size_t> seen(n, 0);
    for (std::size_t t = 0; t < schedule.num_sweeps(); ++t) {
        for (const Event &e : schedule.sweep(t)) {
            if (e.site >= n || seen[e.site] != t) {
                throw std::invalid_argument("schedule sweep " + std::to_string(t) + " is not a permutation of sites");
            }
            seen[e.site] = t + 1;
        }
    }
}

}  // namespace z2circ
