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
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "z2circ/lattice.h"
#include "z2circ/observables.h"
#include "z2circ/schedule.h"

namespace z2circ {

enum class Engine : std::uint8_t { Cluster, Mvc, Percolation };

enum class SamplingMode : std::uint8_t {
    Final,        ///< observables at the last sweep
    TimeAverage,  ///< per-trajectory average over sweeps burn_in, burn_in + stride, ...
};

std::string to_string(Engine engine);
Engine engine_from_string(const std::string &text);
std::string to_string(SamplingMode mode);
SamplingMode sampling_mode_from_string(const std::string &text);

class ConfigError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

inline constexpr int kSweepSchemaVersion = 1;

struct RunConfig {
    Engine engine = Engine::Cluster;
    int dimension = 1;
    std::vector<int> sizes;
    std::vector<double> p_grid;
    /// Fixed sweep count; unset means sweeps_per_L * L.
    std::optional<std::size_t> sweeps;
    std::size_t sweeps_per_L = 4;
    std::size_t n_traj = 100;
    std::uint64_t seed = 1;
    InitialState initial = InitialState::AllZero;
    SiteOrder order = SiteOrder::Raster;
    SamplingMode sampling = SamplingMode::Final;
    std::size_t burn_in = 0;
    std::size_t stride = 1;
    /// Report abs_M and M per site.
    bool per_site_magnetization = true;
    /// Check engine invariants after every sweep.
    bool check_invariants = false;
    std::string output;
    /// 0 = hardware concurrency. Never affects results.
    unsigned workers = 0;

    std::size_t sweeps_for(int L) const { return sweeps ? *sweeps : sweeps_per_L * static_cast<std::size_t>(L); }

    /// Throws ConfigError.
    void validate() const;

    nlohmann::json to_json() const;
    /// Unknown keys are rejected.
    static RunConfig from_json(const nlohmann::json &j);
    /// FNV-1a of the canonical JSON, hex. Excludes output path and workers.
    std::string hash() const;
};

/// Seed for one (dimension, L, p) point of a sweep.
std::uint64_t point_seed(std::uint64_t master, int dimension, int L, double p);

struct PointResult {
    int dimension = 1;
    int L = 0;
    double p = 0.0;
    std::size_t sweeps = 0;
    std::size_t n_traj = 0;
    std::uint64_t point_seed = 0;
    EnsembleSummary summary;
};

struct SweepResult {
    RunConfig config;
    std::vector<PointResult> points;

    const PointResult &at(int L, double p) const;
    /// Columns: dimension,L,p,sweeps,n_traj,observable,mean,stderr,sampling_mode,seed
    void write_csv(std::ostream &out) const;
    nlohmann::json metadata() const;
    /// Writes <stem>.csv and <stem>.json.
    void write_files(const std::string &stem) const;
};

/// Thrown when an engine invariant fails inside a trajectory.
class TrajectoryError : public std::runtime_error {
  public:
    TrajectoryError(const std::string &what, std::uint64_t seed, std::uint64_t trajectory)
        : std::runtime_error(what), seed(seed), trajectory(trajectory) {}
    std::uint64_t seed;
    std::uint64_t trajectory;
};

/// Observables of one trajectory of one point. Exposed for replay and tests.
ObservableRecord run_trajectory(const RunConfig &config, const Lattice &lattice, double p, std::uint64_t seed,
                                std::uint64_t trajectory);

/// Runs every (L, p) point of the config. The result does not depend on the
/// number of workers.
SweepResult run_sweep(const RunConfig &config);

struct ConvergenceEntry {
    std::size_t multiplier = 1;
    std::size_t sweeps = 0;
    std::string observable;
    Estimate estimate;
    /// (mean - reference mean) / combined stderr, against the largest multiplier.
    double shift = 0.0;
    bool flagged = false;
};

struct ConvergenceReport {
    int L = 0;
    double p = 0.0;
    std::vector<ConvergenceEntry> entries;
    /// Smallest multiplier from which no entry is flagged; 0 if even the
    /// second-largest is flagged.
    std::size_t converged_multiplier = 0;
    bool base_flagged() const;
    nlohmann::json to_json() const;
};

/// Reruns the config's first (L, p) point with sweeps scaled by each
/// multiplier and flags shifts above `threshold` combined standard errors.
ConvergenceReport convergence_check(const RunConfig &config, const std::vector<std::size_t> &multipliers = {1, 2, 4},
                                    double threshold = 2.0);

}  // namespace z2circ
