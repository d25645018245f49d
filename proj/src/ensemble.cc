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

#include "z2circ/ensemble.h"

#include <algorithm>
#include <atomic>
#include <bit>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <ostream>
#include <set>
#include <thread>

#include "z2circ/cluster_state.h"
#include "z2circ/mvc.h"
#include "z2circ/percolation.h"
#include "z2circ/tape.h"

namespace z2circ {

namespace {

std::string format_double(double x) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, end);
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v, 16);
    std::string s(buf, end);
    return std::string(16 - s.size(), '0') + s;
}

// Accumulates records at the sampling times of one trajectory.
class Sampler {
  public:
    Sampler(const RunConfig &config, std::size_t sweeps) : config_(config), sweeps_(sweeps) {}

    bool wants(std::size_t completed) const {
        if (config_.sampling == SamplingMode::Final) {
            return completed == sweeps_;
        }
        return completed >= std::max<std::size_t>(config_.burn_in, 1) &&
               (completed - config_.burn_in) % config_.stride == 0;
    }

    void add(const ObservableRecord &record) {
        for (const auto &[name, value] : record) {
            sum_[name] += value;
        }
        ++count_;
    }

    ObservableRecord result() const {
        ObservableRecord out;
        for (const auto &[name, value] : sum_) {
            out[name] = value / static_cast<double>(count_);
        }
        return out;
    }

  private:
    const RunConfig &config_;
    std::size_t sweeps_;
    std::map<std::string, double> sum_;
    std::size_t count_ = 0;
};

ObservableRecord cluster_record(const ClusterState &state, const RegionPartition &partition) {
    return to_record(measure_all(state, partition));
}

ObservableRecord percolation_record(const CanonicalState &classified, const RegionPartition &partition) {
    const auto obs = percolation_observables(classified);
    const auto n = classified.label.size();
    std::vector<std::uint8_t> touched(n, 0);
    for (std::size_t s = 0; s < n; ++s) {
        if (classified.label[s] >= 0) {
            touched[static_cast<std::size_t>(classified.label[s])] |= std::uint8_t(1u << partition.region_of[s]);
        }
    }
    const auto spanning = std::count(touched.begin(), touched.end(), std::uint8_t{0xF});
    return {
        {"abs_U", obs.has_background ? 0.0 : 1.0},
        {"tripartite", static_cast<double>(spanning)},
        {"background_fraction", obs.background_fraction},
        {"largest_cluster_fraction", obs.largest_cluster_fraction},
    };
}

ObservableRecord mvc_record(const SpinConfig &spins, const Lattice &lattice) {
    const int m = spins.magnetization();
    return {
        {"abs_M", std::abs(m)},
        {"M", m},
        {"zz", spins.spins[0] * spins.spins[lattice.antipode_of_origin()]},
    };
}

InitialSpins spins_for(InitialState initial) {
    // |+> dephased in the Z basis is a uniformly random spin.
    return initial == InitialState::AllZero ? InitialSpins::AllUp : InitialSpins::Random;
}

template <class T>
T get_checked(const nlohmann::json &j, const char *key) {
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception &e) {
        throw ConfigError(std::string("config field '") + key + "': " + e.what());
    }
}

std::vector<double> parse_p_grid(const nlohmann::json &j) {
    if (j.is_number()) {
        return {j.get<double>()};
    }
    if (j.is_array()) {
        std::vector<double> out;
        for (const auto &v : j) {
            if (!v.is_number()) {
                throw ConfigError("config field 'p': entries must be numbers");
            }
            out.push_back(v.get<double>());
        }
        return out;
    }
    if (j.is_object()) {
        for (const auto &[k, v] : j.items()) {
            if (k != "start" && k != "stop" && k != "step") {
                throw ConfigError("config field 'p': unknown key '" + k + "'");
            }
        }
        const double start = get_checked<double>(j, "start");
        const double stop = get_checked<double>(j, "stop");
        const double step = get_checked<double>(j, "step");
        if (!(step > 0.0) || stop < start) {
            throw ConfigError("config field 'p': need step > 0 and stop >= start");
        }
        const auto count = static_cast<std::size_t>(std::llround((stop - start) / step)) + 1;
        std::vector<double> out;
        for (std::size_t i = 0; i < count; ++i) {
            // Round to 12 digits so 0.3 + 5 * 0.02 prints as 0.4.
            out.push_back(std::round((start + static_cast<double>(i) * step) * 1e12) / 1e12);
        }
        return out;
    }
    throw ConfigError("config field 'p': expected a number, an array, or {start, stop, step}");
}

}  // namespace

std::string to_string(Engine engine) {
    switch (engine) {
    case Engine::Cluster:
        return "cluster";
    case Engine::Mvc:
        return "mvc";
    case Engine::Percolation:
        return "percolation";
    }
    return "?";
}

Engine engine_from_string(const std::string &text) {
    if (text == "cluster") {
        return Engine::Cluster;
    }
    if (text == "mvc") {
        return Engine::Mvc;
    }
    if (text == "percolation") {
        return Engine::Percolation;
    }
    throw ConfigError("unknown engine '" + text + "' (expected cluster, mvc or percolation)");
}

std::string to_string(SamplingMode mode) { return mode == SamplingMode::Final ? "final" : "time-average"; }

SamplingMode sampling_mode_from_string(const std::string &text) {
    if (text == "final") {
        return SamplingMode::Final;
    }
    if (text == "time-average") {
        return SamplingMode::TimeAverage;
    }
    throw ConfigError("unknown sampling mode '" + text + "' (expected final or time-average)");
}

void RunConfig::validate() const {
    if (dimension != 1 && dimension != 2) {
        throw ConfigError("dimension must be 1 or 2");
    }
    if (sizes.empty()) {
        throw ConfigError("at least one system size L is required");
    }
    for (int L : sizes) {
        try {
            Lattice probe(dimension, L);
        } catch (const std::invalid_argument &e) {
            throw ConfigError(e.what());
        }
        if (engine != Engine::Mvc && L % 4 != 0) {
            throw ConfigError("L = " + std::to_string(L) + " is not divisible by 4 (needed for the region quarters)");
        }
    }
    if (p_grid.empty()) {
        throw ConfigError("the p grid is empty");
    }
    for (double p : p_grid) {
        if (!(p >= 0.0 && p <= 1.0)) {
            throw ConfigError("p = " + format_double(p) + " lies outside [0, 1]");
        }
    }
    if (n_traj < 1) {
        throw ConfigError("n_traj must be at least 1");
    }
    if ((sweeps && *sweeps < 1) || (!sweeps && sweeps_per_L < 1)) {
        throw ConfigError("sweeps must be at least 1");
    }
    if (stride < 1) {
        throw ConfigError("stride must be at least 1");
    }
    if (sampling == SamplingMode::TimeAverage) {
        for (int L : sizes) {
            const std::size_t first = burn_in > 0 ? burn_in : stride;
            if (first > sweeps_for(L)) {
                throw ConfigError("no sampling time within the sweeps at L = " + std::to_string(L));
            }
        }
    }
}

nlohmann::json RunConfig::to_json() const {
    nlohmann::json j;
    j["engine"] = to_string(engine);
    j["dimension"] = dimension;
    j["L"] = sizes;
    j["p"] = p_grid;
    if (sweeps) {
        j["sweeps"] = *sweeps;
    }
    j["sweeps_per_L"] = sweeps_per_L;
    j["n_traj"] = n_traj;
    j["seed"] = seed;
    j["initial"] = to_string(initial);
    j["order"] = to_string(order);
    j["sampling"] = to_string(sampling);
    j["burn_in"] = burn_in;
    j["stride"] = stride;
    j["per_site_magnetization"] = per_site_magnetization;
    j["check_invariants"] = check_invariants;
    j["output"] = output;
    j["workers"] = workers;
    return j;
}

RunConfig RunConfig::from_json(const nlohmann::json &j) {
    static const std::set<std::string> known = {
        "engine", "dimension", "L",      "p",      "sweeps",   "sweeps_per_L", "n_traj", "seed",    "initial",
        "order",  "sampling",  "burn_in", "stride", "per_site_magnetization", "check_invariants", "output",
        "workers"};
    if (!j.is_object()) {
        throw ConfigError("config must be a JSON object");
    }
    for (const auto &[k, v] : j.items()) {
        if (!known.count(k)) {
            throw ConfigError("unknown config field '" + k + "'");
        }
    }
    RunConfig c;
    try {
        if (j.contains("engine")) {
            c.engine = engine_from_string(get_checked<std::string>(j, "engine"));
        }
        if (j.contains("dimension")) {
            c.dimension = get_checked<int>(j, "dimension");
        }
        if (j.contains("L")) {
            const auto &l = j.at("L");
            c.sizes = l.is_array() ? get_checked<std::vector<int>>(j, "L") : std::vector<int>{get_checked<int>(j, "L")};
        }
        if (j.contains("p")) {
            c.p_grid = parse_p_grid(j.at("p"));
        }
        if (j.contains("sweeps") && !j.at("sweeps").is_null()) {
            c.sweeps = get_checked<std::size_t>(j, "sweeps");
        }
        if (j.contains("sweeps_per_L")) {
            c.sweeps_per_L = get_checked<std::size_t>(j, "sweeps_per_L");
        }
        if (j.contains("n_traj")) {
            c.n_traj = get_checked<std::size_t>(j, "n_traj");
        }
        if (j.contains("seed")) {
            c.seed = get_checked<std::uint64_t>(j, "seed");
        }
        if (j.contains("initial")) {
            c.initial = initial_state_from_string(get_checked<std::string>(j, "initial"));
        }
        if (j.contains("order")) {
            c.order = site_order_from_string(get_checked<std::string>(j, "order"));
        }
        if (j.contains("sampling")) {
            c.sampling = sampling_mode_from_string(get_checked<std::string>(j, "sampling"));
        }
        if (j.contains("burn_in")) {
            c.burn_in = get_checked<std::size_t>(j, "burn_in");
        }
        if (j.contains("stride")) {
            c.stride = get_checked<std::size_t>(j, "stride");
        }
        if (j.contains("per_site_magnetization")) {
            c.per_site_magnetization = get_checked<bool>(j, "per_site_magnetization");
        }
        if (j.contains("check_invariants")) {
            c.check_invariants = get_checked<bool>(j, "check_invariants");
        }
        if (j.contains("output")) {
            c.output = get_checked<std::string>(j, "output");
        }
        if (j.contains("workers")) {
            c.workers = get_checked<unsigned>(j, "workers");
        }
    } catch (const ConfigError &) {
        throw;
    } catch (const std::invalid_argument &e) {
        throw ConfigError(e.what());
    }
    return c;
}

std::string RunConfig::hash() const {
    auto j = to_json();
    j.erase("output");
    j.erase("workers");
    const auto text = j.dump();
    return hex64(fnv1a64({reinterpret_cast<const std::uint8_t *>(text.data()), text.size()}));
}

std::uint64_t point_seed(std::uint64_t master, int dimension, int L, double p) {
    std::uint64_t h = mix64(master);
    h = mix64(h ^ static_cast<std::uint64_t>(dimension));
    h = mix64(h ^ static_cast<std::uint64_t>(L));
    return mix64(h ^ std::bit_cast<std::uint64_t>(p));
}

ObservableRecord run_trajectory(const RunConfig &config, const Lattice &lattice, double p, std::uint64_t seed,
                                std::uint64_t trajectory) {
    const std::size_t sweeps = config.sweeps_for(lattice.linear_size());
    Sampler sampler(config, sweeps);
    auto schedule_rng = trajectory_stream(seed, trajectory, Lane::Schedule);
    auto dynamics_rng = trajectory_stream(seed, trajectory, Lane::Dynamics);

    switch (config.engine) {
    case Engine::Cluster: {
        const auto partition = quarter_partition(lattice);
        ClusterState state(lattice, config.initial);
        SweepGenerator gen(lattice, p, schedule_rng, config.order);
        auto channel = OutcomeChannel::sample(dynamics_rng);
        for (std::size_t t = 1; t <= sweeps; ++t) {
            for (const Event &e : gen.next()) {
                state.site_update(e, channel);
            }
            if (config.check_invariants) {
                state.check_integrity();
            }
            if (sampler.wants(t)) {
                sampler.add(cluster_record(state, partition));
            }
        }
        break;
    }
    case Engine::Percolation: {
        const auto partition = quarter_partition(lattice);
        SpaceTimeForest forest(lattice, config.initial);
        SweepGenerator gen(lattice, p, schedule_rng, config.order);
        for (std::size_t t = 1; t <= sweeps; ++t) {
            for (const Event &e : gen.next()) {
                forest.ingest(e);
            }
            if (sampler.wants(t)) {
                sampler.add(percolation_record(forest.classify(), partition));
            }
        }
        break;
    }
    case Engine::Mvc: {
        if (config.order != SiteOrder::Raster) {
            throw ConfigError("the mvc engine only supports raster order");
        }
        MvcConfig mc;
        mc.formulation = Formulation::ProbP;
        mc.parameter = p;
        mc.sweeps = sweeps;
        mc.initial = spins_for(config.initial);
        mc.validate();
        auto spins = initial_spins(lattice, mc.initial, dynamics_rng);
        for (std::size_t t = 1; t <= sweeps; ++t) {
            mvc_sweep(spins, lattice, mc, schedule_rng, dynamics_rng);
            if (sampler.wants(t)) {
                sampler.add(mvc_record(spins, lattice));
            }
        }
        break;
    }
    }
    return sampler.result();
}

const PointResult &SweepResult::at(int L, double p) const {
    for (const auto &pt : points) {
        if (pt.L == L && pt.p == p) {
            return pt;
        }
    }
    throw std::out_of_range("no point at L = " + std::to_string(L) + ", p = " + format_double(p));
}

SweepResult run_sweep(const RunConfig &config) {
    config.validate();
    SweepResult result;
    result.config = config;
    unsigned workers = config.workers ? config.workers : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, config.n_traj));

    for (int L : config.sizes) {
        const Lattice lattice(config.dimension, L);
        for (double p : config.p_grid) {
            PointResult pt;
            pt.dimension = config.dimension;
            pt.L = L;
            pt.p = p;
            pt.sweeps = config.sweeps_for(L);
            pt.n_traj = config.n_traj;
            pt.point_seed = point_seed(config.seed, config.dimension, L, p);

            std::vector<ObservableRecord> records(config.n_traj);
            std::atomic<std::size_t> next{0};
            std::mutex error_mutex;
            std::exception_ptr error;
            std::size_t error_traj = std::numeric_limits<std::size_t>::max();
            auto work = [&] {
                for (;;) {
                    const std::size_t t = next.fetch_add(1);
                    if (t >= config.n_traj) {
                        return;
                    }
                    try {
                        records[t] = run_trajectory(config, lattice, p, pt.point_seed, t);
                    } catch (...) {
                        std::lock_guard lock(error_mutex);
                        if (t < error_traj) {
                            error_traj = t;
                            error = std::current_exception();
                        }
                    }
                }
            };
            if (workers <= 1) {
                work();
            } else {
                std::vector<std::thread> pool;
                for (unsigned w = 0; w < workers; ++w) {
                    pool.emplace_back(work);
                }
                for (auto &th : pool) {
                    th.join();
                }
            }
            if (error) {
                try {
                    std::rethrow_exception(error);
                } catch (const ConfigError &) {
                    throw;
                } catch (const std::exception &e) {
                    throw TrajectoryError(std::string(e.what()) + " (L = " + std::to_string(L) +
                                              ", p = " + format_double(p) + ", seed = " +
                                              std::to_string(pt.point_seed) + ", trajectory " +
                                              std::to_string(error_traj) + ")",
                                          pt.point_seed, error_traj);
                }
            }
            const double norm =
                config.per_site_magnetization ? static_cast<double>(lattice.num_sites()) : 1.0;
            pt.summary = ensemble_reduce(records, norm);
            result.points.push_back(std::move(pt));
        }
    }
    return result;
}

void SweepResult::write_csv(std::ostream &out) const {
    out << "dimension,L,p,sweeps,n_traj,observable,mean,stderr,sampling_mode,seed\n";
    for (const auto &pt : points) {
        for (const auto &[name, est] : pt.summary.values) {
            out << pt.dimension << ',' << pt.L << ',' << format_double(pt.p) << ',' << pt.sweeps << ',' << pt.n_traj
                << ',' << name << ',' << format_double(est.mean) << ',' << format_double(est.std_error) << ','
                << to_string(config.sampling) << ',' << config.seed << '\n';
        }
    }
}

nlohmann::json SweepResult::metadata() const {
    nlohmann::json j;
    j["schema"] = "z2circ-sweep";
    j["schema_version"] = kSweepSchemaVersion;
    j["config"] = config.to_json();
    j["config_hash"] = config.hash();
    j["geometry"] = config.dimension == 1 ? "ring-quarters" : "column-slabs";
    j["zz_pair"] = "site 0 and its antipode";
    j["magnetization_per_site"] = config.per_site_magnetization;
    j["columns"] = {"dimension", "L", "p", "sweeps", "n_traj", "observable", "mean", "stderr", "sampling_mode",
                    "seed"};
    auto &pts = j["points"] = nlohmann::json::array();
    for (const auto &pt : points) {
        pts.push_back({{"L", pt.L}, {"p", pt.p}, {"sweeps", pt.sweeps}, {"point_seed", pt.point_seed}});
    }
    return j;
}

void SweepResult::write_files(const std::string &stem) const {
    std::ofstream csv(stem + ".csv");
    if (!csv) {
        throw std::ios_base::failure("cannot write " + stem + ".csv");
    }
    write_csv(csv);
    std::ofstream meta(stem + ".json");
    if (!meta) {
        throw std::ios_base::failure("cannot write " + stem + ".json");
    }
    meta << metadata().dump(2) << '\n';
    if (!csv || !meta) {
        throw std::ios_base::failure("write failed for " + stem);
    }
}

bool ConvergenceReport::base_flagged() const {
    return std::any_of(entries.begin(), entries.end(), [&](const ConvergenceEntry &e) {
        return e.flagged && e.multiplier == entries.front().multiplier;
    });
}

nlohmann::json ConvergenceReport::to_json() const {
    nlohmann::json j;
    j["L"] = L;
    j["p"] = p;
    j["converged_multiplier"] = converged_multiplier;
    j["base_flagged"] = base_flagged();
    auto &arr = j["entries"] = nlohmann::json::array();
    for (const auto &e : entries) {
        arr.push_back({{"multiplier", e.multiplier},
                       {"sweeps", e.sweeps},
                       {"observable", e.observable},
                       {"mean", e.estimate.mean},
                       {"stderr", e.estimate.std_error},
                       {"shift", std::isfinite(e.shift) ? nlohmann::json(e.shift) : nlohmann::json("inf")},
                       {"flagged", e.flagged}});
    }
    return j;
}

ConvergenceReport convergence_check(const RunConfig &config, const std::vector<std::size_t> &multipliers,
                                    double threshold) {
    config.validate();
    if (multipliers.size() < 2) {
        throw ConfigError("convergence_check needs at least two multipliers");
    }
    auto sorted = multipliers;
    std::sort(sorted.begin(), sorted.end());
    if (sorted.front() < 1 || std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw ConfigError("multipliers must be distinct and positive");
    }

    ConvergenceReport report;
    report.L = config.sizes.front();
    report.p = config.p_grid.front();
    const std::size_t base = config.sweeps_for(report.L);

    std::vector<PointResult> runs;
    for (std::size_t m : sorted) {
        RunConfig c = config;
        c.sizes = {report.L};
        c.p_grid = {report.p};
        c.sweeps = base * m;
        c.burn_in = config.burn_in * m;
        // Independent ensembles per multiplier.
        c.seed = mix64(config.seed + m);
        runs.push_back(run_sweep(c).points.front());
    }

    const auto &reference = runs.back().summary.values;
    for (std::size_t k = 0; k < sorted.size(); ++k) {
        for (const auto &[name, est] : runs[k].summary.values) {
            ConvergenceEntry e;
            e.multiplier = sorted[k];
            e.sweeps = runs[k].sweeps;
            e.observable = name;
            e.estimate = est;
            const auto &ref = reference.at(name);
            const double combined = std::hypot(est.std_error, ref.std_error);
            const double diff = est.mean - ref.mean;
            if (combined > 0.0) {
                e.shift = diff / combined;
            } else {
                e.shift = diff == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), diff);
            }
            e.flagged = std::abs(e.shift) > threshold;
            report.entries.push_back(e);
        }
    }

    report.converged_multiplier = 0;
    for (std::size_t k = sorted.size() - 1; k-- > 0;) {
        const bool bad = std::any_of(report.entries.begin(), report.entries.end(), [&](const ConvergenceEntry &e) {
            return e.multiplier == sorted[k] && e.flagged;
        });
        if (bad) {
            break;
        }
        report.converged_multiplier = sorted[k];
    }
    return report;
}

}  // namespace z2circ
