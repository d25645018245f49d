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

#include "z2circ/cli.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "z2circ/cluster_state.h"
#include "z2circ/ensemble.h"
#include "z2circ/fss.h"
#include "z2circ/observables.h"
#include "z2circ/percolation.h"
#include "z2circ/tableau.h"
#include "z2circ/tape.h"
#include "z2circ/verify.h"

namespace z2circ {

namespace {

class IoError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

std::vector<double> split_numbers(const std::string &text, char sep) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string cell;
    while (std::getline(ss, cell, sep)) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(cell, &used);
        } catch (const std::exception &) {
            used = std::string::npos;
        }
        if (used != cell.size()) {
            throw ConfigError("cannot parse number '" + cell + "' in '" + text + "'");
        }
        out.push_back(v);
    }
    return out;
}

/// "v" (fixed) or "lo:hi".
std::array<double, 2> parse_bound(const std::string &text) {
    const auto v = split_numbers(text, ':');
    if (v.size() == 1) {
        return {v[0], v[0]};
    }
    if (v.size() == 2 && v[0] <= v[1]) {
        return {v[0], v[1]};
    }
    throw ConfigError("bound '" + text + "' must be a value or lo:hi");
}

nlohmann::json load_json(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path);
    }
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception &e) {
        throw ConfigError(path + ": " + e.what());
    }
}

void write_text(const std::string &path, const std::string &text) {
    const auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) {
        std::error_code ec;
        std::filesystem::create_directories(parent, ec);
    }
    std::ofstream out(path);
    out << text;
    if (!out) {
        throw IoError("cannot write " + path);
    }
}

std::string default_dir() {
    const char *env = std::getenv(kOutputDirEnv);
    return env && *env ? env : ".";
}

nlohmann::json observables_json(const TrajectoryObservables &o) {
    return {{"tripartite", o.tripartite_I}, {"abs_U", o.abs_U},  {"U", o.U_sign},
            {"M", o.magnetization},         {"zz", o.zz_half},   {"background_fraction", o.background_fraction}};
}

nlohmann::json partition_json(const CanonicalState &c) {
    std::size_t background = 0;
    std::size_t clusters = 0;
    for (std::size_t s = 0; s < c.label.size(); ++s) {
        background += c.label[s] < 0;
        clusters += c.label[s] == static_cast<std::int32_t>(s);
    }
    return {{"background_sites", background}, {"clusters", clusters}, {"labels", c.label}};
}

struct RunArgs {
    std::string config, engine, p_range, initial, order, sampling, out, tape_out;
    int dim = 1;
    std::vector<int> L;
    std::vector<double> p;
    std::size_t sweeps = 0, sweeps_per_L = 0, traj = 0, burn_in = 0, stride = 1;
    std::uint64_t seed = 0;
    unsigned workers = 0;
    bool check_invariants = false;
    std::vector<std::size_t> convergence;
};

int cmd_run(const RunArgs &a, const CLI::App &app, std::ostream &out) {
    nlohmann::json j = a.config.empty() ? nlohmann::json::object() : load_json(a.config);
    if (!j.is_object()) {
        throw ConfigError("config must be a JSON object");
    }
    auto given = [&](const char *name) { return app.count(name) > 0; };
    if (given("--engine")) j["engine"] = a.engine;
    if (given("--dim")) j["dimension"] = a.dim;
    if (given("--L")) j["L"] = a.L;
    if (given("--p")) j["p"] = a.p;
    if (given("--p-range")) {
        const auto r = split_numbers(a.p_range, ':');
        if (r.size() != 3) {
            throw ConfigError("--p-range expects start:stop:step");
        }
        j["p"] = {{"start", r[0]}, {"stop", r[1]}, {"step", r[2]}};
    }
    if (given("--sweeps")) j["sweeps"] = a.sweeps;
    if (given("--sweeps-per-L")) j["sweeps_per_L"] = a.sweeps_per_L;
    if (given("--traj")) j["n_traj"] = a.traj;
    if (given("--seed")) j["seed"] = a.seed;
    if (given("--initial")) j["initial"] = a.initial;
    if (given("--order")) j["order"] = a.order;
    if (given("--sampling")) j["sampling"] = a.sampling;
    if (given("--burn-in")) j["burn_in"] = a.burn_in;
    if (given("--stride")) j["stride"] = a.stride;
    if (given("--workers")) j["workers"] = a.workers;
    if (given("--check-invariants")) j["check_invariants"] = a.check_invariants;
    if (given("--out")) j["output"] = a.out;

    const RunConfig config = RunConfig::from_json(j);
    config.validate();

    std::string stem = config.output;
    if (stem.empty()) {
        stem = (std::filesystem::path(default_dir()) / ("sweep-" + config.hash())).string();
    }

    if (!a.convergence.empty()) {
        const auto report = convergence_check(config, a.convergence);
        const auto text = report.to_json().dump(2);
        write_text(stem + "-convergence.json", text + "\n");
        out << text << '\n';
        return kExitOk;
    }

    const auto result = run_sweep(config);
    const auto parent = std::filesystem::path(stem).parent_path();
    if (!parent.empty()) {
        std::error_code ec;
        std::filesystem::create_directories(parent, ec);
    }
    try {
        result.write_files(stem);
    } catch (const std::ios_base::failure &e) {
        throw IoError(e.what());
    }
    nlohmann::json report{{"csv", stem + ".csv"},
                          {"metadata", stem + ".json"},
                          {"config_hash", config.hash()},
                          {"points", result.points.size()}};
    if (!a.tape_out.empty()) {
        if (config.engine != Engine::Cluster) {
            throw ConfigError("--tape-out needs the cluster engine");
        }
        const auto &pt = result.points.front();
        const Lattice lattice(config.dimension, pt.L);
        const auto schedule = generate_schedule(lattice, pt.p, pt.sweeps,
                                                trajectory_stream(pt.point_seed, 0, Lane::Schedule), config.order);
        const auto tape = record_outcomes(lattice, schedule, config.initial,
                                          trajectory_stream(pt.point_seed, 0, Lane::Dynamics));
        try {
            write_tape_file(a.tape_out, tape);
        } catch (const std::ios_base::failure &e) {
            throw IoError(e.what());
        }
        report["tape"] = a.tape_out;
    }
    out << report.dump(2) << '\n';
    return kExitOk;
}

int emit_report(const nlohmann::json &report, bool passed, const std::string &path, std::ostream &out) {
    const auto text = report.dump(2);
    if (!path.empty()) {
        write_text(path, text + "\n");
    }
    out << text << '\n';
    return passed ? kExitOk : kExitVerification;
}

}  // namespace

int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
    CLI::App app{"Monte Carlo suite for a Z2-symmetric adaptive monitored circuit", "z2circ"};
    app.require_subcommand(1);

    // run
    RunArgs ra;
    auto *run = app.add_subcommand("run", "run a trajectory ensemble over an (L, p) grid");
    run->add_option("--config", ra.config, "JSON run config; flags override its fields");
    run->add_option("--engine", ra.engine, "cluster | mvc | percolation");
    run->add_option("--dim", ra.dim, "lattice dimension (1 or 2)");
    run->add_option("--L", ra.L, "system sizes")->delimiter(',');
    run->add_option("--p", ra.p, "p values")->delimiter(',');
    run->add_option("--p-range", ra.p_range, "p grid as start:stop:step");
    run->add_option("--sweeps", ra.sweeps, "sweeps per trajectory (default sweeps-per-L * L)");
    run->add_option("--sweeps-per-L", ra.sweeps_per_L, "default sweep multiplier (4)");
    run->add_option("--traj", ra.traj, "trajectories per point");
    run->add_option("--seed", ra.seed, "master seed");
    run->add_option("--initial", ra.initial, "all-zero | all-plus");
    run->add_option("--order", ra.order, "raster | random");
    run->add_option("--sampling", ra.sampling, "final | time-average");
    run->add_option("--burn-in", ra.burn_in, "time-average: first sampled sweep");
    run->add_option("--stride", ra.stride, "time-average: sweeps between samples");
    run->add_option("--workers", ra.workers, "worker threads (0 = all cores)");
    run->add_option("--out", ra.out, "output stem; writes <stem>.csv and <stem>.json");
    run->add_option("--tape-out", ra.tape_out, "record trajectory 0 of the first point (cluster engine)");
    run->add_flag("--check-invariants", ra.check_invariants, "check engine invariants after every sweep");
    run->add_option("--convergence", ra.convergence, "run a convergence check with these sweep multipliers")
        ->delimiter(',');

    // verify
    auto *verify = app.add_subcommand("verify", "run a verification suite");
    verify->require_subcommand(1);
    std::string report_path;
    std::uint64_t vseed = 1;

    std::vector<int> ch_sizes{1, 2, 4};
    int ch_trials = 200;
    auto *channels = verify->add_subcommand("channels", "channel identities on small rings");
    channels->add_option("--sizes", ch_sizes, "ring sizes")->delimiter(',');
    channels->add_option("--trials", ch_trials, "random mixed states per ring");
    channels->add_option("--seed", vseed, "seed");
    channels->add_option("--report", report_path, "also write the JSON report here");

    int or_dim = 1;
    int or_L = 0;
    std::size_t or_sweeps = 0;
    std::size_t or_tapes = 500;
    std::vector<double> or_p{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    auto *oracles = verify->add_subcommand("oracles", "cluster engine vs tableau vs percolation, every event");
    oracles->add_option("--dim", or_dim, "lattice dimension");
    oracles->add_option("--L", or_L, "linear size (default 12 in 1d, 4 in 2d)");
    oracles->add_option("--sweeps", or_sweeps, "sweeps per tape (default 2 * dim * L)");
    oracles->add_option("--tapes", or_tapes, "number of tapes");
    oracles->add_option("--p", or_p, "p values, cycled over tapes")->delimiter(',');
    oracles->add_option("--seed", vseed, "seed");
    oracles->add_option("--report", report_path, "also write the JSON report here");

    std::string against;
    std::vector<int> eq_sizes{4, 5};
    std::vector<double> eq_p{0.2, 0.5, 0.8};
    int eq_sweeps = 6;
    int eq_trials = 100;
    auto *equivalence = verify->add_subcommand("equivalence", "quantum vs classical density matrices");
    equivalence->add_option("--against", against, "comparison model (mvc)")->required();
    equivalence->add_option("--sizes", eq_sizes, "ring sizes")->delimiter(',');
    equivalence->add_option("--p", eq_p, "p values")->delimiter(',');
    equivalence->add_option("--sweeps", eq_sweeps, "sweeps per schedule");
    equivalence->add_option("--trials", eq_trials, "schedules per case");
    equivalence->add_option("--seed", vseed, "seed");
    equivalence->add_option("--report", report_path, "also write the JSON report here");

    // analyze
    auto *analyze = app.add_subcommand("analyze", "finite-size scaling of a sweep CSV");
    analyze->require_subcommand(1);
    std::string input, observable, out_stem, direction = "any", pc_text, nu_text = "0.5:3", beta_text = "0";
    double p_min = -1e300, p_max = 1e300;
    int bootstrap = 200, grid = 11;
    std::uint64_t aseed = 1;
    auto add_common = [&](CLI::App *sub) {
        sub->add_option("--input", input, "sweep CSV")->required();
        sub->add_option("--observable", observable, "observable name")->required();
        sub->add_option("--p-min", p_min, "lower end of the p window");
        sub->add_option("--p-max", p_max, "upper end of the p window");
        sub->add_option("--bootstrap", bootstrap, "bootstrap resamples");
        sub->add_option("--seed", aseed, "bootstrap seed");
        sub->add_option("--out", out_stem, "output stem for the JSON (and rescaled CSV)");
    };
    auto *crossing = analyze->add_subcommand("crossing", "pairwise crossings of the curves");
    add_common(crossing);
    crossing->add_option("--direction", direction, "any | rising | falling");
    auto *collapse = analyze->add_subcommand("collapse", "data collapse fit");
    add_common(collapse);
    collapse->add_option("--pc", pc_text, "p_c value or lo:hi (default: data range)");
    collapse->add_option("--nu", nu_text, "nu value or lo:hi");
    collapse->add_option("--beta", beta_text, "beta value or lo:hi");
    collapse->add_option("--grid", grid, "grid points per free parameter");

    // replay
    std::string tape_path, engine_name;
    auto *replay = app.add_subcommand("replay", "replay a recorded tape through one engine");
    replay->add_option("--tape", tape_path, "tape file (binary or JSON)")->required();
    replay->add_option("--engine", engine_name, "cluster | tableau | percolation")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitValidation;
    }

    try {
        if (*run) {
            return cmd_run(ra, *run, out);
        }
        if (*channels) {
            const auto r = verify_channel_suite(ch_sizes, ch_trials, vseed);
            return emit_report(r.to_json(), r.passed(), report_path, out);
        }
        if (*oracles) {
            const int L = or_L > 0 ? or_L : (or_dim == 1 ? 12 : 4);
            const std::size_t sweeps = or_sweeps > 0 ? or_sweeps : static_cast<std::size_t>(2 * or_dim * L);
            for (double p : or_p) {
                if (!(p >= 0.0 && p <= 1.0)) {
                    throw ConfigError("p values must lie in [0, 1]");
                }
            }
            const auto r = verify_engines(or_dim, L, sweeps, or_tapes, or_p, vseed);
            return emit_report(r.to_json(), r.passed(), report_path, out);
        }
        if (*equivalence) {
            if (against != "mvc") {
                throw ConfigError("verify equivalence supports --against mvc only");
            }
            const auto r = verify_reduction_suite(eq_sizes, eq_p, eq_sweeps, eq_trials, vseed);
            return emit_report(r.to_json(), r.passed(), report_path, out);
        }
        if (*crossing || *collapse) {
            std::ifstream in(input);
            if (!in) {
                throw IoError("cannot open " + input);
            }
            auto curves = read_sweep_curves(in, observable);
            curves = restrict_window(curves, p_min, p_max);
            if (*crossing) {
                CrossingOptions opt;
                if (direction == "rising") {
                    opt.direction = CrossingDirection::Rising;
                } else if (direction == "falling") {
                    opt.direction = CrossingDirection::Falling;
                } else if (direction != "any") {
                    throw ConfigError("--direction must be any, rising or falling");
                }
                opt.bootstrap = bootstrap;
                opt.seed = aseed;
                auto j = find_crossing(curves, opt).to_json();
                j["observable"] = observable;
                return emit_report(j, true, out_stem.empty() ? "" : out_stem + ".json", out);
            }
            CollapseBounds bounds;
            if (pc_text.empty()) {
                double lo = 1e300, hi = -1e300;
                for (const auto &c : curves) {
                    lo = std::min(lo, c.points.front().p);
                    hi = std::max(hi, c.points.back().p);
                }
                bounds.p_c = {lo, hi};
            } else {
                bounds.p_c = parse_bound(pc_text);
            }
            bounds.nu = parse_bound(nu_text);
            bounds.beta = parse_bound(beta_text);
            CollapseOptions opt;
            opt.grid = grid;
            opt.bootstrap = bootstrap;
            opt.seed = aseed;
            const auto result = optimize_collapse(curves, bounds, opt);
            auto j = result.to_json();
            j["observable"] = observable;
            if (!out_stem.empty()) {
                std::ostringstream csv;
                write_rescaled_csv(csv, rescale(curves, result.params));
                write_text(out_stem + "-rescaled.csv", csv.str());
            }
            return emit_report(j, true, out_stem.empty() ? "" : out_stem + ".json", out);
        }
        if (*replay) {
            const OutcomeTape tape = read_tape_file(tape_path);
            const Lattice lattice(tape.schedule.dimension, tape.schedule.linear_size);
            check_schedule(tape.schedule, lattice);
            const auto partition = quarter_partition(lattice);
            nlohmann::json j{{"engine", engine_name},
                             {"lattice", lattice.describe()},
                             {"p", tape.schedule.p},
                             {"sweeps", tape.schedule.num_sweeps()},
                             {"records", tape.records.size()}};
            if (engine_name == "cluster" || engine_name == "tableau") {
                auto channel = OutcomeChannel::replay(tape.records);
                if (engine_name == "cluster") {
                    ClusterState state(lattice, tape.initial);
                    z2circ::run(state, tape.schedule, channel);
                    j["observables"] = observables_json(measure_all(state, partition));
                    j["partition"] = partition_json(state.canonical());
                } else {
                    Tableau tableau(lattice.num_sites(), tape.initial);
                    z2circ::run(tableau, lattice, tape.schedule, channel);
                    j["observables"] = observables_json(measure_all(tableau, lattice, partition));
                    j["partition"] = partition_json(tableau.extract_partition());
                }
                if (!channel.exhausted()) {
                    throw ReplayMismatch(channel.position(), "tape has unconsumed records");
                }
            } else if (engine_name == "percolation") {
                SpaceTimeForest forest(lattice, tape.initial);
                forest.ingest(tape.schedule);
                const auto classified = forest.classify();
                const auto po = percolation_observables(classified);
                j["observables"] = {{"abs_U", po.has_background ? 0 : 1},
                                    {"background_fraction", po.background_fraction},
                                    {"largest_cluster_fraction", po.largest_cluster_fraction}};
                j["partition"] = partition_json(classified);
            } else {
                throw ConfigError("--engine must be cluster, tableau or percolation");
            }
            j["consistent"] = true;
            out << j.dump(2) << '\n';
            return kExitOk;
        }
    } catch (const IoError &e) {
        err << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::ios_base::failure &e) {
        err << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const TapeFormatError &e) {
        err << "error: invalid tape: " << e.what() << '\n';
        return kExitValidation;
    } catch (const ReplayMismatch &e) {
        err << "error: replay mismatch: " << e.what() << '\n';
        return kExitVerification;
    } catch (const TrajectoryError &e) {
        err << "error: " << e.what() << '\n';
        return kExitVerification;
    } catch (const NoCrossingError &e) {
        err << "error: " << e.what() << '\n';
        return kExitVerification;
    } catch (const AnalysisError &e) {
        err << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::invalid_argument &e) {
        err << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::logic_error &e) {
        err << "error: engine invariant: " << e.what() << '\n';
        return kExitVerification;
    }
    return kExitValidation;
}

}  // namespace z2circ
