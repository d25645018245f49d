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

#include "z2circ/verify.h"

#include <sstream>

#include "z2circ/cluster_state.h"
#include "z2circ/lattice.h"
#include "z2circ/observables.h"
#include "z2circ/percolation.h"
#include "z2circ/schedule.h"
#include "z2circ/tableau.h"

namespace z2circ {

namespace {

void note(EngineEquivalenceReport &report, const OutcomeTape &tape, std::size_t event, const std::string &what) {
    if (!report.first_failure.empty()) {
        return;
    }
    std::ostringstream os;
    os << "stream " << tape.schedule.stream << ", p = " << tape.schedule.p << ", event " << event << ": " << what;
    report.first_failure = os.str();
}

std::string describe(const TrajectoryObservables &a, const TrajectoryObservables &b) {
    std::ostringstream os;
    os << "cluster (I=" << a.tripartite_I << " U=" << a.U_sign << " M=" << a.magnetization << " zz=" << a.zz_half
       << ") vs tableau (I=" << b.tripartite_I << " U=" << b.U_sign << " M=" << b.magnetization
       << " zz=" << b.zz_half << ")";
    return os.str();
}

}  // namespace

nlohmann::json EngineEquivalenceReport::to_json() const {
    return {{"suite", "oracles"},
            {"dimension", dimension},
            {"L", L},
            {"sweeps", sweeps},
            {"tapes", tapes},
            {"p_values", p_values},
            {"seed", seed},
            {"events_checked", events_checked},
            {"state_mismatches", state_mismatches},
            {"observable_mismatches", observable_mismatches},
            {"partition_mismatches", partition_mismatches},
            {"replay_errors", replay_errors},
            {"invariant_violations", invariant_violations},
            {"first_failure", first_failure},
            {"passed", passed()}};
}

void check_tape(const OutcomeTape &tape, EngineEquivalenceReport &report) {
    const Lattice lattice(tape.schedule.dimension, tape.schedule.linear_size);
    check_schedule(tape.schedule, lattice);
    const auto partition = quarter_partition(lattice);
    const auto n = lattice.num_sites();

    ClusterState state(lattice, tape.initial);
    Tableau tableau(n, tape.initial);
    SpaceTimeForest forest(lattice, tape.initial);
    auto cluster_channel = OutcomeChannel::replay(tape.records);
    auto tableau_channel = OutcomeChannel::replay(tape.records);

    for (std::size_t k = 0; k < tape.schedule.events.size(); ++k) {
        const Event &e = tape.schedule.events[k];
        try {
            state.site_update(e, cluster_channel);
            state.check_integrity();
        } catch (const std::exception &ex) {
            ++report.replay_errors;
            note(report, tape, k, std::string("cluster engine: ") + ex.what());
            return;
        }
        try {
            tableau.site_update(lattice, e, tableau_channel);
        } catch (const ReplayMismatch &ex) {
            ++report.replay_errors;
            note(report, tape, k, std::string("tableau: ") + ex.what());
            return;
        }
        forest.ingest(e);
        ++report.events_checked;

        const CanonicalState mine = state.canonical();
        CanonicalState oracle;
        try {
            oracle = tableau.extract_partition();
        } catch (const std::logic_error &ex) {
            ++report.state_mismatches;
            note(report, tape, k, std::string("tableau not of GHZ form: ") + ex.what());
            return;
        }
        if (mine != oracle) {
            ++report.state_mismatches;
            note(report, tape, k, "state: " + mine.first_difference(oracle));
            return;
        }
        const auto a = measure_all(state, partition);
        const auto b = measure_all(tableau, lattice, partition);
        bool entropies_agree = true;
        for (const auto &region : partition.regions) {
            entropies_agree = entropies_agree && entropy(state, region) == tableau.entropy(region);
        }
        if (!(a == b) || !entropies_agree) {
            ++report.observable_mismatches;
            note(report, tape, k, "observables: " + describe(a, b));
        }
        const CanonicalState classified = forest.classify();
        if (!classified.same_partition(mine)) {
            ++report.partition_mismatches;
            note(report, tape, k, "percolation partition: " + mine.first_difference(classified));
        } else if (percolation_observables(classified).has_background != (a.abs_U == 0)) {
            ++report.partition_mismatches;
            note(report, tape, k, "percolation background flag disagrees with <U>");
        }
        if (lattice.dimension() == 1 && e.kind == EventKind::BondRound) {
            const auto nb = lattice.neighbors(e.site);
            const auto left = state.bond_value(nb[0], e.site);
            const auto right = state.bond_value(e.site, nb[1]);
            if (!left || !right || (*left != +1 && *right != +1)) {
                ++report.invariant_violations;
                note(report, tape, k, "both bonds at the updated site are -1 or undetermined");
            }
        }
        if (tape.initial == InitialState::AllPlus && a.U_sign != +1) {
            ++report.invariant_violations;
            note(report, tape, k, "<U> != +1 from all-plus");
        }
    }
    if (!cluster_channel.exhausted() || !tableau_channel.exhausted()) {
        ++report.replay_errors;
        note(report, tape, tape.schedule.events.size(), "tape not fully consumed");
    }
}

EngineEquivalenceReport verify_engines(int dimension, int L, std::size_t sweeps, std::size_t tapes,
                                       const std::vector<double> &p_values, std::uint64_t seed) {
    if (p_values.empty()) {
        throw std::invalid_argument("verify_engines needs at least one p value");
    }
    EngineEquivalenceReport report;
    report.dimension = dimension;
    report.L = L;
    report.sweeps = sweeps;
    report.tapes = tapes;
    report.p_values = p_values;
    report.seed = seed;
    const Lattice lattice(dimension, L);
    for (std::size_t t = 0; t < tapes; ++t) {
        const double p = p_values[t % p_values.size()];
        const auto schedule = generate_schedule(lattice, p, sweeps, trajectory_stream(seed, t, Lane::Schedule));
        const InitialState initial = t % 4 == 3 ? InitialState::AllPlus : InitialState::AllZero;
        const auto tape = record_outcomes(lattice, schedule, initial, trajectory_stream(seed, t, Lane::Dynamics));
        check_tape(tape, report);
    }
    return report;
}

nlohmann::json to_json(const dense::RelationReport &r) {
    return {{"n", r.n},
            {"trials", r.trials},
            {"max_xd_minus_dt", r.max_xd_minus_dt},
            {"max_df_minus_fd", r.max_df_minus_fd},
            {"max_d_idempotence", r.max_d_idempotence},
            {"max_completeness", r.max_completeness},
            {"max_single_site_vs_half", r.max_single_site_vs_half},
            {"tolerance", r.tolerance},
            {"passed", r.passed()}};
}

nlohmann::json to_json(const dense::ReductionReport &r) {
    return {{"n", r.n},
            {"p", r.p},
            {"sweeps", r.sweeps},
            {"trials", r.trials},
            {"max_distance_fixed", r.max_distance_fixed},
            {"max_distance_averaged", r.max_distance_averaged},
            {"max_classical_offdiagonal", r.max_classical_offdiagonal},
            {"max_diagonal_vs_mvc", r.max_diagonal_vs_mvc},
            {"tolerance", r.tolerance},
            {"passed", r.passed()}};
}

bool ChannelSuiteReport::passed() const {
    return !rings.empty() && std::all_of(rings.begin(), rings.end(), [](const auto &r) { return r.passed(); });
}

nlohmann::json ChannelSuiteReport::to_json() const {
    nlohmann::json j{{"suite", "channels"}, {"passed", passed()}};
    auto &arr = j["rings"] = nlohmann::json::array();
    for (const auto &r : rings) {
        arr.push_back(z2circ::to_json(r));
    }
    return j;
}

ChannelSuiteReport verify_channel_suite(const std::vector<int> &ring_sizes, int trials, std::uint64_t seed) {
    ChannelSuiteReport report;
    for (int n : ring_sizes) {
        report.rings.push_back(dense::verify_relations(dense::ring_neighbors(n), trials, seed + n));
    }
    return report;
}

bool ReductionSuiteReport::passed() const {
    return !cases.empty() && std::all_of(cases.begin(), cases.end(), [](const auto &r) { return r.passed(); });
}

nlohmann::json ReductionSuiteReport::to_json() const {
    nlohmann::json j{{"suite", "equivalence"}, {"against", "mvc"}, {"passed", passed()}};
    auto &arr = j["cases"] = nlohmann::json::array();
    for (const auto &r : cases) {
        arr.push_back(z2circ::to_json(r));
    }
    return j;
}

ReductionSuiteReport verify_reduction_suite(const std::vector<int> &ring_sizes, const std::vector<double> &p_values,
                                            int sweeps, int trials, std::uint64_t seed) {
    ReductionSuiteReport report;
    for (int n : ring_sizes) {
        for (double p : p_values) {
            report.cases.push_back(dense::verify_reduction(n, p, sweeps, trials, seed));
        }
    }
    return report;
}

}  // namespace z2circ
