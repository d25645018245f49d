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

#include <gtest/gtest.h>

#include <cmath>

#include "z2circ/cluster_state.h"
#include "z2circ/tableau.h"
#include "z2circ/verify.h"

namespace z2circ {
namespace {

TEST(EngineEquivalence, OneDimensionalTapes) {
    const auto r = verify_engines(1, 12, 24, 60, {0.1, 0.3, 0.5, 0.7, 0.9}, 3);
    EXPECT_TRUE(r.passed()) << r.first_failure;
    EXPECT_EQ(r.events_checked, 60u * 24 * 12);
}

TEST(EngineEquivalence, TwoDimensionalTapes) {
    const auto r = verify_engines(2, 4, 16, 60, {0.2, 0.4, 0.6, 0.8}, 4);
    EXPECT_TRUE(r.passed()) << r.first_failure;
}

TEST(EngineEquivalence, TableauRecordsTheSameTape) {
    const Lattice lat(2, 4);
    const auto schedule = generate_schedule(lat, 0.5, 8, trajectory_stream(6, 0, Lane::Schedule));
    const auto tape = record_outcomes(lat, schedule, InitialState::AllZero, trajectory_stream(6, 0, Lane::Dynamics));
    Tableau t(lat.num_sites(), InitialState::AllZero);
    std::vector<TapeRecord> recorded;
    auto ch = OutcomeChannel::sample(trajectory_stream(6, 0, Lane::Dynamics));
    ch.record_into(&recorded);
    run(t, lat, schedule, ch);
    EXPECT_EQ(recorded, tape.records);
}

TEST(EngineEquivalence, TamperedTapeIsReported) {
    const Lattice lat(1, 8);
    const auto schedule = generate_schedule(lat, 0.5, 8, trajectory_stream(7, 0, Lane::Schedule));
    auto tape = record_outcomes(lat, schedule, InitialState::AllZero, trajectory_stream(7, 0, Lane::Dynamics));
    auto it = std::find_if(tape.records.begin(), tape.records.end(),
                           [](const TapeRecord &r) { return r.kind == TapeRecord::Outcome && !r.random; });
    ASSERT_NE(it, tape.records.end());
    it->value = static_cast<std::int8_t>(-it->value);
    EngineEquivalenceReport report;
    check_tape(tape, report);
    EXPECT_FALSE(report.total_failures() == 0);
    EXPECT_FALSE(report.first_failure.empty());
}

TEST(EngineEquivalence, RequiresProbabilities) {
    EXPECT_THROW(verify_engines(1, 8, 2, 2, {}, 0), std::invalid_argument);
}

TEST(VerifySuites, ReportsSerialize) {
    const auto ch = verify_channel_suite({1, 2}, 5, 1);
    EXPECT_TRUE(ch.passed());
    EXPECT_EQ(ch.to_json()["rings"].size(), 2u);
    const auto red = verify_reduction_suite({4}, {0.5}, 3, 5, 1);
    EXPECT_TRUE(red.passed());
    EXPECT_EQ(red.to_json()["cases"][0]["n"], 4);
}

}  // namespace
}  // namespace z2circ
