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

#include "z2circ/schedule.h"

namespace z2circ {
namespace {

TEST(Schedule, ZeroProbabilityIsAllMeasureX) {
    const Lattice lat(1, 8);
    const auto s = generate_schedule(lat, 0.0, 5, RandomStream(1, 0));
    ASSERT_EQ(s.events.size(), 40u);
    for (const auto &e : s.events) {
        EXPECT_EQ(e.kind, EventKind::MeasureX);
    }
}

TEST(Schedule, UnitProbabilityIsAllBondRounds) {
    const Lattice lat(2, 4);
    const auto s = generate_schedule(lat, 1.0, 3, RandomStream(1, 0));
    for (const auto &e : s.events) {
        EXPECT_EQ(e.kind, EventKind::BondRound);
    }
}

TEST(Schedule, DeterministicGivenStream) {
    const Lattice lat(1, 16);
    const auto a = generate_schedule(lat, 0.5, 10, RandomStream(99, 4));
    const auto b = generate_schedule(lat, 0.5, 10, RandomStream(99, 4));
    EXPECT_EQ(a, b);
    const auto c = generate_schedule(lat, 0.5, 10, RandomStream(99, 5));
    EXPECT_NE(a.events, c.events);
}

TEST(Schedule, RasterOrderWithinSweeps) {
    const Lattice lat(2, 3);
    const auto s = generate_schedule(lat, 0.3, 4, RandomStream(2, 0));
    check_schedule(s, lat);
    for (std::size_t t = 0; t < s.num_sweeps(); ++t) {
        const auto sweep = s.sweep(t);
        for (std::size_t k = 0; k < sweep.size(); ++k) {
            EXPECT_EQ(sweep[k].site, k);
        }
    }
}

TEST(Schedule, RandomOrderIsAPermutationPerSweep) {
    const Lattice lat(1, 12);
    const auto s = generate_schedule(lat, 0.3, 20, RandomStream(2, 0), SiteOrder::Random);
    EXPECT_NO_THROW(check_schedule(s, lat));
    bool some_not_raster = false;
    for (std::size_t t = 0; t < s.num_sweeps(); ++t) {
        some_not_raster = some_not_raster || s.sweep(t)[0].site != 0;
    }
    EXPECT_TRUE(some_not_raster);
}

TEST(Schedule, BondFractionWithinBinomialError) {
    const Lattice lat(1, 64);
    const double p = 0.37;
    const auto s = generate_schedule(lat, p, 400, RandomStream(17, 0));
    std::size_t bonds = 0;
    for (const auto &e : s.events) {
        bonds += e.kind == EventKind::BondRound;
    }
    const double n = static_cast<double>(s.events.size());
    EXPECT_NEAR(bonds / n, p, 5 * std::sqrt(p * (1 - p) / n));
}

TEST(Schedule, GeneratorMatchesFullSchedule) {
    const Lattice lat(2, 4);
    const auto s = generate_schedule(lat, 0.6, 7, RandomStream(8, 3), SiteOrder::Random);
    SweepGenerator gen(lat, 0.6, RandomStream(8, 3), SiteOrder::Random);
    for (std::size_t t = 0; t < 7; ++t) {
        const auto sweep = gen.next();
        const auto ref = s.sweep(t);
        EXPECT_TRUE(std::equal(sweep.begin(), sweep.end(), ref.begin(), ref.end()));
    }
}

TEST(Schedule, RejectsOutOfRangeP) {
    const Lattice lat(1, 4);
    EXPECT_THROW(generate_schedule(lat, 1.5, 1, RandomStream(0, 0)), std::invalid_argument);
    EXPECT_THROW(generate_schedule(lat, -0.1, 1, RandomStream(0, 0)), std::invalid_argument);
}

TEST(Schedule, CheckRejectsBrokenSweep) {
    const Lattice lat(1, 4);
    auto s = generate_schedule(lat, 0.5, 2, RandomStream(0, 0));
    s.events[1].site = 0;
    EXPECT_THROW(check_schedule(s, lat), std::invalid_argument);
}

TEST(Schedule, Strings) {
    EXPECT_EQ(initial_state_from_string(to_string(InitialState::AllPlus)), InitialState::AllPlus);
    EXPECT_EQ(site_order_from_string("random"), SiteOrder::Random);
    EXPECT_THROW(initial_state_from_string("up"), std::invalid_argument);
}

}  // namespace
}  // namespace z2circ
