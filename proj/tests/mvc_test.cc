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

#include <numeric>

#include "z2circ/mvc.h"

namespace z2circ {
namespace {

// Closed-form single-site kernel: P(new spin = +1).
double closed_form_up(int neighbor_sum, double q) {
    if (neighbor_sum == 0) {
        return 0.5;
    }
    return neighbor_sum > 0 ? 1.0 - q : q;
}

TEST(MvcKernel, FormulationsAgreeOnEveryPattern) {
    for (int degree : {2, 4}) {
        for (unsigned pattern = 0; pattern < (1u << degree); ++pattern) {
            int sum = 0;
            for (int k = 0; k < degree; ++k) {
                sum += (pattern >> k) & 1 ? -1 : +1;
            }
            for (Spin current : {Spin{+1}, Spin{-1}}) {
                for (double p : {0.0, 0.13, 0.5, 0.85, 1.0}) {
                    const double q = noise_from_p(p);
                    const double via_q = exact_up_probability([&](auto &c) { return update_q(sum, current, q, c); });
                    const double via_p = exact_up_probability([&](auto &c) { return update_p(sum, current, p, c); });
                    EXPECT_NEAR(via_q, via_p, 1e-15);
                    EXPECT_NEAR(via_q, closed_form_up(sum, q), 1e-15);
                }
            }
        }
    }
}

TEST(MvcKernel, AgreeWithMajorityMarginal) {
    for (double p : {0.2, 0.6, 0.9}) {
        const double agree = exact_up_probability([&](auto &c) { return update_p(3, Spin{-1}, p, c); });
        EXPECT_NEAR(agree, p + (1 - p) / 2, 1e-15);
        EXPECT_NEAR(agree, 1 - noise_from_p(p), 1e-15);
    }
}

TEST(MvcKernel, GlobalFlipSymmetry) {
    for (int sum : {-4, -2, 0, 2, 4}) {
        const double up = exact_up_probability([&](auto &c) { return update_p(sum, Spin{+1}, 0.7, c); });
        const double down = exact_up_probability([&](auto &c) { return update_p(-sum, Spin{-1}, 0.7, c); });
        EXPECT_NEAR(up, 1 - down, 1e-15);
    }
}

TEST(MvcKernel, LimitCases) {
    EXPECT_NEAR(exact_up_probability([](auto &c) { return update_q(2, Spin{-1}, 0.0, c); }), 1.0, 0);
    EXPECT_NEAR(exact_up_probability([](auto &c) { return update_q(4, Spin{-1}, 0.5, c); }), 0.5, 0);
    EXPECT_NEAR(exact_up_probability([](auto &c) { return update_p(-2, Spin{+1}, 1.0, c); }), 0.0, 0);
    EXPECT_NEAR(exact_up_probability([](auto &c) { return update_p(-2, Spin{+1}, 0.0, c); }), 0.5, 0);
}

TEST(MvcStep, SampledFrequenciesMatchKernel) {
    const Lattice lat(2, 4);
    // Neighbours of site 5: 4, 6, 1, 9. Pattern (+, +, +, -).
    SpinConfig cfg{std::vector<Spin>(16, +1)};
    cfg.spins[9] = -1;
    ASSERT_EQ(neighbor_sum(cfg, lat, 5), 2);
    RandomStream rng(4, 0);
    const int n = 100000;
    int up_q = 0;
    int up_p = 0;
    for (int i = 0; i < n; ++i) {
        mvc_step_q(cfg, lat, 5, 0.2, rng);
        up_q += cfg.spins[5] > 0;
        mvc_step_p(cfg, lat, 5, 0.6, rng);
        up_p += cfg.spins[5] > 0;
    }
    EXPECT_NEAR(up_q / double(n), 0.8, 5 * std::sqrt(0.16 / n));
    EXPECT_NEAR(up_p / double(n), 0.8, 5 * std::sqrt(0.16 / n));
}

TEST(MvcRun, FullProbabilityIsAFixedPoint) {
    const Lattice lat(2, 16);
    const MvcConfig cfg{Formulation::ProbP, 1.0, 20, InitialSpins::AllUp};
    const auto run = run_mvc(lat, cfg, RandomStream(1, 0), RandomStream(1, 1));
    for (double m : run.magnetization_history) {
        EXPECT_EQ(m, 1.0);
    }
    EXPECT_EQ(run.magnetization_history.size(), 20u);
}

TEST(MvcRun, ZeroProbabilityGivesIndependentSpins) {
    const Lattice lat(2, 32);
    const MvcConfig cfg{Formulation::ProbP, 0.0, 5, InitialSpins::AllUp};
    const auto run = run_mvc(lat, cfg, RandomStream(2, 0), RandomStream(2, 1));
    for (double m : run.magnetization_history) {
        EXPECT_LT(std::abs(m), 5.0 / 32);
    }
}

TEST(MvcRun, NoOrderInOneDimension) {
    const Lattice lat(1, 128);
    const MvcConfig cfg{Formulation::NoiseQ, 0.05, 2000, InitialSpins::AllUp};
    const auto run = run_mvc(lat, cfg, RandomStream(3, 0), RandomStream(3, 1));
    EXPECT_LT(std::abs(run.magnetization_history.back()), 5.0 / std::sqrt(128.0));
}

TEST(MvcRun, SymmetricInitialEnsembleHasZeroMeanMagnetization) {
    const Lattice lat(2, 8);
    const MvcConfig cfg{Formulation::ProbP, 0.9, 10, InitialSpins::Random};
    const int n = 2000;
    double sum = 0;
    double sq = 0;
    for (int t = 0; t < n; ++t) {
        const auto run = run_mvc(lat, cfg, trajectory_stream(5, t, Lane::Schedule), trajectory_stream(5, t, Lane::Dynamics));
        const double m = run.magnetization_history.back();
        sum += m;
        sq += m * m;
    }
    const double mean = sum / n;
    const double se = std::sqrt((sq / n - mean * mean) / n);
    EXPECT_LT(std::abs(mean), 5 * se);
}

TEST(MvcRun, ProbPMatchesScheduleDrivenRun) {
    const Lattice lat(1, 16);
    const MvcConfig cfg{Formulation::ProbP, 0.7, 6, InitialSpins::AllUp};
    const auto a = run_mvc(lat, cfg, RandomStream(9, 0), RandomStream(9, 1));
    const auto schedule = generate_schedule(lat, 0.7, 6, RandomStream(9, 0));
    const auto b = run_mvc_schedule(lat, schedule, SpinConfig{std::vector<Spin>(16, +1)}, RandomStream(9, 1));
    EXPECT_EQ(a.final_config, b.final_config);
    EXPECT_EQ(a.magnetization_history, b.magnetization_history);
}

TEST(MvcRun, ConfigValidation) {
    EXPECT_THROW((MvcConfig{Formulation::NoiseQ, 0.5, 1, InitialSpins::AllUp}.validate()), std::invalid_argument);
    EXPECT_THROW((MvcConfig{Formulation::ProbP, 1.2, 1, InitialSpins::AllUp}.validate()), std::invalid_argument);
    EXPECT_NO_THROW((MvcConfig{Formulation::NoiseQ, 0.0, 1, InitialSpins::AllUp}.validate()));
}

TEST(MvcDistribution, AveragedEqualsWeightedScheduleSum) {
    const Lattice lat(1, 4);
    const double p = 0.35;
    const auto averaged = evolve_distribution_averaged(lat, p, 1, 0);
    std::vector<double> mix(16, 0.0);
    for (unsigned mask = 0; mask < 16; ++mask) {
        Schedule s;
        s.dimension = 1;
        s.linear_size = 4;
        s.p = p;
        s.sites_per_sweep = 4;
        double w = 1.0;
        for (Site k = 0; k < 4; ++k) {
            const bool bond = (mask >> k) & 1;
            s.events.push_back({bond ? EventKind::BondRound : EventKind::MeasureX, k});
            w *= bond ? p : 1 - p;
        }
        const auto d = evolve_distribution(lat, s, 0);
        for (int x = 0; x < 16; ++x) {
            mix[x] += w * d[x];
        }
    }
    for (int x = 0; x < 16; ++x) {
        EXPECT_NEAR(averaged[x], mix[x], 1e-14);
    }
    EXPECT_NEAR(std::accumulate(averaged.begin(), averaged.end(), 0.0), 1.0, 1e-14);
}

TEST(MvcDistribution, MatchesSampledFrequencies) {
    const Lattice lat(1, 4);
    const auto schedule = generate_schedule(lat, 0.6, 3, RandomStream(11, 0));
    const auto exact = evolve_distribution(lat, schedule, 0);
    std::vector<int> counts(16, 0);
    const int n = 40000;
    for (int t = 0; t < n; ++t) {
        const auto r = run_mvc_schedule(lat, schedule, SpinConfig{std::vector<Spin>(4, +1)}, RandomStream(11, 100 + t));
        unsigned idx = 0;
        for (int k = 0; k < 4; ++k) {
            idx |= (r.final_config.spins[k] < 0 ? 1u : 0u) << k;
        }
        ++counts[idx];
    }
    for (int x = 0; x < 16; ++x) {
        EXPECT_NEAR(counts[x] / double(n), exact[x], 5 * std::sqrt(exact[x] * (1 - exact[x]) / n) + 1e-12);
    }
}

}  // namespace
}  // namespace z2circ
