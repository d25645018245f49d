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

#include <sstream>

#include "synthetic.h"
#include "z2circ/ensemble.h"
#include "z2circ/fss.h"

namespace z2circ {
namespace {

using testing::grid;
using testing::planted_curves;

ScalingCurve line(int L, double slope) {
    ScalingCurve c;
    c.L = L;
    for (double p : grid(0.3, 0.5, 0.02)) {
        c.points.push_back({p, slope * (p - 0.4), 0.01});
    }
    return c;
}

TEST(Interpolate, ExactOnCubics) {
    ScalingCurve c;
    c.L = 8;
    for (double p : grid(0.0, 1.0, 0.1)) {
        c.points.push_back({p, p * p * p - p, 0.1});
    }
    for (double p : {0.05, 0.33, 0.71, 0.95}) {
        EXPECT_NEAR(interpolate(c, p), p * p * p - p, 1e-12);
    }
    EXPECT_THROW(interpolate(c, 1.5), AnalysisError);
}

TEST(Crossing, TwoLines) {
    CrossingOptions opts;
    opts.bootstrap = 0;
    const auto r = find_crossing({line(8, 1.0), line(16, 2.0)}, opts);
    EXPECT_NEAR(r.p_c, 0.4, 1e-12);
    EXPECT_TRUE(r.all_pairs_cross());
}

TEST(Crossing, IdenticalCurvesHaveNoCrossing) {
    EXPECT_THROW(find_crossing({line(8, 1.0), line(16, 1.0)}), NoCrossingError);
}

TEST(Crossing, DirectionFilter) {
    CrossingOptions opts;
    opts.bootstrap = 0;
    opts.direction = CrossingDirection::Rising;
    EXPECT_NEAR(find_crossing({line(8, 1.0), line(16, 2.0)}, opts).p_c, 0.4, 1e-12);
    opts.direction = CrossingDirection::Falling;
    EXPECT_THROW(find_crossing({line(8, 1.0), line(16, 2.0)}, opts), NoCrossingError);
    EXPECT_NEAR(find_crossing({line(8, 2.0), line(16, 1.0)}, opts).p_c, 0.4, 1e-12);
}

TEST(Crossing, WindowExcludesCrossing) {
    CrossingOptions opts;
    opts.p_min = 0.42;
    EXPECT_THROW(find_crossing({line(8, 1.0), line(16, 2.0)}, opts), NoCrossingError);
}

TEST(Crossing, BootstrapErrorIsReported) {
    const auto r = find_crossing({line(8, 1.0), line(16, 2.0)});
    EXPECT_GT(r.error, 0.0);
    EXPECT_LT(r.error, 0.05);
    EXPECT_EQ(r.bootstrap_used, 200u);
}

TEST(Crossing, ConvergesUnderGridRefinement) {
    const CollapseParams truth{0.5, 1.0, 0.0};
    RandomStream rng(1, 0);
    CrossingOptions opts;
    opts.bootstrap = 0;
    const auto coarse = find_crossing(planted_curves(truth, {16, 32, 64}, grid(0.3, 0.7, 0.08), 0, rng), opts);
    const auto fine = find_crossing(planted_curves(truth, {16, 32, 64}, grid(0.3, 0.7, 0.01), 0, rng), opts);
    EXPECT_LE(std::abs(fine.p_c - 0.5), std::abs(coarse.p_c - 0.5) + 1e-12);
    EXPECT_LT(std::abs(fine.p_c - 0.5), 1e-4);
}

TEST(Collapse, QualityNearOneAtTruthAndWorseOffIt) {
    const CollapseParams truth{0.85, 1.0, 0.125};
    RandomStream rng(2, 0);
    const auto curves = planted_curves(truth, {12, 16, 24, 32}, grid(0.75, 0.95, 0.01), 0.005, rng);
    const double q = collapse_quality(curves, truth);
    EXPECT_GT(q, 0.5);
    EXPECT_LT(q, 1.6);
    EXPECT_GE(collapse_quality(curves, {0.85, 1.3, 0.125}), 2 * q);
    EXPECT_GE(collapse_quality(curves, {0.85, 0.7, 0.125}), 2 * q);
}

TEST(Collapse, InvariantUnderCurvePermutation) {
    const CollapseParams truth{0.4, 4.0 / 3, 0.0};
    RandomStream rng(3, 0);
    auto curves = planted_curves(truth, {32, 64, 128}, grid(0.3, 0.5, 0.02), 0.01, rng);
    const double q = collapse_quality(curves, {0.41, 1.2, 0.0});
    std::swap(curves[0], curves[2]);
    EXPECT_DOUBLE_EQ(collapse_quality(curves, {0.41, 1.2, 0.0}), q);
}

TEST(Collapse, StderrScalingKeepsArgmin) {
    const CollapseParams truth{0.4, 4.0 / 3, 0.0};
    RandomStream rng(4, 0);
    const auto curves = planted_curves(truth, {32, 64, 128}, grid(0.3, 0.5, 0.02), 0.01, rng);
    auto scaled = curves;
    for (auto &c : scaled) {
        for (auto &pt : c.points) {
            pt.dy *= 3.0;
        }
    }
    EXPECT_NEAR(collapse_quality(scaled, truth), collapse_quality(curves, truth) / 9.0, 1e-12);
    CollapseBounds b;
    b.p_c = {0.3, 0.5};
    b.nu = {0.5, 3.0};
    CollapseOptions o;
    o.bootstrap = 0;
    const auto r1 = optimize_collapse(curves, b, o);
    const auto r2 = optimize_collapse(scaled, b, o);
    EXPECT_NEAR(r1.params.p_c, r2.params.p_c, 1e-5);
    EXPECT_NEAR(r1.params.nu, r2.params.nu, 1e-4);
}

TEST(Collapse, SingleCurveIsAnError) {
    const CollapseParams truth{0.4, 1.0, 0.0};
    RandomStream rng(5, 0);
    const auto curves = planted_curves(truth, {32}, grid(0.3, 0.5, 0.02), 0.01, rng);
    EXPECT_THROW(collapse_quality(curves, truth), AnalysisError);
    EXPECT_THROW(optimize_collapse(curves, {}), AnalysisError);
}

TEST(Collapse, RecoversPlantedParameters) {
    const CollapseParams truth{0.85, 1.0, 0.125};
    RandomStream rng(6, 0);
    const auto curves = planted_curves(truth, {12, 16, 24, 32}, grid(0.75, 0.95, 0.01), 0.005, rng);
    CollapseBounds b;
    b.p_c = {0.8, 0.9};
    b.nu = {0.5, 2.0};
    b.beta = {0.0, 0.5};
    CollapseOptions o;
    o.bootstrap = 100;
    const auto r = optimize_collapse(curves, b, o);
    EXPECT_TRUE(r.converged);
    EXPECT_NEAR(r.params.p_c, 0.85, 0.01);
    EXPECT_NEAR(r.params.nu, 1.0, 0.15);
    EXPECT_NEAR(r.params.beta, 0.125, 0.05);
    EXPECT_TRUE(r.contains(truth));
    EXPECT_LE(r.interval[0][0], r.params.p_c);
    EXPECT_GE(r.interval[0][1], r.params.p_c);
}

TEST(Collapse, FixedParameterStaysFixed) {
    const CollapseParams truth{0.4, 4.0 / 3, 0.0};
    RandomStream rng(7, 0);
    const auto curves = planted_curves(truth, {32, 64, 128}, grid(0.3, 0.5, 0.02), 0.01, rng);
    CollapseBounds b;
    b.p_c = {0.35, 0.45};
    b.nu = {4.0 / 3, 4.0 / 3};
    CollapseOptions o;
    o.bootstrap = 20;
    const auto r = optimize_collapse(curves, b, o);
    EXPECT_EQ(r.params.nu, 4.0 / 3);
    EXPECT_EQ(r.params.beta, 0.0);
    EXPECT_EQ(r.interval[1][0], r.interval[1][1]);
}

TEST(Collapse, OptimumOnBoundIsFlagged) {
    const CollapseParams truth{0.4, 4.0 / 3, 0.0};
    RandomStream rng(8, 0);
    const auto curves = planted_curves(truth, {32, 64, 128}, grid(0.3, 0.5, 0.02), 0.01, rng);
    CollapseBounds b;
    b.p_c = {0.35, 0.45};
    b.nu = {0.5, 0.7};
    CollapseOptions o;
    o.bootstrap = 0;
    const auto r = optimize_collapse(curves, b, o);
    EXPECT_FALSE(r.converged);
    ASSERT_FALSE(r.on_bound.empty());
    EXPECT_EQ(r.on_bound[0], "nu");
}

TEST(Collapse, RescaleDropsZeroErrorPoints) {
    ScalingCurve a = line(8, 1.0);
    a.points[0].dy = 0.0;
    const auto pts = rescale({a, line(16, 2.0)}, {0.4, 1.0, 0.0});
    EXPECT_EQ(pts.size(), 2 * a.points.size() - 1);
}

TEST(SweepCsv, RoundTripThroughAnalysisReader) {
    RunConfig c;
    c.engine = Engine::Cluster;
    c.sizes = {8, 16};
    c.p_grid = {0.3, 0.4, 0.5};
    c.n_traj = 30;
    const auto r = run_sweep(c);
    std::stringstream s;
    r.write_csv(s);
    const auto curves = read_sweep_curves(s, "tripartite");
    ASSERT_EQ(curves.size(), 2u);
    for (const auto &curve : curves) {
        ASSERT_EQ(curve.points.size(), 3u);
        for (const auto &pt : curve.points) {
            const auto &e = r.at(curve.L, pt.p).summary.values.at("tripartite");
            EXPECT_EQ(pt.y, e.mean);
            EXPECT_EQ(pt.dy, e.std_error);
        }
    }
}

TEST(SweepCsv, MalformedInputs) {
    const std::string header = "dimension,L,p,sweeps,n_traj,observable,mean,stderr,sampling_mode,seed\n";
    auto read = [](const std::string &text) {
        std::istringstream in(text);
        return read_sweep_curves(in, "abs_U");
    };
    EXPECT_THROW(read(""), AnalysisError);
    EXPECT_THROW(read("L,p,mean\n"), AnalysisError);
    EXPECT_THROW(read(header + "1,8,0.5,32,10,abs_U,0.5\n"), AnalysisError);
    EXPECT_THROW(read(header + "1,8,zero,32,10,abs_U,0.5,0.1,final,1\n"), AnalysisError);
    EXPECT_THROW(read(header + "1,8,0.5,32,10,tripartite,0.5,0.1,final,1\n"), AnalysisError);
    EXPECT_THROW(read(header + "1,8,0.5,32,10,abs_U,0.5,0.1,final,1\n2,8,0.6,32,10,abs_U,0.5,0.1,final,1\n"),
                 AnalysisError);
    EXPECT_EQ(read(header + "1,8,0.5,32,10,abs_U,0.5,0.1,final,1\n").size(), 1u);
}

TEST(SweepCsv, WindowAndRescaledOutput) {
    const auto curves = restrict_window({line(8, 1.0), line(16, 2.0)}, 0.35, 0.45);
    for (const auto &c : curves) {
        EXPECT_EQ(c.points.front().p, 0.36);
        EXPECT_NEAR(c.points.back().p, 0.44, 1e-12);
    }
    std::ostringstream out;
    write_rescaled_csv(out, rescale(curves, {0.4, 1.0, 0.0}));
    EXPECT_EQ(out.str().substr(0, out.str().find('\n')), "L,p,x,y,dy");
}

}  // namespace
}  // namespace z2circ
