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

#include <sstream>

#include "z2circ/ensemble.h"

namespace z2circ {
namespace {

RunConfig small_config(Engine engine, int dim, std::vector<int> sizes, std::vector<double> ps, std::size_t traj) {
    RunConfig c;
    c.engine = engine;
    c.dimension = dim;
    c.sizes = std::move(sizes);
    c.p_grid = std::move(ps);
    c.n_traj = traj;
    c.seed = 5;
    c.workers = 1;
    return c;
}

std::string csv_of(const SweepResult &r) {
    std::ostringstream os;
    r.write_csv(os);
    return os.str();
}

TEST(Ensemble, ZeroProbabilityHasUnitSymmetryExpectation) {
    const auto r = run_sweep(small_config(Engine::Cluster, 1, {64}, {0.0}, 100));
    const auto &e = r.at(64, 0.0).summary.values.at("abs_U");
    EXPECT_EQ(e.mean, 1.0);
    EXPECT_EQ(e.std_error, 0.0);
    EXPECT_EQ(e.count, 100u);
}

TEST(Ensemble, FullProbabilityKeepsMagnetization) {
    const auto r = run_sweep(small_config(Engine::Cluster, 1, {64}, {1.0}, 50));
    const auto &e = r.at(64, 1.0).summary.values.at("abs_M");
    EXPECT_EQ(e.mean, 1.0);
    EXPECT_EQ(e.std_error, 0.0);
}

TEST(Ensemble, DeepPhaseSymmetryStep) {
    const auto r = run_sweep(small_config(Engine::Cluster, 1, {128}, {0.3}, 200));
    EXPECT_GT(r.at(128, 0.3).summary.values.at("abs_U").mean, 0.99);
}

TEST(Ensemble, WorkerCountDoesNotChangeResults) {
    for (Engine engine : {Engine::Cluster, Engine::Mvc, Engine::Percolation}) {
        auto c = small_config(engine, 2, {8}, {0.5, 0.85}, 40);
        c.workers = 1;
        const auto one = csv_of(run_sweep(c));
        c.workers = 8;
        EXPECT_EQ(csv_of(run_sweep(c)), one) << to_string(engine);
    }
}

TEST(Ensemble, TimeAverageSampling) {
    auto c = small_config(Engine::Cluster, 1, {16}, {0.5}, 40);
    c.sampling = SamplingMode::TimeAverage;
    c.burn_in = 8;
    c.stride = 4;
    const auto r = run_sweep(c);
    EXPECT_NE(csv_of(r).find("time-average"), std::string::npos);
    c.burn_in = 1000;
    EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Ensemble, PercolationAgreesWithClusterOnSymmetryStep) {
    // Same schedules: the percolation background flag equals |<U>| = 0 per trajectory.
    const auto a = run_sweep(small_config(Engine::Cluster, 1, {32}, {0.4}, 200));
    const auto b = run_sweep(small_config(Engine::Percolation, 1, {32}, {0.4}, 200));
    EXPECT_EQ(a.at(32, 0.4).summary.values.at("abs_U").mean, b.at(32, 0.4).summary.values.at("abs_U").mean);
    EXPECT_EQ(a.at(32, 0.4).summary.values.at("tripartite").mean, b.at(32, 0.4).summary.values.at("tripartite").mean);
}

TEST(Ensemble, StandardErrorShrinksWithMoreTrajectories) {
    const auto a = run_sweep(small_config(Engine::Cluster, 1, {32}, {0.4}, 1000));
    const auto b = run_sweep(small_config(Engine::Cluster, 1, {32}, {0.4}, 2000));
    const double ratio =
        b.at(32, 0.4).summary.values.at("abs_U").std_error / a.at(32, 0.4).summary.values.at("abs_U").std_error;
    EXPECT_NEAR(ratio, 1 / std::sqrt(2.0), 0.2 / std::sqrt(2.0));
}

TEST(Ensemble, PointSeedsAreDistinct) {
    EXPECT_NE(point_seed(1, 1, 32, 0.4), point_seed(1, 1, 64, 0.4));
    EXPECT_NE(point_seed(1, 1, 32, 0.4), point_seed(1, 1, 32, 0.42));
    EXPECT_NE(point_seed(1, 1, 32, 0.4), point_seed(1, 2, 32, 0.4));
    EXPECT_NE(point_seed(1, 1, 32, 0.4), point_seed(2, 1, 32, 0.4));
    EXPECT_EQ(point_seed(1, 1, 32, 0.4), point_seed(1, 1, 32, 0.4));
}

TEST(RunConfigJson, RoundTripAndHash) {
    auto c = small_config(Engine::Mvc, 2, {12, 16}, {0.8, 0.9}, 10);
    c.sweeps = 40;
    const auto back = RunConfig::from_json(c.to_json());
    EXPECT_EQ(back.to_json(), c.to_json());
    EXPECT_EQ(back.hash(), c.hash());
    auto other = c;
    other.workers = 4;
    other.output = "elsewhere";
    EXPECT_EQ(other.hash(), c.hash());
    other.seed = 6;
    EXPECT_NE(other.hash(), c.hash());
}

TEST(RunConfigJson, GridForms) {
    const auto c = RunConfig::from_json(nlohmann::json::parse(R"({"L": 8, "p": {"start": 0.3, "stop": 0.5, "step": 0.1}})"));
    EXPECT_EQ(c.sizes, (std::vector<int>{8}));
    EXPECT_EQ(c.p_grid, (std::vector<double>{0.3, 0.4, 0.5}));
    const auto d = RunConfig::from_json(nlohmann::json::parse(R"({"L": [8, 16], "p": 0.25})"));
    EXPECT_EQ(d.p_grid, (std::vector<double>{0.25}));
    EXPECT_EQ(d.sweeps_for(16), 64u);
}

TEST(RunConfigJson, Rejections) {
    EXPECT_THROW(RunConfig::from_json(nlohmann::json::parse(R"({"bogus": 1})")), ConfigError);
    EXPECT_THROW(RunConfig::from_json(nlohmann::json::parse(R"({"L": "x"})")), ConfigError);
    EXPECT_THROW(RunConfig::from_json(nlohmann::json::parse(R"({"engine": "warp"})")), std::invalid_argument);
    auto c = small_config(Engine::Cluster, 1, {10}, {0.5}, 10);
    EXPECT_THROW(c.validate(), ConfigError);
    c.sizes = {8};
    c.p_grid = {1.5};
    EXPECT_THROW(c.validate(), ConfigError);
    c.p_grid = {0.5};
    c.n_traj = 0;
    EXPECT_THROW(c.validate(), ConfigError);
    c.n_traj = 1;
    c.dimension = 3;
    EXPECT_THROW(c.validate(), ConfigError);
    auto m = small_config(Engine::Mvc, 1, {10}, {0.5}, 10);
    EXPECT_NO_THROW(m.validate());
}

TEST(SweepResultCsv, HeaderAndRows) {
    const auto r = run_sweep(small_config(Engine::Mvc, 1, {8}, {0.5}, 10));
    std::istringstream in(csv_of(r));
    std::string header;
    std::getline(in, header);
    EXPECT_EQ(header, "dimension,L,p,sweeps,n_traj,observable,mean,stderr,sampling_mode,seed");
    std::string line;
    int rows = 0;
    while (std::getline(in, line)) {
        ++rows;
    }
    EXPECT_EQ(rows, static_cast<int>(r.points[0].summary.values.size()));
    EXPECT_EQ(r.metadata()["schema_version"], kSweepSchemaVersion);
}

TEST(Convergence, FixedPointConvergesImmediately) {
    auto c = small_config(Engine::Cluster, 1, {16}, {1.0}, 50);
    const auto rep = convergence_check(c);
    EXPECT_FALSE(rep.base_flagged());
    EXPECT_EQ(rep.converged_multiplier, 1u);
}

TEST(Convergence, SingleSweepIsFlagged) {
    auto c = small_config(Engine::Cluster, 1, {64}, {0.407}, 400);
    c.sweeps = 1;
    const auto rep = convergence_check(c);
    EXPECT_TRUE(rep.base_flagged());
    EXPECT_NE(rep.to_json().dump().find("flagged"), std::string::npos);
}

}  // namespace
}  // namespace z2circ
