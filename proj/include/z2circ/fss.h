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

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace z2circ {

struct CurvePoint {
    double p = 0.0;
    double y = 0.0;
    double dy = 0.0;
};

/// One observable at one system size. p must be strictly increasing.
struct ScalingCurve {
    int L = 0;
    std::vector<CurvePoint> points;

    void validate() const;
};

class AnalysisError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class NoCrossingError : public AnalysisError {
  public:
    using AnalysisError::AnalysisError;
};

/// Local cubic (4-point Lagrange) interpolation of a curve at p.
double interpolate(const ScalingCurve &curve, double p);

enum class CrossingDirection : std::uint8_t {
    Any,      ///< first sign change of y_large - y_small
    Rising,   ///< the larger size overtakes the smaller one
    Falling,  ///< the larger size drops below the smaller one
};

struct CrossingOptions {
    CrossingDirection direction = CrossingDirection::Any;
    std::optional<double> p_min;
    std::optional<double> p_max;
    int bootstrap = 200;
    std::uint64_t seed = 1;
};

struct PairCrossing {
    int L_small = 0;
    int L_large = 0;
    double p = 0.0;
};

struct CrossingResult {
    /// Mean over the pairs that cross.
    double p_c = 0.0;
    /// Standard deviation of p_c over Gaussian resamples of the curve points.
    double error = 0.0;
    /// Standard deviation of the pairwise crossings.
    double spread = 0.0;
    std::vector<PairCrossing> pairs;
    std::size_t num_pairs = 0;
    std::size_t bootstrap_used = 0;

    bool all_pairs_cross() const { return pairs.size() == num_pairs; }
    nlohmann::json to_json() const;
};

/// Crossing of y_large - y_small for one pair, or nothing.
std::optional<double> pair_crossing(const ScalingCurve &small, const ScalingCurve &large, const CrossingOptions &options);

/// Throws NoCrossingError if no pair crosses in the window.
CrossingResult find_crossing(const std::vector<ScalingCurve> &curves, const CrossingOptions &options = {});

struct CollapseParams {
    double p_c = 0.0;
    double nu = 1.0;
    double beta = 0.0;
};

struct RescaledPoint {
    int L = 0;
    double p = 0.0;
    double x = 0.0;
    double y = 0.0;
    double dy = 0.0;
};

/// x = (p - p_c) L^(1/nu), y -> y L^(beta/nu). Points with dy <= 0 are dropped.
std::vector<RescaledPoint> rescale(const std::vector<ScalingCurve> &curves, const CollapseParams &params);

/// Mean over points of (y - Y)^2 / (dy^2 + dY^2), where Y +- dY is a
/// weighted straight-line fit through up to three points on each side taken
/// from the other curves. Points outside the other curves' range are skipped.
/// About 1 for a good collapse of data with correct error bars.
double collapse_quality(const std::vector<ScalingCurve> &curves, const CollapseParams &params);

struct CollapseBounds {
    /// A parameter with lo == hi is held fixed.
    std::array<double, 2> p_c{0.0, 1.0};
    std::array<double, 2> nu{0.5, 3.0};
    std::array<double, 2> beta{0.0, 0.0};
};

struct CollapseOptions {
    int grid = 11;  ///< grid points per free parameter
    int bootstrap = 200;
    double confidence = 0.95;  ///< joint over the free parameters (Bonferroni)
    std::uint64_t seed = 1;
};

struct CollapseResult {
    CollapseParams params;
    double quality = 0.0;
    std::size_t num_points = 0;
    /// [lo, hi] per parameter (p_c, nu, beta); fixed parameters get [v, v].
    std::array<std::array<double, 2>, 3> interval{};
    std::array<double, 3> bootstrap_std{};
    int bootstrap = 0;
    double confidence = 0.95;
    bool converged = true;
    /// Parameters whose optimum sits on a bound.
    std::vector<std::string> on_bound;

    bool contains(const CollapseParams &truth) const;
    nlohmann::json to_json() const;
};

/// Grid search then Nelder-Mead refinement of collapse_quality; Gaussian
/// parametric bootstrap for the intervals.
CollapseResult optimize_collapse(const std::vector<ScalingCurve> &curves, const CollapseBounds &bounds,
                                 const CollapseOptions &options = {});

/// Curves of one observable from a sweep CSV, one per L, sorted by L.
/// Throws AnalysisError on a malformed file.
std::vector<ScalingCurve> read_sweep_curves(std::istream &in, const std::string &observable);

/// Keeps points with p in [p_min, p_max].
std::vector<ScalingCurve> restrict_window(const std::vector<ScalingCurve> &curves, double p_min, double p_max);

/// Columns: L,p,x,y,dy
void write_rescaled_csv(std::ostream &out, const std::vector<RescaledPoint> &points);

}  // namespace z2circ
