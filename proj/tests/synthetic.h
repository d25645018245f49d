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

// Planted finite-size-scaling data for the collapse and crossing tests.
#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "z2circ/fss.h"
#include "z2circ/random.h"

namespace z2circ::testing {

/// Smooth master curve with a kink-free crossover around x = 0.
inline double master_curve(double x) { return 0.3 + 0.5 * (1.0 + std::tanh(0.8 * x)); }

/// y = L^{-beta/nu} f((p - p_c) L^{1/nu}), with Gaussian noise of the given
/// absolute size (0 for exact data). Every point reports dy = noise, or
/// `floor_dy` for exact data.
inline std::vector<ScalingCurve> planted_curves(const CollapseParams &truth, const std::vector<int> &sizes,
                                                const std::vector<double> &p_grid, double noise, RandomStream &rng,
                                                double floor_dy = 1e-3) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<ScalingCurve> curves;
    for (int L : sizes) {
        ScalingCurve c;
        c.L = L;
        for (double p : p_grid) {
            const double x = (p - truth.p_c) * std::pow(L, 1.0 / truth.nu);
            double y = std::pow(L, -truth.beta / truth.nu) * master_curve(x);
            if (noise > 0) {
                y += noise * gauss(rng);
            }
            c.points.push_back({p, y, noise > 0 ? noise : floor_dy});
        }
        curves.push_back(std::move(c));
    }
    return curves;
}

inline std::vector<double> grid(double lo, double hi, double step) {
    std::vector<double> out;
    const int n = static_cast<int>(std::lround((hi - lo) / step));
    for (int k = 0; k <= n; ++k) {
        out.push_back(lo + k * step);
    }
    return out;
}

}  // namespace z2circ::testing
