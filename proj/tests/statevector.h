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

// Test-only dense state-vector simulator. Independent of every engine: it
// projects amplitudes directly, so it can serve as the oracle for the sign
// algebra of the cluster and tableau engines.
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "z2circ/cluster_state.h"

namespace z2circ::testing {

class StateVector {
  public:
    using Complex = std::complex<double>;

    explicit StateVector(int n) : n_(n), amp_(std::size_t{1} << n, 0.0) { amp_[0] = 1.0; }

    static StateVector all_plus(int n) {
        StateVector v(n);
        const double a = std::pow(2.0, -0.5 * n);
        for (auto &x : v.amp_) {
            x = a;
        }
        return v;
    }

    /// The background + GHZ state described by a canonical form.
    static StateVector from_canonical(const CanonicalState &c) {
        const int n = static_cast<int>(c.label.size());
        StateVector v(n);
        v.amp_.assign(v.amp_.size(), 0.0);
        // Base string s: background bits from z, cluster bits from the pattern.
        std::uint64_t s = 0;
        std::uint64_t cluster_mask = 0;
        std::vector<int> labels;
        for (int q = 0; q < n; ++q) {
            if (c.label[q] < 0) {
                if (c.z[q] < 0) {
                    s |= std::uint64_t{1} << q;
                }
            } else {
                if (c.bit[q]) {
                    s |= std::uint64_t{1} << q;
                }
                if (c.label[q] == q) {
                    labels.push_back(q);
                }
            }
        }
        // Expand the product over clusters: each cluster contributes
        // |s_C> + sigma |s_C-bar>.
        std::vector<std::pair<std::uint64_t, Complex>> terms{{s, 1.0}};
        for (int lbl : labels) {
            std::uint64_t mask = 0;
            int sigma = 1;
            for (int q = 0; q < n; ++q) {
                if (c.label[q] == lbl) {
                    mask |= std::uint64_t{1} << q;
                    sigma = c.sign[q];
                }
            }
            cluster_mask |= mask;
            std::vector<std::pair<std::uint64_t, Complex>> next;
            for (auto [b, a] : terms) {
                next.push_back({b, a / std::sqrt(2.0)});
                next.push_back({b ^ mask, a * static_cast<double>(sigma) / std::sqrt(2.0)});
            }
            terms = std::move(next);
        }
        for (auto [b, a] : terms) {
            v.amp_[b] += a;
        }
        return v;
    }

    int num_qubits() const { return n_; }

    /// Probability of outcome m for a Pauli made of X on `xs` and Z on `zs`.
    double probability(std::uint64_t x_mask, std::uint64_t z_mask, int m) const {
        const auto projected = project(x_mask, z_mask, m);
        double p = 0.0;
        for (auto a : projected) {
            p += std::norm(a);
        }
        return p;
    }

    void collapse(std::uint64_t x_mask, std::uint64_t z_mask, int m) {
        amp_ = project(x_mask, z_mask, m);
        double norm = 0.0;
        for (auto a : amp_) {
            norm += std::norm(a);
        }
        if (norm < 1e-12) {
            throw std::logic_error("collapse onto a zero-probability outcome");
        }
        for (auto &a : amp_) {
            a /= std::sqrt(norm);
        }
    }

    void apply_x(int q) {
        std::vector<Complex> out(amp_.size());
        for (std::size_t b = 0; b < amp_.size(); ++b) {
            out[b ^ (std::size_t{1} << q)] = amp_[b];
        }
        amp_ = std::move(out);
    }

    /// |<this|other>|
    double overlap(const StateVector &other) const {
        Complex s = 0.0;
        for (std::size_t b = 0; b < amp_.size(); ++b) {
            s += std::conj(amp_[b]) * other.amp_[b];
        }
        return std::abs(s);
    }

  private:
    /// (1 + m P)/2 applied to the amplitudes, P = prod X^x Z^z (no Y terms).
    std::vector<Complex> project(std::uint64_t x_mask, std::uint64_t z_mask, int m) const {
        std::vector<Complex> out(amp_.size());
        for (std::size_t b = 0; b < amp_.size(); ++b) {
            // P|b> = (-1)^{popcount(b & z)} |b ^ x>
            const double phase = (__builtin_popcountll(b & z_mask) & 1) ? -1.0 : 1.0;
            out[b] += 0.5 * amp_[b];
            out[b ^ x_mask] += 0.5 * m * phase * amp_[b];
        }
        return out;
    }

    int n_;
    std::vector<Complex> amp_;
};

}  // namespace z2circ::testing
