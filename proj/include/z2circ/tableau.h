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

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "z2circ/cluster_state.h"
#include "z2circ/lattice.h"
#include "z2circ/schedule.h"
#include "z2circ/tape.h"

namespace z2circ {

/// Bit-packed Pauli string with a sign. A qubit with both bits set is Y.
struct PauliString {
    std::size_t num_qubits = 0;
    std::vector<std::uint64_t> xs;
    std::vector<std::uint64_t> zs;
    bool negative = false;

    explicit PauliString(std::size_t n = 0);
    static PauliString x(std::size_t n, Site i);
    static PauliString z(std::size_t n, Site i);
    static PauliString zz(std::size_t n, Site i, Site j);
    static PauliString x_product(std::size_t n, std::span<const Site> sites);

    bool x_bit(Site i) const { return (xs[i >> 6] >> (i & 63)) & 1; }
    bool z_bit(Site i) const { return (zs[i >> 6] >> (i & 63)) & 1; }
    void set_x(Site i, bool v);
    void set_z(Site i, bool v);

    /// e.g. "+XZ_Y"
    std::string str() const;
    bool operator==(const PauliString &) const = default;
};

/// Stabilizer tableau of an n-qubit pure state: n commuting, independent
/// generators with signs. No destabilizers are kept; deterministic
/// measurement outcomes are found by GF(2) elimination.
class Tableau {
  public:
    Tableau(std::size_t n, InitialState initial);

    std::size_t num_qubits() const { return n_; }
    PauliString generator(std::size_t k) const;
    void set_generator(std::size_t k, const PauliString &p);

    /// Projective measurement of a Hermitian Pauli (X_i or Z_i Z_j in this
    /// circuit, any Pauli in general).
    int measure(const PauliString &p, OutcomeChannel &channel);
    /// X on one qubit: flips the sign of every generator with a Z or Y there.
    void apply_x(Site site);

    /// +1 / -1 if +-p is in the stabilizer group, 0 otherwise (= <p>).
    int expectation(const PauliString &p) const;

    /// Entanglement entropy of `region` in bits: rank of the generators
    /// restricted to the region minus |region|.
    int entropy(std::span<const Site> region) const;

    /// GF(2) rank of the 2n-column generator matrix.
    std::size_t rank() const;
    bool generators_commute() const;

    /// Reads off the background + GHZ structure. Throws std::logic_error if
    /// the state is not of that form.
    CanonicalState extract_partition() const;

    /// One schedule event, same outcome/coin order as ClusterState::site_update.
    void site_update(const Lattice &lattice, const Event &event, OutcomeChannel &channel);

  private:
    struct Echelon;
    Echelon echelon() const;
    std::optional<int> sign_in(const Echelon &ech, const PauliString &p) const;

    std::uint64_t *row_x(std::size_t k) { return xs_.data() + k * words_; }
    std::uint64_t *row_z(std::size_t k) { return zs_.data() + k * words_; }
    const std::uint64_t *row_x(std::size_t k) const { return xs_.data() + k * words_; }
    const std::uint64_t *row_z(std::size_t k) const { return zs_.data() + k * words_; }
    bool anticommutes(std::size_t k, const PauliString &p) const;
    /// row h <- row h * row a (rows must commute)
    void multiply_row(std::size_t h, std::size_t a);

    std::size_t n_;
    std::size_t words_;
    std::vector<std::uint64_t> xs_;
    std::vector<std::uint64_t> zs_;
    std::vector<std::uint8_t> signs_;
};

/// Replays the schedule through a tableau.
void run(Tableau &tableau, const Lattice &lattice, const Schedule &schedule, OutcomeChannel &channel);

/// GF(2) rank of bit rows (each row `words` words long). Destroys the input.
std::size_t gf2_rank(std::vector<std::uint64_t> &rows, std::size_t num_rows, std::size_t words);

}  // namespace z2circ
