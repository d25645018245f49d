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
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "z2circ/lattice.h"
#include "z2circ/random.h"
#include "z2circ/schedule.h"

namespace z2circ::dense {

using Matrix = Eigen::MatrixXcd;
using KrausSet = std::vector<Matrix>;
using NeighborTable = std::vector<std::vector<Site>>;

/// Qubit k is bit k of the computational-basis index; bit value 1 is |1>
/// (Z = -1).
inline constexpr int kMaxQubits = 6;

/// Neighbors ((i - 1) mod n, (i + 1) mod n). For n = 1 and n = 2 the bonds
/// coincide (Z_i Z_i = I for the self-loop), which keeps every channel
/// well defined on tiny rings.
NeighborTable ring_neighbors(int n);
NeighborTable lattice_neighbors(const Lattice &lattice);

Matrix pauli_x(int n, Site i);
Matrix pauli_z(int n, Site i);
Matrix basis_projector(int n, std::uint32_t index);

/// Measure X_i and forget the outcome.
KrausSet kraus_X(int n, Site i);
/// Measure every Z_i Z_j around i, then X_i on a -1 majority, nothing on a
/// +1 majority, X_i with probability 1/2 on a tie.
KrausSet kraus_F(int n, Site i, const NeighborTable &neighbors);
/// Reset qubit i to the maximally mixed classical bit.
KrausSet kraus_T(int n, Site i);
/// Z-basis dephasing of one qubit.
KrausSet kraus_D_site(int n, Site i);

Matrix apply_channel(const KrausSet &kraus, const Matrix &rho);
/// max |sum_K K^dagger K - I|
double completeness_error(const KrausSet &kraus);

Matrix channel_X(const Matrix &rho, Site i);
Matrix channel_F(const Matrix &rho, Site i, const NeighborTable &neighbors);
Matrix channel_T(const Matrix &rho, Site i);
/// Full dephasing, the product of kraus_D_site over all qubits.
Matrix channel_D(const Matrix &rho);

int num_qubits(const Matrix &rho);
/// Sum of |eigenvalues| of the Hermitian part.
double trace_norm(const Matrix &a);
/// Throws std::domain_error unless Hermitian (1e-12), unit trace (1e-12),
/// and eigenvalues >= -1e-10.
void check_density_matrix(const Matrix &rho);

/// Partial trace of a Haar-random pure state on n + n qubits.
Matrix random_density_matrix(int n, RandomStream &rng);
Matrix pure_product_state(int n, RandomStream &rng);

struct RelationReport {
    int n = 0;
    int trials = 0;
    double max_xd_minus_dt = 0.0;  ///< || X_i D - D T_i || (trace norm)
    double max_df_minus_fd = 0.0;  ///< || D F_i - F_i D ||
    double max_d_idempotence = 0.0;
    double max_completeness = 0.0;
    /// n = 1 only: || X D rho - I/2 || and || D T rho - I/2 ||.
    double max_single_site_vs_half = 0.0;
    double tolerance = 1e-10;
    bool passed() const;
};

/// Checks both commutation relations on `trials` random mixed states for
/// every site of the given neighbor structure, then on a few pure product
/// states.
RelationReport verify_relations(const NeighborTable &neighbors, int trials, std::uint64_t seed);

struct ReductionReport {
    int n = 0;
    double p = 0.0;
    int sweeps = 0;
    int trials = 0;
    /// Schedule fixed, outcomes averaged.
    double max_distance_fixed = 0.0;
    /// Schedules and outcomes averaged.
    double max_distance_averaged = 0.0;
    /// Largest off-diagonal entry of the classical density matrix.
    double max_classical_offdiagonal = 0.0;
    /// Classical diagonal vs. the majority-vote probability vector.
    double max_diagonal_vs_mvc = 0.0;
    double tolerance = 1e-9;
    bool passed() const;
};

/// Evolves |0...0> through the quantum channel string (X / F per schedule
/// event) and the classical string (T / F) on a 1d ring of n sites.
ReductionReport verify_reduction(int n, double p, int sweeps, int trials, std::uint64_t seed);

}  // namespace z2circ::dense
