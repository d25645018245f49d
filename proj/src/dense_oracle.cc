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

#include "z2circ/dense_oracle.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "z2circ/mvc.h"

namespace z2circ::dense {

namespace {

using Complex = std::complex<double>;

std::size_t dim_of(int n) {
    if (n < 1 || n > kMaxQubits) {
        throw std::invalid_argument("dense oracle supports 1.." + std::to_string(kMaxQubits) + " qubits");
    }
    return std::size_t{1} << n;
}

void check_site(int n, Site i) {
    if (static_cast<int>(i) >= n) {
        throw std::out_of_range("qubit index out of range");
    }
}

Matrix identity(int n) { return Matrix::Identity(static_cast<Eigen::Index>(dim_of(n)), static_cast<Eigen::Index>(dim_of(n))); }

}  // namespace

NeighborTable ring_neighbors(int n) {
    NeighborTable table(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        table[i] = {static_cast<Site>((i + n - 1) % n), static_cast<Site>((i + 1) % n)};
    }
    return table;
}

NeighborTable lattice_neighbors(const Lattice &lattice) {
    NeighborTable table(lattice.num_sites());
    for (Site s = 0; s < lattice.num_sites(); ++s) {
        const auto nb = lattice.neighbors(s);
        table[s].assign(nb.begin(), nb.end());
    }
    return table;
}

Matrix pauli_x(int n, Site i) {
    check_site(n, i);
    const auto dim = dim_of(n);
    Matrix m = Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (std::size_t b = 0; b < dim; ++b) {
        m(static_cast<Eigen::Index>(b ^ (std::size_t{1} << i)), static_cast<Eigen::Index>(b)) = 1.0;
    }
    return m;
}

Matrix pauli_z(int n, Site i) {
    check_site(n, i);
    const auto dim = dim_of(n);
    Matrix m = Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (std::size_t b = 0; b < dim; ++b) {
        m(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(b)) = ((b >> i) & 1) ? -1.0 : 1.0;
    }
    return m;
}

Matrix basis_projector(int n, std::uint32_t index) {
    const auto dim = dim_of(n);
    Matrix m = Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    m(index, index) = 1.0;
    return m;
}

KrausSet kraus_X(int n, Site i) {
    const Matrix id = identity(n);
    const Matrix x = pauli_x(n, i);
    return {(id + x) / 2.0, (id - x) / 2.0};
}

KrausSet kraus_F(int n, Site i, const NeighborTable &neighbors) {
    check_site(n, i);
    const auto &nbs = neighbors.at(i);
    const int degree = static_cast<int>(nbs.size());
    const Matrix id = identity(n);
    const Matrix x = pauli_x(n, i);
    const Matrix zi = pauli_z(n, i);
    KrausSet out;
    for (unsigned pattern = 0; pattern < (1u << degree); ++pattern) {
        Matrix projector = id;
        int minus = 0;
        for (int k = 0; k < degree; ++k) {
            const double a = ((pattern >> k) & 1) ? -1.0 : 1.0;
            minus += a < 0;
            projector = projector * ((id + a * zi * pauli_z(n, nbs[k])) / 2.0);
        }
        if (2 * minus > degree) {
            out.push_back(x * projector);
        } else if (2 * minus < degree) {
            out.push_back(projector);
        } else {
            out.push_back(x * projector / std::sqrt(2.0));
            out.push_back(projector / std::sqrt(2.0));
        }
    }
    return out;
}

KrausSet kraus_T(int n, Site i) {
    check_site(n, i);
    const auto dim = dim_of(n);
    KrausSet out;
    for (std::size_t a = 0; a < 2; ++a) {
        for (std::size_t b = 0; b < 2; ++b) {
            // |a><b| on qubit i, identity elsewhere.
            Matrix k = Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
            for (std::size_t col = 0; col < dim; ++col) {
                if (((col >> i) & 1) != b) {
                    continue;
                }
                const std::size_t row = (col & ~(std::size_t{1} << i)) | (a << i);
                k(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) = 1.0 / std::sqrt(2.0);
            }
            out.push_back(std::move(k));
        }
    }
    return out;
}

KrausSet kraus_D_site(int n, Site i) {
    const Matrix id = identity(n);
    const Matrix z = pauli_z(n, i);
    return {(id + z) / 2.0, (id - z) / 2.0};
}

Matrix apply_channel(const KrausSet &kraus, const Matrix &rho) {
    Matrix out = Matrix::Zero(rho.rows(), rho.cols());
    for (const auto &k : kraus) {
        out.noalias() += k * rho * k.adjoint();
    }
    return out;
}

double completeness_error(const KrausSet &kraus) {
    Matrix sum = Matrix::Zero(kraus.front().rows(), kraus.front().cols());
    for (const auto &k : kraus) {
        sum.noalias() += k.adjoint() * k;
    }
    sum -= Matrix::Identity(sum.rows(), sum.cols());
    return sum.cwiseAbs().maxCoeff();
}

int num_qubits(const Matrix &rho) {
    if (rho.rows() != rho.cols() || rho.rows() < 2) {
        throw std::invalid_argument("density matrix must be square with dimension >= 2");
    }
    int n = 0;
    while ((Eigen::Index{1} << n) < rho.rows()) {
        ++n;
    }
    if ((Eigen::Index{1} << n) != rho.rows() || n > kMaxQubits) {
        throw std::invalid_argument("density matrix dimension must be 2^n with n <= 6");
    }
    return n;
}

Matrix channel_X(const Matrix &rho, Site i) { return apply_channel(kraus_X(num_qubits(rho), i), rho); }

Matrix channel_F(const Matrix &rho, Site i, const NeighborTable &neighbors) {
    return apply_channel(kraus_F(num_qubits(rho), i, neighbors), rho);
}

Matrix channel_T(const Matrix &rho, Site i) { return apply_channel(kraus_T(num_qubits(rho), i), rho); }

Matrix channel_D(const Matrix &rho) {
    const int n = num_qubits(rho);
    Matrix out = rho;
    for (int i = 0; i < n; ++i) {
        out = apply_channel(kraus_D_site(n, static_cast<Site>(i)), out);
    }
    return out;
}

double trace_norm(const Matrix &a) {
    const Matrix h = (a + a.adjoint()) / 2.0;
    Eigen::SelfAdjointEigenSolver<Matrix> solver(h, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().cwiseAbs().sum();
}

void check_density_matrix(const Matrix &rho) {
    num_qubits(rho);
    if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-12) {
        throw std::domain_error("density matrix is not Hermitian");
    }
    if (std::abs(rho.trace() - Complex(1.0, 0.0)) > 1e-12) {
        throw std::domain_error("density matrix trace is not 1");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> solver(rho, Eigen::EigenvaluesOnly);
    if (solver.eigenvalues().minCoeff() < -1e-10) {
        throw std::domain_error("density matrix has a negative eigenvalue");
    }
}

Matrix random_density_matrix(int n, RandomStream &rng) {
    const auto dim = static_cast<Eigen::Index>(dim_of(n));
    std::normal_distribution<double> normal;
    // Columns index the environment copy; rho = M M^dagger is its partial trace.
    Matrix m(dim, dim);
    for (Eigen::Index r = 0; r < dim; ++r) {
        for (Eigen::Index c = 0; c < dim; ++c) {
            const double re = normal(rng);
            const double im = normal(rng);
            m(r, c) = Complex(re, im);
        }
    }
    Matrix rho = m * m.adjoint();
    rho /= rho.trace().real();
    return (rho + rho.adjoint()) / 2.0;
}

Matrix pure_product_state(int n, RandomStream &rng) {
    std::normal_distribution<double> normal;
    Eigen::VectorXcd psi = Eigen::VectorXcd::Ones(1);
    for (int q = 0; q < n; ++q) {
        Eigen::Vector2cd local;
        for (int k = 0; k < 2; ++k) {
            const double re = normal(rng);
            const double im = normal(rng);
            local(k) = Complex(re, im);
        }
        local.normalize();
        // Qubit q is bit q: the new qubit is the most significant so far.
        Eigen::VectorXcd next(psi.size() * 2);
        next << psi * local(0), psi * local(1);
        psi = next;
    }
    return psi * psi.adjoint();
}

bool RelationReport::passed() const {
    return max_xd_minus_dt < tolerance && max_df_minus_fd < tolerance && max_d_idempotence < tolerance &&
           max_completeness < 1e-12 && max_single_site_vs_half < tolerance;
}

RelationReport verify_relations(const NeighborTable &neighbors, int trials, std::uint64_t seed) {
    const int n = static_cast<int>(neighbors.size());
    dim_of(n);
    RelationReport report;
    report.n = n;
    report.trials = trials;
    std::vector<KrausSet> kx, kf, kt;
    KrausSet kd;
    for (int i = 0; i < n; ++i) {
        const auto s = static_cast<Site>(i);
        kx.push_back(kraus_X(n, s));
        kf.push_back(kraus_F(n, s, neighbors));
        kt.push_back(kraus_T(n, s));
        const auto d = kraus_D_site(n, s);
        for (const KrausSet *set : std::initializer_list<const KrausSet *>{&kx.back(), &kf.back(), &kt.back(), &d}) {
            report.max_completeness = std::max(report.max_completeness, completeness_error(*set));
        }
    }
    auto dephase = [&](const Matrix &rho) {
        Matrix out = rho;
        for (int i = 0; i < n; ++i) {
            out = apply_channel(kraus_D_site(n, static_cast<Site>(i)), out);
        }
        return out;
    };
    RandomStream rng(seed, 0);
    const int extra = std::max(1, trials / 4);
    for (int t = 0; t < trials + extra; ++t) {
        // `trials` mixed inputs, then some pure product inputs.
        const Matrix rho = t < trials ? random_density_matrix(n, rng) : pure_product_state(n, rng);
        const Matrix d_rho = dephase(rho);
        report.max_d_idempotence = std::max(report.max_d_idempotence, trace_norm(dephase(d_rho) - d_rho));
        for (int i = 0; i < n; ++i) {
            const Matrix xd = apply_channel(kx[i], d_rho);
            const Matrix dt = dephase(apply_channel(kt[i], rho));
            report.max_xd_minus_dt = std::max(report.max_xd_minus_dt, trace_norm(xd - dt));
            if (n == 1) {
                const Matrix half = Matrix::Identity(2, 2) / 2.0;
                report.max_single_site_vs_half =
                    std::max({report.max_single_site_vs_half, trace_norm(xd - half), trace_norm(dt - half)});
            }
            const Matrix df = dephase(apply_channel(kf[i], rho));
            const Matrix fd = apply_channel(kf[i], d_rho);
            report.max_df_minus_fd = std::max(report.max_df_minus_fd, trace_norm(df - fd));
        }
    }
    return report;
}

bool ReductionReport::passed() const {
    return max_distance_fixed < tolerance && max_distance_averaged < tolerance &&
           max_classical_offdiagonal < tolerance && max_diagonal_vs_mvc < tolerance;
}

ReductionReport verify_reduction(int n, double p, int sweeps, int trials, std::uint64_t seed) {
    if (n > kMaxQubits) {
        throw std::invalid_argument("dense reduction check is limited to 6 qubits");
    }
    const Lattice lattice(1, n);
    const auto neighbors = lattice_neighbors(lattice);
    ReductionReport report;
    report.n = n;
    report.p = p;
    report.sweeps = sweeps;
    report.trials = trials;

    std::vector<KrausSet> kx, kf, kt;
    for (int i = 0; i < n; ++i) {
        kx.push_back(kraus_X(n, static_cast<Site>(i)));
        kf.push_back(kraus_F(n, static_cast<Site>(i), neighbors));
        kt.push_back(kraus_T(n, static_cast<Site>(i)));
    }
    const Matrix rho0 = basis_projector(n, 0);

    auto offdiagonal = [](const Matrix &rho) {
        Matrix off = rho;
        off.diagonal().setZero();
        return off.cwiseAbs().maxCoeff();
    };
    auto diagonal_gap = [](const Matrix &rho, const std::vector<double> &dist) {
        double gap = 0.0;
        for (std::size_t k = 0; k < dist.size(); ++k) {
            gap = std::max(gap, std::abs(rho(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)) - Complex(dist[k], 0.0)));
        }
        return gap;
    };

    for (int t = 0; t < trials; ++t) {
        const auto schedule = generate_schedule(
            lattice, p, static_cast<std::size_t>(sweeps), trajectory_stream(seed, static_cast<std::uint64_t>(t), Lane::Schedule));
        Matrix rho_q = rho0;
        Matrix rho_c = rho0;
        for (const Event &e : schedule.events) {
            if (e.kind == EventKind::BondRound) {
                rho_q = apply_channel(kf[e.site], rho_q);
                rho_c = apply_channel(kf[e.site], rho_c);
            } else {
                rho_q = apply_channel(kx[e.site], rho_q);
                rho_c = apply_channel(kt[e.site], rho_c);
            }
        }
        report.max_distance_fixed = std::max(report.max_distance_fixed, trace_norm(rho_q - rho_c));
        report.max_classical_offdiagonal = std::max(report.max_classical_offdiagonal, offdiagonal(rho_c));
        report.max_diagonal_vs_mvc =
            std::max(report.max_diagonal_vs_mvc, diagonal_gap(rho_c, evolve_distribution(lattice, schedule, 0)));
    }

    // Average over schedules: each site update is the p-mixture of the two channels.
    Matrix rho_q = rho0;
    Matrix rho_c = rho0;
    for (int t = 0; t < sweeps; ++t) {
        for (int i = 0; i < n; ++i) {
            const Matrix fq = apply_channel(kf[i], rho_q);
            const Matrix fc = apply_channel(kf[i], rho_c);
            rho_q = p * fq + (1.0 - p) * apply_channel(kx[i], rho_q);
            rho_c = p * fc + (1.0 - p) * apply_channel(kt[i], rho_c);
        }
    }
    report.max_distance_averaged = trace_norm(rho_q - rho_c);
    report.max_classical_offdiagonal = std::max(report.max_classical_offdiagonal, offdiagonal(rho_c));
    report.max_diagonal_vs_mvc = std::max(
        report.max_diagonal_vs_mvc,
        diagonal_gap(rho_c, evolve_distribution_averaged(lattice, p, static_cast<std::size_t>(sweeps), 0)));
    return report;
}

}  // namespace z2circ::dense
