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

#include "z2circ/tableau.h"

#include <algorithm>
#include <bit>
#include <map>
#include <stdexcept>

namespace z2circ {

namespace {

std::size_t words_for(std::size_t bits) { return (bits + 63) / 64; }

/// Exponent of i picked up by the product P1 * P2 (Y = iXZ convention),
/// summed over qubits.
int product_phase(const std::uint64_t *x1, const std::uint64_t *z1, const std::uint64_t *x2, const std::uint64_t *z2,
                  std::size_t words) {
    int total = 0;
    for (std::size_t w = 0; w < words; ++w) {
        const auto a = x1[w], b = z1[w], c = x2[w], d = z2[w];
        const auto plus = (a & ~b & c & d) | (a & b & ~c & d) | (~a & b & c & ~d);
        const auto minus = (a & ~b & ~c & d) | (a & b & c & ~d) | (~a & b & c & d);
        total += std::popcount(plus) - std::popcount(minus);
    }
    return total;
}

int mod4(int e) { return ((e % 4) + 4) % 4; }

}  // namespace

PauliString::PauliString(std::size_t n) : num_qubits(n), xs(words_for(n), 0), zs(words_for(n), 0) {}

void PauliString::set_x(Site i, bool v) {
    const auto mask = std::uint64_t{1} << (i & 63);
    xs[i >> 6] = v ? (xs[i >> 6] | mask) : (xs[i >> 6] & ~mask);
}

void PauliString::set_z(Site i, bool v) {
    const auto mask = std::uint64_t{1} << (i & 63);
    zs[i >> 6] = v ? (zs[i >> 6] | mask) : (zs[i >> 6] & ~mask);
}

PauliString PauliString::x(std::size_t n, Site i) {
    PauliString p(n);
    p.set_x(i, true);
    return p;
}

PauliString PauliString::z(std::size_t n, Site i) {
    PauliString p(n);
    p.set_z(i, true);
    return p;
}

PauliString PauliString::zz(std::size_t n, Site i, Site j) {
    PauliString p(n);
    p.set_z(i, true);
    p.set_z(j, !p.z_bit(j));
    return p;
}

PauliString PauliString::x_product(std::size_t n, std::span<const Site> sites) {
    PauliString p(n);
    for (Site s : sites) {
        p.set_x(s, !p.x_bit(s));
    }
    return p;
}

std::string PauliString::str() const {
    std::string out(1, negative ? '-' : '+');
    for (Site i = 0; i < num_qubits; ++i) {
        out.push_back("_XZY"[x_bit(i) + 2 * z_bit(i)]);
    }
    return out;
}

struct Tableau::Echelon {
    Tableau rows;
    std::vector<std::size_t> pivot_cols;
};

Tableau::Tableau(std::size_t n, InitialState initial)
    : n_(n), words_(words_for(n)), xs_(n * words_for(n), 0), zs_(n * words_for(n), 0), signs_(n, 0) {
    if (n == 0) {
        throw std::invalid_argument("tableau needs at least one qubit");
    }
    for (std::size_t k = 0; k < n; ++k) {
        auto *row = initial == InitialState::AllZero ? row_z(k) : row_x(k);
        row[k >> 6] |= std::uint64_t{1} << (k & 63);
    }
}

PauliString Tableau::generator(std::size_t k) const {
    PauliString p(n_);
    std::copy(row_x(k), row_x(k) + words_, p.xs.begin());
    std::copy(row_z(k), row_z(k) + words_, p.zs.begin());
    p.negative = signs_[k] != 0;
    return p;
}

void Tableau::set_generator(std::size_t k, const PauliString &p) {
    if (p.num_qubits != n_) {
        throw std::invalid_argument("Pauli string size does not match tableau");
    }
    std::copy(p.xs.begin(), p.xs.end(), row_x(k));
    std::copy(p.zs.begin(), p.zs.end(), row_z(k));
    signs_[k] = p.negative ? 1 : 0;
}

bool Tableau::anticommutes(std::size_t k, const PauliString &p) const {
    int parity = 0;
    const auto *gx = row_x(k);
    const auto *gz = row_z(k);
    for (std::size_t w = 0; w < words_; ++w) {
        parity ^= std::popcount((gx[w] & p.zs[w]) ^ (gz[w] & p.xs[w])) & 1;
    }
    return parity != 0;
}

void Tableau::multiply_row(std::size_t h, std::size_t a) {
    const int e = 2 * signs_[h] + 2 * signs_[a] + product_phase(row_x(h), row_z(h), row_x(a), row_z(a), words_);
    if (e % 2 != 0) {
        throw std::logic_error("multiplying anticommuting stabilizer rows");
    }
    signs_[h] = mod4(e) == 2 ? 1 : 0;
    for (std::size_t w = 0; w < words_; ++w) {
        row_x(h)[w] ^= row_x(a)[w];
        row_z(h)[w] ^= row_z(a)[w];
    }
}

int Tableau::measure(const PauliString &p, OutcomeChannel &channel) {
    std::size_t pivot = n_;
    for (std::size_t k = 0; k < n_; ++k) {
        if (anticommutes(k, p)) {
            pivot = k;
            break;
        }
    }
    if (pivot == n_) {
        const int v = expectation(p);
        if (v == 0) {
            throw std::logic_error("commuting Pauli outside the stabilizer group: tableau is not maximal");
        }
        channel.deterministic_outcome(v);
        return v;
    }
    const int m = channel.random_outcome();
    for (std::size_t k = pivot + 1; k < n_; ++k) {
        if (anticommutes(k, p)) {
            multiply_row(k, pivot);
        }
    }
    PauliString measured = p;
    measured.negative = (m < 0) != p.negative;
    set_generator(pivot, measured);
    return m;
}

void Tableau::apply_x(Site site) {
    const auto w = site >> 6;
    const auto mask = std::uint64_t{1} << (site & 63);
    for (std::size_t k = 0; k < n_; ++k) {
        if (row_z(k)[w] & mask) {
            signs_[k] ^= 1;
        }
    }
}

Tableau::Echelon Tableau::echelon() const {
    Echelon ech{*this, {}};
    Tableau &t = ech.rows;
    std::size_t next = 0;
    for (std::size_t col = 0; col < 2 * n_ && next < n_; ++col) {
        const bool is_z = col >= n_;
        const std::size_t q = is_z ? col - n_ : col;
        const auto w = q >> 6;
        const auto mask = std::uint64_t{1} << (q & 63);
        auto has = [&](std::size_t k) { return ((is_z ? t.row_z(k) : t.row_x(k))[w] & mask) != 0; };
        std::size_t r = next;
        while (r < n_ && !has(r)) {
            ++r;
        }
        if (r == n_) {
            continue;
        }
        if (r != next) {
            std::swap_ranges(t.row_x(r), t.row_x(r) + words_, t.row_x(next));
            std::swap_ranges(t.row_z(r), t.row_z(r) + words_, t.row_z(next));
            std::swap(t.signs_[r], t.signs_[next]);
        }
        for (std::size_t k = 0; k < n_; ++k) {
            if (k != next && has(k)) {
                t.multiply_row(k, next);
            }
        }
        ech.pivot_cols.push_back(col);
        ++next;
    }
    return ech;
}

std::optional<int> Tableau::sign_in(const Echelon &ech, const PauliString &p) const {
    const Tableau &t = ech.rows;
    PauliString residual = p;
    std::vector<std::uint64_t> acc_x(words_, 0), acc_z(words_, 0);
    int exponent = 0;
    for (std::size_t k = 0; k < ech.pivot_cols.size(); ++k) {
        const auto col = ech.pivot_cols[k];
        const bool set = col >= n_ ? residual.z_bit(static_cast<Site>(col - n_)) : residual.x_bit(static_cast<Site>(col));
        if (!set) {
            continue;
        }
        exponent += 2 * t.signs_[k] + product_phase(acc_x.data(), acc_z.data(), t.row_x(k), t.row_z(k), words_);
        for (std::size_t w = 0; w < words_; ++w) {
            acc_x[w] ^= t.row_x(k)[w];
            acc_z[w] ^= t.row_z(k)[w];
            residual.xs[w] ^= t.row_x(k)[w];
            residual.zs[w] ^= t.row_z(k)[w];
        }
    }
    for (std::size_t w = 0; w < words_; ++w) {
        if (residual.xs[w] != 0 || residual.zs[w] != 0) {
            return std::nullopt;
        }
    }
    const int e = mod4(exponent);
    if (e % 2 != 0) {
        throw std::logic_error("stabilizer product is not Hermitian");
    }
    const bool acc_negative = e == 2;
    return acc_negative == p.negative ? +1 : -1;
}

int Tableau::expectation(const PauliString &p) const {
    for (std::size_t k = 0; k < n_; ++k) {
        if (anticommutes(k, p)) {
            return 0;
        }
    }
    const auto v = sign_in(echelon(), p);
    if (!v) {
        throw std::logic_error("commuting Pauli outside the stabilizer group: tableau is not maximal");
    }
    return *v;
}

std::size_t gf2_rank(std::vector<std::uint64_t> &rows, std::size_t num_rows, std::size_t words) {
    std::size_t rank = 0;
    for (std::size_t col = 0; col < words * 64 && rank < num_rows; ++col) {
        const auto w = col >> 6;
        const auto mask = std::uint64_t{1} << (col & 63);
        std::size_t r = rank;
        while (r < num_rows && !(rows[r * words + w] & mask)) {
            ++r;
        }
        if (r == num_rows) {
            continue;
        }
        if (r != rank) {
            std::swap_ranges(rows.begin() + r * words, rows.begin() + (r + 1) * words, rows.begin() + rank * words);
        }
        for (std::size_t k = rank + 1; k < num_rows; ++k) {
            if (rows[k * words + w] & mask) {
                for (std::size_t v = 0; v < words; ++v) {
                    rows[k * words + v] ^= rows[rank * words + v];
                }
            }
        }
        ++rank;
    }
    return rank;
}

int Tableau::entropy(std::span<const Site> region) const {
    const std::size_t cols = 2 * region.size();
    const std::size_t words = std::max<std::size_t>(1, words_for(cols));
    std::vector<std::uint64_t> rows(n_ * words, 0);
    for (std::size_t k = 0; k < n_; ++k) {
        for (std::size_t a = 0; a < region.size(); ++a) {
            const Site q = region[a];
            const auto w = q >> 6;
            const auto mask = std::uint64_t{1} << (q & 63);
            if (row_x(k)[w] & mask) {
                rows[k * words + ((2 * a) >> 6)] |= std::uint64_t{1} << ((2 * a) & 63);
            }
            if (row_z(k)[w] & mask) {
                rows[k * words + ((2 * a + 1) >> 6)] |= std::uint64_t{1} << ((2 * a + 1) & 63);
            }
        }
    }
    return static_cast<int>(gf2_rank(rows, n_, words)) - static_cast<int>(region.size());
}

std::size_t Tableau::rank() const {
    const std::size_t words = 2 * words_;
    std::vector<std::uint64_t> rows(n_ * words);
    for (std::size_t k = 0; k < n_; ++k) {
        std::copy(row_x(k), row_x(k) + words_, rows.begin() + k * words);
        std::copy(row_z(k), row_z(k) + words_, rows.begin() + k * words + words_);
    }
    return gf2_rank(rows, n_, words);
}

bool Tableau::generators_commute() const {
    for (std::size_t a = 0; a < n_; ++a) {
        const auto pa = generator(a);
        for (std::size_t b = a + 1; b < n_; ++b) {
            if (anticommutes(b, pa)) {
                return false;
            }
        }
    }
    return true;
}

CanonicalState Tableau::extract_partition() const {
    const auto ech = echelon();
    const std::size_t gen_words = words_for(n_);
    CanonicalState c;
    c.z.assign(n_, 0);
    c.label.assign(n_, -1);
    c.bit.assign(n_, 0);
    c.sign.assign(n_, 0);

    // Sites whose X columns agree are joined by a stabilizer Z_i Z_j; an
    // all-zero column means Z_i itself is a stabilizer.
    std::map<std::vector<std::uint64_t>, std::vector<Site>> groups;
    for (Site q = 0; q < n_; ++q) {
        std::vector<std::uint64_t> column(gen_words, 0);
        bool any = false;
        for (std::size_t k = 0; k < n_; ++k) {
            if (row_x(k)[q >> 6] & (std::uint64_t{1} << (q & 63))) {
                column[k >> 6] |= std::uint64_t{1} << (k & 63);
                any = true;
            }
        }
        if (!any) {
            const auto v = sign_in(ech, PauliString::z(n_, q));
            if (!v) {
                throw std::logic_error("site " + std::to_string(q) + ": Z commutes with the group but is not in it");
            }
            c.z[q] = static_cast<std::int8_t>(*v);
            continue;
        }
        groups[column].push_back(q);
    }
    for (const auto &[column, sites] : groups) {
        const Site lowest = sites.front();
        const auto sigma = sign_in(ech, PauliString::x_product(n_, sites));
        if (!sigma) {
            throw std::logic_error(
                "tableau is not of background+GHZ form: no X-string stabilizer on the cluster of site " +
                std::to_string(lowest));
        }
        for (Site q : sites) {
            c.label[q] = static_cast<std::int32_t>(lowest);
            c.sign[q] = static_cast<std::int8_t>(*sigma);
            if (q != lowest) {
                const auto v = sign_in(ech, PauliString::zz(n_, lowest, q));
                if (!v) {
                    throw std::logic_error("tableau is not of background+GHZ form: missing ZZ stabilizer");
                }
                c.bit[q] = *v < 0 ? 1 : 0;
            }
        }
    }
    return c;
}

void Tableau::site_update(const Lattice &lattice, const Event &event, OutcomeChannel &channel) {
    if (event.kind == EventKind::MeasureX) {
        measure(PauliString::x(n_, event.site), channel);
        return;
    }
    int minus = 0;
    const auto nbs = lattice.neighbors(event.site);
    for (Site nb : nbs) {
        if (measure(PauliString::zz(n_, event.site, nb), channel) < 0) {
            ++minus;
        }
    }
    const int degree = static_cast<int>(nbs.size());
    if (2 * minus > degree || (2 * minus == degree && channel.coin())) {
        apply_x(event.site);
    }
}

void run(Tableau &tableau, const Lattice &lattice, const Schedule &schedule, OutcomeChannel &channel) {
    check_schedule(schedule, lattice);
    if (tableau.num_qubits() != lattice.num_sites()) {
        throw std::invalid_argument("tableau size does not match lattice");
    }
    for (const Event &e : schedule.events) {
        tableau.site_update(lattice, e, channel);
    }
}

}  // namespace z2circ
