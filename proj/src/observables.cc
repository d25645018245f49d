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

#include "z2circ/observables.h"

#include <cmath>
#include <stdexcept>

namespace z2circ {

namespace {

/// Bitmask of the regions a cluster touches, per live cluster.
std::vector<std::uint8_t> region_masks(const ClusterState &state, const RegionPartition &partition) {
    if (partition.region_of.size() != state.num_sites()) {
        throw std::invalid_argument("region partition does not match lattice");
    }
    std::vector<std::uint8_t> masks;
    masks.reserve(state.num_clusters());
    for (std::size_t id = 0; id < state.cluster_capacity(); ++id) {
        const auto members = state.members(static_cast<std::int32_t>(id));
        if (members.empty()) {
            continue;
        }
        std::uint8_t mask = 0;
        for (Site s : members) {
            mask |= static_cast<std::uint8_t>(1u << partition.region_of[s]);
            if (mask == 0xF) {
                break;
            }
        }
        masks.push_back(mask);
    }
    return masks;
}

}  // namespace

int entropy(const ClusterState &state, std::span<const std::uint8_t> in_region) {
    if (in_region.size() != state.num_sites()) {
        throw std::invalid_argument("region mask does not match lattice");
    }
    int count = 0;
    for (std::size_t id = 0; id < state.cluster_capacity(); ++id) {
        bool inside = false;
        bool outside = false;
        for (Site s : state.members(static_cast<std::int32_t>(id))) {
            (in_region[s] ? inside : outside) = true;
            if (inside && outside) {
                ++count;
                break;
            }
        }
    }
    return count;
}

int entropy(const ClusterState &state, std::span<const Site> region) {
    std::vector<std::uint8_t> mask(state.num_sites(), 0);
    for (Site s : region) {
        mask.at(s) = 1;
    }
    return entropy(state, mask);
}

int tripartite_information(const ClusterState &state, const RegionPartition &partition) {
    const auto masks = region_masks(state, partition);
    // Entropy of a union of regions: clusters cut by its boundary.
    auto S = [&](std::uint8_t regions) {
        int count = 0;
        for (auto m : masks) {
            if ((m & regions) != 0 && (m & ~regions & 0xF) != 0) {
                ++count;
            }
        }
        return count;
    };
    constexpr std::uint8_t A = 1, B = 2, C = 4;
    return S(A) + S(B) + S(C) + S(A | B | C) - S(A | B) - S(B | C) - S(A | C);
}

int clusters_spanning_all_regions(const ClusterState &state, const RegionPartition &partition) {
    int count = 0;
    for (auto m : region_masks(state, partition)) {
        count += m == 0xF;
    }
    return count;
}

int expectation_U(const ClusterState &state) {
    if (state.num_background() > 0) {
        return 0;
    }
    int u = 1;
    for (std::size_t id = 0; id < state.cluster_capacity(); ++id) {
        if (!state.members(static_cast<std::int32_t>(id)).empty()) {
            u *= state.sign(static_cast<std::int32_t>(id));
        }
    }
    return u;
}

int magnetization(const ClusterState &state) {
    int m = 0;
    for (Site s = 0; s < state.num_sites(); ++s) {
        if (state.is_background(s)) {
            m += state.z(s);
        }
    }
    return m;
}

int zz_correlator(const ClusterState &state, Site i, Site j) { return state.bond_value(i, j).value_or(0); }

int tripartite_information(const Tableau &tableau, const RegionPartition &p) {
    auto S = [&](std::initializer_list<int> regions) {
        std::vector<Site> sites;
        for (int r : regions) {
            sites.insert(sites.end(), p.regions[r].begin(), p.regions[r].end());
        }
        return tableau.entropy(sites);
    };
    return S({0}) + S({1}) + S({2}) + S({0, 1, 2}) - S({0, 1}) - S({1, 2}) - S({0, 2});
}

int expectation_U(const Tableau &tableau) {
    std::vector<Site> all(tableau.num_qubits());
    for (Site s = 0; s < all.size(); ++s) {
        all[s] = s;
    }
    return tableau.expectation(PauliString::x_product(tableau.num_qubits(), all));
}

int magnetization(const Tableau &tableau) {
    int m = 0;
    for (Site s = 0; s < tableau.num_qubits(); ++s) {
        m += tableau.expectation(PauliString::z(tableau.num_qubits(), s));
    }
    return m;
}

int zz_correlator(const Tableau &tableau, Site i, Site j) {
    return tableau.expectation(PauliString::zz(tableau.num_qubits(), i, j));
}

TrajectoryObservables measure_all(const ClusterState &state, const RegionPartition &partition) {
    TrajectoryObservables obs;
    obs.tripartite_I = tripartite_information(state, partition);
    obs.U_sign = expectation_U(state);
    obs.abs_U = std::abs(obs.U_sign);
    obs.magnetization = magnetization(state);
    obs.zz_half = zz_correlator(state, 0, state.lattice().antipode_of_origin());
    obs.background_fraction = static_cast<double>(state.num_background()) / static_cast<double>(state.num_sites());
    return obs;
}

TrajectoryObservables measure_all(const Tableau &tableau, const Lattice &lattice, const RegionPartition &partition) {
    TrajectoryObservables obs;
    obs.tripartite_I = tripartite_information(tableau, partition);
    obs.U_sign = expectation_U(tableau);
    obs.abs_U = std::abs(obs.U_sign);
    obs.magnetization = magnetization(tableau);
    obs.zz_half = zz_correlator(tableau, 0, lattice.antipode_of_origin());
    std::size_t background = 0;
    for (Site s = 0; s < tableau.num_qubits(); ++s) {
        background += tableau.expectation(PauliString::z(tableau.num_qubits(), s)) != 0;
    }
    obs.background_fraction = static_cast<double>(background) / static_cast<double>(tableau.num_qubits());
    return obs;
}

void RunningStat::add(double x) {
    ++n_;
    const double delta = x - mean_;
    mean_ += delta / static_cast<double>(n_);
    m2_ += delta * (x - mean_);
}

void RunningStat::merge(const RunningStat &o) {
    if (o.n_ == 0) {
        return;
    }
    if (n_ == 0) {
        *this = o;
        return;
    }
    const double total = static_cast<double>(n_ + o.n_);
    const double delta = o.mean_ - mean_;
    mean_ += delta * static_cast<double>(o.n_) / total;
    m2_ += o.m2_ + delta * delta * static_cast<double>(n_) * static_cast<double>(o.n_) / total;
    n_ += o.n_;
}

double RunningStat::variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }

Estimate RunningStat::estimate() const {
    return {mean_, n_ > 1 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0, n_};
}

ObservableRecord to_record(const TrajectoryObservables &obs) {
    return {
        {"abs_U", obs.abs_U},
        {"U", obs.U_sign},
        {"tripartite", obs.tripartite_I},
        {"abs_M", std::abs(obs.magnetization)},
        {"M", obs.magnetization},
        {"zz", obs.zz_half},
        {"zz_sq", obs.zz_half * obs.zz_half},
        {"background_fraction", obs.background_fraction},
    };
}

EnsembleSummary ensemble_reduce(std::span<const ObservableRecord> records, double per_site_norm) {
    std::map<std::string, RunningStat> stats;
    for (const auto &record : records) {
        for (const auto &[name, value] : record) {
            const bool magnetic = name == "abs_M" || name == "M";
            stats[name].add(magnetic ? value / per_site_norm : value);
        }
    }
    EnsembleSummary out;
    for (const auto &[name, stat] : stats) {
        out.values[name] = stat.estimate();
    }
    return out;
}

}  // namespace z2circ
