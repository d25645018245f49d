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

#include "z2circ/cluster_state.h"

#include <algorithm>
#include <stdexcept>

#include "json.hpp"

namespace z2circ {

bool CanonicalState::same_partition(const CanonicalState &other) const { return label == other.label; }

std::string CanonicalState::first_difference(const CanonicalState &other) const {
    if (label.size() != other.label.size()) {
        return "site counts differ";
    }
    for (std::size_t s = 0; s < label.size(); ++s) {
        if (label[s] != other.label[s]) {
            return "site " + std::to_string(s) + ": cluster label " + std::to_string(label[s]) + " vs " +
                   std::to_string(other.label[s]);
        }
        if (z[s] != other.z[s]) {
            return "site " + std::to_string(s) + ": z " + std::to_string(z[s]) + " vs " + std::to_string(other.z[s]);
        }
        if (bit[s] != other.bit[s]) {
            return "site " + std::to_string(s) + ": relative bit differs";
        }
        if (sign[s] != other.sign[s]) {
            return "site " + std::to_string(s) + ": cluster sign " + std::to_string(sign[s]) + " vs " +
                   std::to_string(other.sign[s]);
        }
    }
    return {};
}

ClusterState::ClusterState(const Lattice &lattice)
    : lattice_(&lattice),
      cluster_(lattice.num_sites(), kBackground),
      z_(lattice.num_sites(), +1),
      bit_(lattice.num_sites(), 0),
      pos_(lattice.num_sites(), 0) {
    clusters_.reserve(lattice.num_sites());
}

ClusterState::ClusterState(const Lattice &lattice, InitialState initial) : ClusterState(lattice) {
    background_count_ = num_sites();
    if (initial == InitialState::AllPlus) {
        for (Site s = 0; s < num_sites(); ++s) {
            make_singleton(s, +1);
        }
        background_count_ = 0;
    }
}

ClusterState ClusterState::from_canonical(const Lattice &lattice, const CanonicalState &c) {
    const auto n = lattice.num_sites();
    if (c.z.size() != n || c.label.size() != n || c.bit.size() != n || c.sign.size() != n) {
        throw std::invalid_argument("canonical state does not match lattice size");
    }
    ClusterState st(lattice);
    std::vector<std::int32_t> id_of_label(n, kBackground);
    for (Site s = 0; s < n; ++s) {
        if (c.label[s] < 0) {
            if (c.z[s] != 1 && c.z[s] != -1) {
                throw std::invalid_argument("background site needs z = +-1");
            }
            st.z_[s] = c.z[s];
            ++st.background_count_;
            continue;
        }
        const auto lbl = static_cast<Site>(c.label[s]);
        if (lbl > s || c.label[lbl] != static_cast<std::int32_t>(lbl)) {
            throw std::invalid_argument("cluster label must be the smallest member site");
        }
        if (id_of_label[lbl] == kBackground) {
            id_of_label[lbl] = st.make_singleton(s, c.sign[s]);
            if (c.bit[s] != 0) {
                throw std::invalid_argument("label site must carry relative bit 0");
            }
            continue;
        }
        const auto id = id_of_label[lbl];
        auto &cl = st.clusters_[id];
        if (cl.sign != c.sign[s]) {
            throw std::invalid_argument("inconsistent cluster sign");
        }
        st.cluster_[s] = id;
        st.bit_[s] = c.bit[s] & 1;
        st.pos_[s] = static_cast<std::uint32_t>(cl.members.size());
        cl.members.push_back(s);
    }
    return st;
}

std::int32_t ClusterState::make_singleton(Site site, int sign) {
    std::int32_t id;
    if (!free_ids_.empty()) {
        id = free_ids_.back();
        free_ids_.pop_back();
    } else {
        id = static_cast<std::int32_t>(clusters_.size());
        clusters_.emplace_back();
    }
    auto &cl = clusters_[id];
    cl.members.clear();
    cl.members.push_back(site);
    cl.sign = static_cast<std::int8_t>(sign);
    cluster_[site] = id;
    bit_[site] = 0;
    pos_[site] = 0;
    ++live_clusters_;
    return id;
}

void ClusterState::free_cluster(std::int32_t id) {
    clusters_[id].members.clear();
    free_ids_.push_back(id);
    --live_clusters_;
}

void ClusterState::flip_all_bits(std::int32_t id) {
    for (Site s : clusters_[id].members) {
        bit_[s] ^= 1;
    }
}

void ClusterState::remove_member(std::int32_t id, Site site) {
    auto &members = clusters_[id].members;
    const auto idx = pos_[site];
    const Site last = members.back();
    members[idx] = last;
    pos_[last] = idx;
    members.pop_back();
    // The representative moved; restore the gauge.
    if (idx == 0 && !members.empty() && bit_[members[0]] != 0) {
        flip_all_bits(id);
    }
}

int ClusterState::measure_x(Site site, OutcomeChannel &channel) {
    const auto id = cluster_[site];
    if (id == kBackground) {
        const int m = channel.random_outcome();
        make_singleton(site, m);
        --background_count_;
        return m;
    }
    if (clusters_[id].members.size() == 1) {
        const int m = clusters_[id].sign;
        channel.deterministic_outcome(m);
        return m;
    }
    // Split: the measured site leaves as |x_m>, the remainder keeps its
    // pattern with sign sigma * m.
    const int m = channel.random_outcome();
    remove_member(id, site);
    clusters_[id].sign = static_cast<std::int8_t>(clusters_[id].sign * m);
    make_singleton(site, m);
    return m;
}

int ClusterState::measure_bond(Site i, Site j, OutcomeChannel &channel) {
    if (i == j || !lattice_->are_neighbors(i, j)) {
        throw std::invalid_argument(
            "measure_bond needs two neighboring sites, got " + std::to_string(i) + "," + std::to_string(j));
    }
    const auto ci = cluster_[i];
    const auto cj = cluster_[j];
    if (ci == kBackground && cj == kBackground) {
        const int v = z_[i] * z_[j];
        channel.deterministic_outcome(v);
        return v;
    }
    if (ci == cj) {
        const int v = (bit_[i] ^ bit_[j]) ? -1 : +1;
        channel.deterministic_outcome(v);
        return v;
    }
    const int m = channel.random_outcome();
    if (ci == kBackground || cj == kBackground) {
        // Death: the whole cluster collapses onto Z eigenstates.
        const Site bg = ci == kBackground ? i : j;
        const Site member = ci == kBackground ? j : i;
        const auto id = cluster_[member];
        const int z_member = m * z_[bg];
        const auto ref_bit = bit_[member];
        auto &members = clusters_[id].members;
        for (Site s : members) {
            z_[s] = static_cast<std::int8_t>((bit_[s] ^ ref_bit) ? -z_member : z_member);
            cluster_[s] = kBackground;
            bit_[s] = 0;
        }
        background_count_ += members.size();
        free_cluster(id);
        return m;
    }
    // Merge the smaller cluster into the larger one, flipping its bits when
    // needed so that (-1)^(r_i + r_j) = m.
    const bool flip = ((bit_[i] ^ bit_[j]) ? -1 : +1) != m;
    auto big = ci;
    auto small = cj;
    if (clusters_[big].members.size() < clusters_[small].members.size()) {
        std::swap(big, small);
    }
    auto &big_members = clusters_[big].members;
    for (Site s : clusters_[small].members) {
        bit_[s] ^= static_cast<std::uint8_t>(flip);
        cluster_[s] = big;
        pos_[s] = static_cast<std::uint32_t>(big_members.size());
        big_members.push_back(s);
    }
    clusters_[big].sign = static_cast<std::int8_t>(clusters_[big].sign * clusters_[small].sign);
    free_cluster(small);
    return m;
}

void ClusterState::apply_x(Site site) {
    const auto id = cluster_[site];
    if (id == kBackground) {
        z_[site] = static_cast<std::int8_t>(-z_[site]);
        return;
    }
    bit_[site] ^= 1;
    if (pos_[site] == 0) {
        flip_all_bits(id);
    }
}

void ClusterState::site_update(const Event &event, OutcomeChannel &channel) {
    if (event.kind == EventKind::MeasureX) {
        measure_x(event.site, channel);
        return;
    }
    int minus = 0;
    const auto nbs = lattice_->neighbors(event.site);
    for (Site nb : nbs) {
        if (measure_bond(event.site, nb, channel) < 0) {
            ++minus;
        }
    }
    const int degree = static_cast<int>(nbs.size());
    if (2 * minus > degree || (2 * minus == degree && channel.coin())) {
        apply_x(event.site);
    }
}

std::optional<int> ClusterState::bond_value(Site i, Site j) const {
    if (cluster_[i] == kBackground && cluster_[j] == kBackground) {
        return z_[i] * z_[j];
    }
    if (cluster_[i] == cluster_[j]) {
        return (bit_[i] ^ bit_[j]) ? -1 : +1;
    }
    return std::nullopt;
}

CanonicalState ClusterState::canonical() const {
    const auto n = num_sites();
    CanonicalState c;
    c.z.assign(n, 0);
    c.label.assign(n, -1);
    c.bit.assign(n, 0);
    c.sign.assign(n, 0);
    for (Site s = 0; s < n; ++s) {
        if (cluster_[s] == kBackground) {
            c.z[s] = z_[s];
        }
    }
    for (const auto &cl : clusters_) {
        if (cl.members.empty()) {
            continue;
        }
        const Site lowest = *std::min_element(cl.members.begin(), cl.members.end());
        for (Site s : cl.members) {
            c.label[s] = static_cast<std::int32_t>(lowest);
            c.bit[s] = bit_[s] ^ bit_[lowest];
            c.sign[s] = cl.sign;
        }
    }
    return c;
}

std::string ClusterState::to_json() const {
    nlohmann::json j;
    j["dimension"] = lattice_->dimension();
    j["L"] = lattice_->linear_size();
    auto &bg = j["background"] = nlohmann::json::object();
    for (Site s = 0; s < num_sites(); ++s) {
        if (cluster_[s] == kBackground) {
            bg[std::to_string(s)] = z_[s];
        }
    }
    const auto canon = canonical();
    auto &clusters = j["clusters"] = nlohmann::json::array();
    for (Site s = 0; s < num_sites(); ++s) {
        if (canon.label[s] != static_cast<std::int32_t>(s)) {
            continue;
        }
        nlohmann::json cl;
        cl["sign"] = canon.sign[s];
        auto &members = cl["members"] = nlohmann::json::array();
        std::string pattern;
        for (Site t = s; t < num_sites(); ++t) {
            if (canon.label[t] == static_cast<std::int32_t>(s)) {
                members.push_back(t);
                pattern.push_back(canon.bit[t] ? '1' : '0');
            }
        }
        cl["pattern"] = pattern;
        clusters.push_back(std::move(cl));
    }
    return j.dump();
}

void ClusterState::check_integrity() const {
    const auto n = num_sites();
    std::size_t members_total = 0;
    std::size_t live = 0;
    for (std::size_t id = 0; id < clusters_.size(); ++id) {
        const auto &cl = clusters_[id];
        if (cl.members.empty()) {
            continue;
        }
        ++live;
        if (cl.sign != 1 && cl.sign != -1) {
            throw std::logic_error("cluster " + std::to_string(id) + " has invalid sign");
        }
        if (bit_[cl.members[0]] != 0) {
            throw std::logic_error("cluster " + std::to_string(id) + " representative has relative bit 1");
        }
        for (std::size_t k = 0; k < cl.members.size(); ++k) {
            const Site s = cl.members[k];
            if (s >= n || cluster_[s] != static_cast<std::int32_t>(id) || pos_[s] != k) {
                throw std::logic_error("cluster " + std::to_string(id) + " member list disagrees with site tags");
            }
        }
        members_total += cl.members.size();
    }
    std::size_t bg = 0;
    for (Site s = 0; s < n; ++s) {
        const auto id = cluster_[s];
        if (id == kBackground) {
            ++bg;
            if (z_[s] != 1 && z_[s] != -1) {
                throw std::logic_error("background site " + std::to_string(s) + " has invalid z");
            }
        } else if (id < 0 || static_cast<std::size_t>(id) >= clusters_.size() || clusters_[id].members.empty()) {
            throw std::logic_error("site " + std::to_string(s) + " tagged with a dead cluster");
        }
    }
    if (live != live_clusters_ || bg != background_count_ || bg + members_total != n) {
        throw std::logic_error("cluster bookkeeping counts are inconsistent");
    }
}

void run(ClusterState &state, const Schedule &schedule, OutcomeChannel &channel) {
    check_schedule(schedule, state.lattice());
    for (const Event &e : schedule.events) {
        state.site_update(e, channel);
    }
#ifndef NDEBUG
    state.check_integrity();
#endif
}

OutcomeTape record_outcomes(const Lattice &lattice, const Schedule &schedule, InitialState initial, RandomStream dynamics) {
    OutcomeTape tape;
    tape.schedule = schedule;
    tape.initial = initial;
    ClusterState state(lattice, initial);
    auto channel = OutcomeChannel::sample(dynamics);
    channel.record_into(&tape.records);
    run(state, schedule, channel);
    return tape;
}

}  // namespace z2circ
