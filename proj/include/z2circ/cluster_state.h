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

#include "z2circ/lattice.h"
#include "z2circ/schedule.h"
#include "z2circ/tape.h"

namespace z2circ {

/// Engine-independent description of a background + GHZ state, used to
/// compare engines exactly. Clusters are labelled by their smallest site and
/// relative bits are taken with respect to that site.
struct CanonicalState {
    std::vector<std::int8_t> z;       ///< +-1 on background sites, 0 on cluster members
    std::vector<std::int32_t> label;  ///< -1 on background sites, else smallest site of the cluster
    std::vector<std::uint8_t> bit;    ///< relative bit w.r.t. the label site (0 on background)
    std::vector<std::int8_t> sign;    ///< cluster sign on members, 0 on background

    bool operator==(const CanonicalState &) const = default;

    /// Same background set and cluster partition; signs and bit values ignored.
    bool same_partition(const CanonicalState &other) const;
    /// First difference, for error messages. Empty when equal.
    std::string first_difference(const CanonicalState &other) const;
};

/// Product of Z-eigenstates on background sites and GHZ-like clusters
/// (|s> + sigma |s-bar>)/sqrt(2). A size-1 cluster is the X eigenstate with
/// eigenvalue sigma.
///
/// Every cluster's first member carries relative bit 0. The lattice must
/// outlive the state.
class ClusterState {
  public:
    static constexpr std::int32_t kBackground = -1;

    ClusterState(const Lattice &lattice, InitialState initial);
    /// Inverse of canonical(); the lattice must match the state's size.
    static ClusterState from_canonical(const Lattice &lattice, const CanonicalState &canonical);

    const Lattice &lattice() const { return *lattice_; }
    std::size_t num_sites() const { return cluster_.size(); }

    bool is_background(Site s) const { return cluster_[s] == kBackground; }
    /// Z eigenvalue of a background site.
    int z(Site s) const { return z_[s]; }
    std::int32_t cluster_of(Site s) const { return cluster_[s]; }
    std::uint8_t relative_bit(Site s) const { return bit_[s]; }

    /// Cluster ids index [0, cluster_capacity()); freed ids have no members.
    std::size_t cluster_capacity() const { return clusters_.size(); }
    std::span<const Site> members(std::int32_t id) const { return clusters_[id].members; }
    int sign(std::int32_t id) const { return clusters_[id].sign; }
    std::size_t num_clusters() const { return live_clusters_; }
    std::size_t num_background() const { return background_count_; }

    int measure_x(Site site, OutcomeChannel &channel);
    /// Requires i and j to be lattice neighbors.
    int measure_bond(Site i, Site j, OutcomeChannel &channel);
    void apply_x(Site site);
    /// One schedule event: X measurement, or all bonds at the site followed by
    /// majority feedback (tie: flip on a fair coin).
    void site_update(const Event &event, OutcomeChannel &channel);

    /// Deterministic value of Z_i Z_j if the state is an eigenstate of it.
    std::optional<int> bond_value(Site i, Site j) const;

    CanonicalState canonical() const;
    std::string to_json() const;

    /// Throws std::logic_error if tags and registry disagree.
    void check_integrity() const;

  private:
    struct Cluster {
        std::vector<Site> members;
        std::int8_t sign = +1;
    };

    explicit ClusterState(const Lattice &lattice);
    std::int32_t make_singleton(Site site, int sign);
    void remove_member(std::int32_t id, Site site);
    void free_cluster(std::int32_t id);
    void flip_all_bits(std::int32_t id);

    const Lattice *lattice_;
    std::vector<std::int32_t> cluster_;
    std::vector<std::int8_t> z_;
    std::vector<std::uint8_t> bit_;
    std::vector<std::uint32_t> pos_;
    std::vector<Cluster> clusters_;
    std::vector<std::int32_t> free_ids_;
    std::size_t live_clusters_ = 0;
    std::size_t background_count_ = 0;
};

/// Evolves the state through every event of the schedule.
void run(ClusterState &state, const Schedule &schedule, OutcomeChannel &channel);

/// Runs the cluster engine from `initial` and records the full outcome tape.
OutcomeTape record_outcomes(const Lattice &lattice, const Schedule &schedule, InitialState initial, RandomStream dynamics);

}  // namespace z2circ
