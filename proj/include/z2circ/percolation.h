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
#include <vector>

#include "z2circ/cluster_state.h"
#include "z2circ/lattice.h"
#include "z2circ/schedule.h"

namespace z2circ {

/// Space-time connectivity of the circuit. Every site owns a current node;
/// measuring X cuts the temporal bond (fresh node), a bond round joins the
/// site's node with its neighbors' nodes. From all-zero the nodes of the
/// t = 0 slice are flagged, and the flag propagates through unions.
class SpaceTimeForest {
  public:
    explicit SpaceTimeForest(const Lattice &lattice, InitialState initial = InitialState::AllZero);

    void ingest(const Event &event);
    void ingest(const Schedule &schedule);

    /// Background sites are connected to the initial slice; the remaining
    /// sites are grouped by connectivity. Signs and z values are left at 0 /
    /// +1 placeholders: only `label` (and the background set) is meaningful.
    CanonicalState classify();

    std::size_t num_nodes() const { return parent_.size(); }
    std::size_t num_x_measurements() const { return x_measurements_; }

  private:
    std::uint32_t find(std::uint32_t node);
    void unite(std::uint32_t a, std::uint32_t b);
    std::uint32_t fresh_node();

    const Lattice *lattice_;
    std::vector<std::uint32_t> parent_;
    std::vector<std::uint8_t> rank_;
    std::vector<std::uint8_t> initial_;  ///< on roots: set contains an initial-slice node
    std::vector<std::uint32_t> current_;
    std::size_t x_measurements_ = 0;
};

struct PercolationObservables {
    bool has_background = false;
    double background_fraction = 0.0;
    /// Largest cluster not connected to the initial slice, over N.
    double largest_cluster_fraction = 0.0;
};

PercolationObservables percolation_observables(const CanonicalState &classified);

}  // namespace z2circ
