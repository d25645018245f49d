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

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace z2circ {

using Site = std::uint32_t;

/// Periodic chain (dimension 1) or periodic square lattice (dimension 2).
///
/// Sites are indexed in raster order, `site = y * L + x`. The neighbor list of
/// every site is ordered (left, right) in 1d and (left, right, up, down) in 2d;
/// this order fixes the canonical bond-measurement order used by every engine.
class Lattice {
  public:
    Lattice(int dimension, int linear_size);

    int dimension() const { return dimension_; }
    int linear_size() const { return linear_size_; }
    std::size_t num_sites() const { return num_sites_; }
    int coordination() const { return dimension_ == 1 ? 2 : 4; }

    std::span<const Site> neighbors(Site site) const {
        return {neighbors_.data() + site * coordination(), static_cast<std::size_t>(coordination())};
    }
    bool are_neighbors(Site a, Site b) const;

    /// All bonds (i, j) with i < j, sorted.
    std::vector<std::pair<Site, Site>> bonds() const;

    /// The site at maximal distance from site 0: L/2 in 1d, (L/2, L/2) in 2d.
    Site antipode_of_origin() const;

    std::string describe() const;

  private:
    int dimension_;
    int linear_size_;
    std::size_t num_sites_;
    std::vector<Site> neighbors_;
};

/// Four disjoint contiguous regions A, B, C, D covering the lattice.
struct RegionPartition {
    std::array<std::vector<Site>, 4> regions;
    /// region_of[site] in {0, 1, 2, 3}.
    std::vector<std::uint8_t> region_of;
    std::string geometry;
};

/// Quarters of the ring (1d) or column slabs of the torus (2d), in cyclic
/// order A, B, C, D. Requires L divisible by 4.
RegionPartition quarter_partition(const Lattice &lattice);

}  // namespace z2circ
