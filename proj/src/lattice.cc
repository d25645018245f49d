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

#include "z2circ/lattice.h"

#include <algorithm>
#include <stdexcept>

namespace z2circ {

Lattice::Lattice(int dimension, int linear_size) : dimension_(dimension), linear_size_(linear_size) {
    if (dimension != 1 && dimension != 2) {
        throw std::invalid_argument("lattice dimension must be 1 or 2, got " + std::to_string(dimension));
    }
    const int min_size = dimension == 1 ? 4 : 3;
    if (linear_size < min_size) {
        throw std::invalid_argument(
            "linear size " + std::to_string(linear_size) + " too small for a " + std::to_string(dimension) +
            "d periodic lattice (minimum " + std::to_string(min_size) + ")");
    }
    const auto L = static_cast<Site>(linear_size);
    if (dimension == 1) {
        num_sites_ = L;
        neighbors_.reserve(2 * L);
        for (Site i = 0; i < L; ++i) {
            neighbors_.push_back((i + L - 1) % L);
            neighbors_.push_back((i + 1) % L);
        }
    } else {
        num_sites_ = static_cast<std::size_t>(L) * L;
        neighbors_.reserve(4 * num_sites_);
        for (Site y = 0; y < L; ++y) {
            for (Site x = 0; x < L; ++x) {
                neighbors_.push_back(y * L + (x + L - 1) % L);
                neighbors_.push_back(y * L + (x + 1) % L);
                neighbors_.push_back(((y + L - 1) % L) * L + x);
                neighbors_.push_back(((y + 1) % L) * L + x);
            }
        }
    }
}

bool Lattice::are_neighbors(Site a, Site b) const {
    if (a >= num_sites_ || b >= num_sites_) {
        return false;
    }
    auto nb = neighbors(a);
    return std::find(nb.begin(), nb.end(), b) != nb.end();
}

std::vector<std::pair<Site, Site>> Lattice::bonds() const {
    std::vector<std::pair<Site, Site>> out;
    for (Site i = 0; i < num_sites_; ++i) {
        for (Site j : neighbors(i)) {
            if (i < j) {
                out.emplace_back(i, j);
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

Site Lattice::antipode_of_origin() const {
    const auto half = static_cast<Site>(linear_size_ / 2);
    return dimension_ == 1 ? half : half * static_cast<Site>(linear_size_) + half;
}

std::string Lattice::describe() const {
    return std::to_string(dimension_) + "d periodic " +
           (dimension_ == 1 ? "ring" : "torus") + " L=" + std::to_string(linear_size_);
}

RegionPartition quarter_partition(const Lattice &lattice) {
    const int L = lattice.linear_size();
    if (L % 4 != 0) {
        throw std::invalid_argument("quarter partition needs L divisible by 4, got L=" + std::to_string(L));
    }
    RegionPartition part;
    part.region_of.resize(lattice.num_sites());
    const int quarter = L / 4;
    for (Site s = 0; s < lattice.num_sites(); ++s) {
        const int column = static_cast<int>(s % static_cast<Site>(L));
        const auto r = static_cast<std::uint8_t>(column / quarter);
        part.region_of[s] = r;
        part.regions[r].push_back(s);
    }
    part.geometry = lattice.dimension() == 1 ? "ring-quarters" : "column-slabs";
    return part;
}

}  // namespace z2circ
