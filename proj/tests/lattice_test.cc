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

#include <gtest/gtest.h>

#include <set>

#include "z2circ/lattice.h"

namespace z2circ {
namespace {

TEST(Lattice, SmallestRingBonds) {
    const Lattice ring(1, 4);
    const std::vector<std::pair<Site, Site>> expected{{0, 1}, {0, 3}, {1, 2}, {2, 3}};
    EXPECT_EQ(ring.bonds(), expected);
    EXPECT_EQ(ring.num_sites(), 4u);
}

TEST(Lattice, TorusRasterNeighbors) {
    const Lattice torus(2, 3);
    auto nb = torus.neighbors(0);
    EXPECT_EQ(std::set<Site>(nb.begin(), nb.end()), (std::set<Site>{1, 2, 3, 6}));
    // left, right, up, down
    EXPECT_EQ(std::vector<Site>(nb.begin(), nb.end()), (std::vector<Site>{2, 1, 6, 3}));
}

TEST(Lattice, RejectsDegenerateSizes) {
    EXPECT_THROW(Lattice(2, 2), std::invalid_argument);
    EXPECT_THROW(Lattice(1, 3), std::invalid_argument);
    EXPECT_THROW(Lattice(3, 8), std::invalid_argument);
    EXPECT_NO_THROW(Lattice(1, 4));
    EXPECT_NO_THROW(Lattice(2, 3));
}

TEST(Lattice, NeighborRelationIsSymmetricAndDistinct) {
    for (auto [d, L] : std::vector<std::pair<int, int>>{{1, 4}, {1, 9}, {2, 3}, {2, 4}, {2, 7}}) {
        const Lattice lat(d, L);
        for (Site s = 0; s < lat.num_sites(); ++s) {
            auto nb = lat.neighbors(s);
            ASSERT_EQ(nb.size(), static_cast<std::size_t>(2 * d));
            EXPECT_EQ(std::set<Site>(nb.begin(), nb.end()).size(), nb.size()) << lat.describe() << " site " << s;
            for (Site t : nb) {
                EXPECT_NE(t, s);
                EXPECT_TRUE(lat.are_neighbors(t, s));
            }
        }
    }
}

TEST(Lattice, BondCountMatchesDegreeSum) {
    for (auto [d, L] : std::vector<std::pair<int, int>>{{1, 4}, {1, 16}, {2, 3}, {2, 8}}) {
        const Lattice lat(d, L);
        const auto bonds = lat.bonds();
        std::size_t degree_sum = 0;
        for (Site s = 0; s < lat.num_sites(); ++s) {
            degree_sum += lat.neighbors(s).size();
        }
        EXPECT_EQ(degree_sum, 2 * bonds.size());
        EXPECT_EQ(bonds.size(), d * lat.num_sites());
        const std::set<std::pair<Site, Site>> unique(bonds.begin(), bonds.end());
        EXPECT_EQ(unique.size(), bonds.size());
    }
}

TEST(Lattice, Antipode) {
    EXPECT_EQ(Lattice(1, 12).antipode_of_origin(), 6u);
    EXPECT_EQ(Lattice(2, 4).antipode_of_origin(), 2u * 4 + 2);
}

TEST(QuarterPartition, RingOfEight) {
    const auto part = quarter_partition(Lattice(1, 8));
    EXPECT_EQ(part.regions[0], (std::vector<Site>{0, 1}));
    EXPECT_EQ(part.regions[1], (std::vector<Site>{2, 3}));
    EXPECT_EQ(part.regions[2], (std::vector<Site>{4, 5}));
    EXPECT_EQ(part.regions[3], (std::vector<Site>{6, 7}));
}

TEST(QuarterPartition, TorusColumns) {
    const Lattice torus(2, 4);
    const auto part = quarter_partition(torus);
    EXPECT_EQ(part.geometry, "column-slabs");
    for (int r = 0; r < 4; ++r) {
        ASSERT_EQ(part.regions[r].size(), 4u);
        for (Site s : part.regions[r]) {
            EXPECT_EQ(static_cast<int>(s % 4), r);
        }
    }
}

TEST(QuarterPartition, RejectsIndivisible) { EXPECT_THROW(quarter_partition(Lattice(1, 6)), std::invalid_argument); }

TEST(QuarterPartition, DisjointExhaustiveAndCyclicallyAdjacent) {
    for (int L : {4, 8, 12, 32}) {
        const Lattice ring(1, L);
        const auto part = quarter_partition(ring);
        std::set<Site> all;
        for (const auto &r : part.regions) {
            ASSERT_FALSE(r.empty());
            for (Site s : r) {
                EXPECT_TRUE(all.insert(s).second);
                EXPECT_EQ(part.regions[part.region_of[s]].size(), r.size());
            }
            for (std::size_t k = 1; k < r.size(); ++k) {
                EXPECT_EQ(r[k], r[k - 1] + 1);  // contiguous arc
            }
        }
        EXPECT_EQ(all.size(), ring.num_sites());
        for (int r = 0; r < 4; ++r) {
            EXPECT_TRUE(ring.are_neighbors(part.regions[r].back(), part.regions[(r + 1) % 4].front()));
        }
    }
}

}  // namespace
}  // namespace z2circ
