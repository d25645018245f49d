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

#include "z2circ/percolation.h"

#include <algorithm>
#include <stdexcept>

namespace z2circ {

SpaceTimeForest::SpaceTimeForest(const Lattice &lattice, InitialState initial) : lattice_(&lattice) {
    const auto n = lattice.num_sites();
    parent_.reserve(2 * n);
    current_.resize(n);
    for (Site s = 0; s < n; ++s) {
        current_[s] = fresh_node();
        // From all-plus every site starts as its own singleton cluster.
        initial_[current_[s]] = initial == InitialState::AllZero ? 1 : 0;
    }
}

std::uint32_t SpaceTimeForest::fresh_node() {
    const auto id = static_cast<std::uint32_t>(parent_.size());
    parent_.push_back(id);
    rank_.push_back(0);
    initial_.push_back(0);
    return id;
}

std::uint32_t SpaceTimeForest::find(std::uint32_t node) {
    std::uint32_t root = node;
    while (parent_[root] != root) {
        root = parent_[root];
    }
    while (parent_[node] != root) {
        const auto next = parent_[node];
        parent_[node] = root;
        node = next;
    }
    return root;
}

void SpaceTimeForest::unite(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) {
        return;
    }
    if (rank_[a] < rank_[b]) {
        std::swap(a, b);
    }
    parent_[b] = a;
    initial_[a] |= initial_[b];
    if (rank_[a] == rank_[b]) {
        ++rank_[a];
    }
}

void SpaceTimeForest::ingest(const Event &event) {
    if (event.site >= current_.size()) {
        throw std::out_of_range("event site outside lattice");
    }
    if (event.kind == EventKind::MeasureX) {
        current_[event.site] = fresh_node();
        ++x_measurements_;
        return;
    }
    for (Site nb : lattice_->neighbors(event.site)) {
        unite(current_[event.site], current_[nb]);
    }
}

void SpaceTimeForest::ingest(const Schedule &schedule) {
    check_schedule(schedule, *lattice_);
    parent_.reserve(parent_.size() + schedule.events.size());
    for (const Event &e : schedule.events) {
        ingest(e);
    }
}

CanonicalState SpaceTimeForest::classify() {
    const auto n = current_.size();
    CanonicalState c;
    c.z.assign(n, 0);
    c.label.assign(n, -1);
    c.bit.assign(n, 0);
    c.sign.assign(n, 0);
    std::vector<std::int32_t> label_of_root(parent_.size(), -1);
    for (Site s = 0; s < n; ++s) {
        const auto root = find(current_[s]);
        if (initial_[root]) {
            c.z[s] = +1;
            continue;
        }
        if (label_of_root[root] < 0) {
            label_of_root[root] = static_cast<std::int32_t>(s);
        }
        c.label[s] = label_of_root[root];
    }
    return c;
}

PercolationObservables percolation_observables(const CanonicalState &classified) {
    const auto n = classified.label.size();
    PercolationObservables obs;
    if (n == 0) {
        return obs;
    }
    std::vector<std::size_t> size_of_label(n, 0);
    std::size_t background = 0;
    for (std::size_t s = 0; s < n; ++s) {
        if (classified.label[s] < 0) {
            ++background;
        } else {
            ++size_of_label[static_cast<std::size_t>(classified.label[s])];
        }
    }
    obs.has_background = background > 0;
    obs.background_fraction = static_cast<double>(background) / static_cast<double>(n);
    obs.largest_cluster_fraction =
        static_cast<double>(*std::max_element(size_of_label.begin(), size_of_label.end())) / static_cast<double>(n);
    return obs;
}

}  // namespace z2circ
