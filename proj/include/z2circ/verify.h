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
#include <string>
#include <vector>

#include "json.hpp"
#include "z2circ/dense_oracle.h"
#include "z2circ/tape.h"

namespace z2circ {

/// Cluster engine vs. stabilizer tableau vs. space-time percolation, compared
/// after every event of every tape.
struct EngineEquivalenceReport {
    int dimension = 1;
    int L = 0;
    std::size_t sweeps = 0;
    std::size_t tapes = 0;
    std::vector<double> p_values;
    std::uint64_t seed = 0;

    std::size_t events_checked = 0;
    std::size_t state_mismatches = 0;       ///< canonical state differs from the tableau's
    std::size_t observable_mismatches = 0;  ///< any observable differs from the tableau's
    std::size_t partition_mismatches = 0;   ///< percolation partition differs
    std::size_t replay_errors = 0;          ///< tableau disagreed with a tape record
    std::size_t invariant_violations = 0;   ///< 1d bond rule or exact symmetry broken
    std::string first_failure;

    std::size_t total_failures() const {
        return state_mismatches + observable_mismatches + partition_mismatches + replay_errors +
               invariant_violations;
    }
    bool passed() const { return events_checked > 0 && total_failures() == 0; }
    nlohmann::json to_json() const;
};

/// Tape t uses p_values[t % size]; every fourth tape starts from all-plus.
EngineEquivalenceReport verify_engines(int dimension, int L, std::size_t sweeps, std::size_t tapes,
                                       const std::vector<double> &p_values, std::uint64_t seed);

/// Replays one tape through all three engines event by event; adds to `report`.
void check_tape(const OutcomeTape &tape, EngineEquivalenceReport &report);

nlohmann::json to_json(const dense::RelationReport &r);
nlohmann::json to_json(const dense::ReductionReport &r);

struct ChannelSuiteReport {
    std::vector<dense::RelationReport> rings;
    bool passed() const;
    nlohmann::json to_json() const;
};

ChannelSuiteReport verify_channel_suite(const std::vector<int> &ring_sizes, int trials, std::uint64_t seed);

struct ReductionSuiteReport {
    std::vector<dense::ReductionReport> cases;
    bool passed() const;
    nlohmann::json to_json() const;
};

ReductionSuiteReport verify_reduction_suite(const std::vector<int> &ring_sizes, const std::vector<double> &p_values,
                                            int sweeps, int trials, std::uint64_t seed);

}  // namespace z2circ
