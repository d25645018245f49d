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

#include "z2circ/lattice.h"
#include "z2circ/random.h"
#include "z2circ/schedule.h"

namespace z2circ {

using Spin = std::int8_t;

struct SpinConfig {
    std::vector<Spin> spins;

    int magnetization() const;
    bool operator==(const SpinConfig &) const = default;
};

enum class Formulation : std::uint8_t {
    NoiseQ,  ///< follow a strict neighbor majority with probability 1 - q
    ProbP,   ///< with probability p follow the majority (ties reset randomly), else reset
};

enum class InitialSpins : std::uint8_t { AllUp, AllDown, Random };

struct MvcConfig {
    Formulation formulation = Formulation::ProbP;
    /// q for NoiseQ, p for ProbP.
    double parameter = 1.0;
    std::size_t sweeps = 1;
    InitialSpins initial = InitialSpins::AllUp;

    void validate() const;
};

/// q = (1 - p) / 2.
inline double noise_from_p(double p) { return (1.0 - p) / 2.0; }

/// Draws from a RandomStream.
struct StreamChooser {
    RandomStream &rng;
    bool bernoulli(double probability) { return rng.uniform() < probability; }
};

// Single-site rules. `neighbor_sum` is the sum of the neighboring spins; the
// current spin never influences the new one. The rules are written against
// a Chooser (anything with `bool bernoulli(double)`) so that the same code
// can be sampled or enumerated exactly.

template <class Chooser>
Spin random_reset(Chooser &c) {
    return c.bernoulli(0.5) ? Spin{+1} : Spin{-1};
}

/// Strict majority if one exists, otherwise a random reset.
template <class Chooser>
Spin majority_or_reset(int neighbor_sum, Chooser &c) {
    if (neighbor_sum > 0) {
        return +1;
    }
    if (neighbor_sum < 0) {
        return -1;
    }
    return random_reset(c);
}

template <class Chooser>
Spin update_q(int neighbor_sum, Spin /*current*/, double q, Chooser &c) {
    if (neighbor_sum == 0) {
        return c.bernoulli(0.5) ? Spin{+1} : Spin{-1};
    }
    const Spin majority = neighbor_sum > 0 ? Spin{+1} : Spin{-1};
    return c.bernoulli(1.0 - q) ? majority : static_cast<Spin>(-majority);
}

template <class Chooser>
Spin update_p(int neighbor_sum, Spin /*current*/, double p, Chooser &c) {
    if (c.bernoulli(p)) {
        return majority_or_reset(neighbor_sum, c);
    }
    return random_reset(c);
}

/// Probability that `rule(chooser)` returns +1, by enumerating every branch
/// of its binary choices.
template <class Rule>
double exact_up_probability(Rule rule) {
    struct PathChooser {
        std::vector<bool> path;
        std::vector<std::vector<bool>> *pending;
        std::size_t depth = 0;
        double weight = 1.0;
        bool bernoulli(double probability) {
            if (depth == path.size()) {
                auto other = path;
                other.push_back(false);
                pending->push_back(std::move(other));
                path.push_back(true);
            }
            const bool choice = path[depth++];
            weight *= choice ? probability : 1.0 - probability;
            return choice;
        }
    };
    std::vector<std::vector<bool>> pending{{}};
    double up = 0.0;
    while (!pending.empty()) {
        PathChooser c{std::move(pending.back()), &pending};
        pending.pop_back();
        if (rule(c) > 0) {
            up += c.weight;
        }
    }
    return up;
}

void mvc_step_q(SpinConfig &config, const Lattice &lattice, Site site, double q, RandomStream &rng);
void mvc_step_p(SpinConfig &config, const Lattice &lattice, Site site, double p, RandomStream &rng);

int neighbor_sum(const SpinConfig &config, const Lattice &lattice, Site site);

SpinConfig initial_spins(const Lattice &lattice, InitialSpins initial, RandomStream &rng);

/// One raster-order sweep of the configured rule.
void mvc_sweep(SpinConfig &spins, const Lattice &lattice, const MvcConfig &config, RandomStream &schedule_rng,
               RandomStream &dynamics_rng);

struct MvcRun {
    SpinConfig final_config;
    /// m(t) = sum of spins / N after each sweep.
    std::vector<double> magnetization_history;
};

/// Raster-order sweeps. For ProbP the per-site choice is drawn from
/// `schedule_rng` exactly as generate_schedule() would, so a ProbP run equals
/// run_mvc_schedule() on that schedule with the same dynamics stream.
MvcRun run_mvc(const Lattice &lattice, const MvcConfig &config, RandomStream schedule_rng, RandomStream dynamics_rng);

/// ProbP dynamics driven by a recorded schedule: MeasureX events are random
/// resets, BondRound events follow the majority.
MvcRun run_mvc_schedule(const Lattice &lattice, const Schedule &schedule, SpinConfig initial, RandomStream dynamics_rng);

/// Exact distribution over the 2^N configurations after the schedule,
/// starting from a single configuration. Basis index bit k is set when
/// spin k is -1. N must be at most 16.
std::vector<double> evolve_distribution(const Lattice &lattice, const Schedule &schedule, std::uint32_t initial_index);

/// Exact distribution averaged over schedules: each site update is the ProbP
/// rule with parameter p, raster order.
std::vector<double> evolve_distribution_averaged(
    const Lattice &lattice, double p, std::size_t sweeps, std::uint32_t initial_index);

}  // namespace z2circ
