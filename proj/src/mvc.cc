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

#include "z2circ/mvc.h"

#include <stdexcept>

namespace z2circ {

int SpinConfig::magnetization() const {
    int m = 0;
    for (Spin s : spins) {
        m += s;
    }
    return m;
}

void MvcConfig::validate() const {
    if (formulation == Formulation::NoiseQ && !(parameter >= 0.0 && parameter < 0.5)) {
        throw std::invalid_argument("majority-vote noise q must lie in [0, 1/2)");
    }
    if (formulation == Formulation::ProbP && !(parameter >= 0.0 && parameter <= 1.0)) {
        throw std::invalid_argument("majority-vote p must lie in [0, 1]");
    }
    if (sweeps == 0) {
        throw std::invalid_argument("sweeps must be at least 1");
    }
}

int neighbor_sum(const SpinConfig &config, const Lattice &lattice, Site site) {
    int sum = 0;
    for (Site nb : lattice.neighbors(site)) {
        sum += config.spins[nb];
    }
    return sum;
}

void mvc_step_q(SpinConfig &config, const Lattice &lattice, Site site, double q, RandomStream &rng) {
    StreamChooser c{rng};
    config.spins[site] = update_q(neighbor_sum(config, lattice, site), config.spins[site], q, c);
}

void mvc_step_p(SpinConfig &config, const Lattice &lattice, Site site, double p, RandomStream &rng) {
    StreamChooser c{rng};
    config.spins[site] = update_p(neighbor_sum(config, lattice, site), config.spins[site], p, c);
}

SpinConfig initial_spins(const Lattice &lattice, InitialSpins initial, RandomStream &rng) {
    SpinConfig config;
    config.spins.assign(lattice.num_sites(), initial == InitialSpins::AllDown ? Spin{-1} : Spin{+1});
    if (initial == InitialSpins::Random) {
        for (auto &s : config.spins) {
            s = rng.coin() ? Spin{-1} : Spin{+1};
        }
    }
    return config;
}

void mvc_sweep(SpinConfig &spins, const Lattice &lattice, const MvcConfig &config, RandomStream &schedule_rng,
               RandomStream &dynamics_rng) {
    StreamChooser c{dynamics_rng};
    const auto n = lattice.num_sites();
    for (Site s = 0; s < n; ++s) {
        const int sum = neighbor_sum(spins, lattice, s);
        if (config.formulation == Formulation::NoiseQ) {
            spins.spins[s] = update_q(sum, spins.spins[s], config.parameter, c);
        } else {
            const bool majority = schedule_rng.uniform() < config.parameter;
            spins.spins[s] = majority ? majority_or_reset(sum, c) : random_reset(c);
        }
    }
}

MvcRun run_mvc(const Lattice &lattice, const MvcConfig &config, RandomStream schedule_rng, RandomStream dynamics_rng) {
    config.validate();
    MvcRun out;
    out.final_config = initial_spins(lattice, config.initial, dynamics_rng);
    const auto n = static_cast<double>(lattice.num_sites());
    out.magnetization_history.reserve(config.sweeps);
    for (std::size_t t = 0; t < config.sweeps; ++t) {
        mvc_sweep(out.final_config, lattice, config, schedule_rng, dynamics_rng);
        out.magnetization_history.push_back(out.final_config.magnetization() / n);
    }
    return out;
}

MvcRun run_mvc_schedule(const Lattice &lattice, const Schedule &schedule, SpinConfig initial, RandomStream dynamics_rng) {
    check_schedule(schedule, lattice);
    if (initial.spins.size() != lattice.num_sites()) {
        throw std::invalid_argument("initial spin configuration does not match lattice");
    }
    MvcRun out;
    out.final_config = std::move(initial);
    auto &spins = out.final_config;
    StreamChooser c{dynamics_rng};
    const auto n = lattice.num_sites();
    for (std::size_t t = 0; t < schedule.num_sweeps(); ++t) {
        for (const Event &e : schedule.sweep(t)) {
            spins.spins[e.site] = e.kind == EventKind::BondRound ? majority_or_reset(neighbor_sum(spins, lattice, e.site), c)
                                                                 : random_reset(c);
        }
        out.magnetization_history.push_back(static_cast<double>(spins.magnetization()) / static_cast<double>(n));
    }
    return out;
}

namespace {

int neighbor_sum_of_index(const Lattice &lattice, std::uint32_t index, Site site) {
    int sum = 0;
    for (Site nb : lattice.neighbors(site)) {
        sum += ((index >> nb) & 1) ? -1 : +1;
    }
    return sum;
}

/// One single-site Markov step on the full distribution. `up_probability`
/// maps a neighbor sum to P(new spin = +1).
template <class UpProbability>
void apply_site_kernel(std::vector<double> &dist, const Lattice &lattice, Site site, UpProbability up_probability) {
    std::vector<double> next(dist.size(), 0.0);
    const std::uint32_t bit = std::uint32_t{1} << site;
    for (std::uint32_t index = 0; index < dist.size(); ++index) {
        if (dist[index] == 0.0) {
            continue;
        }
        const double up = up_probability(neighbor_sum_of_index(lattice, index, site));
        next[index & ~bit] += dist[index] * up;
        next[index | bit] += dist[index] * (1.0 - up);
    }
    dist.swap(next);
}

std::vector<double> delta_distribution(const Lattice &lattice, std::uint32_t initial_index) {
    const auto n = lattice.num_sites();
    if (n > 16) {
        throw std::invalid_argument("exact distribution evolution is limited to 16 sites");
    }
    std::vector<double> dist(std::size_t{1} << n, 0.0);
    dist.at(initial_index) = 1.0;
    return dist;
}

}  // namespace

std::vector<double> evolve_distribution(const Lattice &lattice, const Schedule &schedule, std::uint32_t initial_index) {
    check_schedule(schedule, lattice);
    auto dist = delta_distribution(lattice, initial_index);
    for (const Event &e : schedule.events) {
        if (e.kind == EventKind::BondRound) {
            apply_site_kernel(dist, lattice, e.site, [](int sum) {
                return exact_up_probability([sum](auto &c) { return majority_or_reset(sum, c); });
            });
        } else {
            apply_site_kernel(dist, lattice, e.site, [](int) {
                return exact_up_probability([](auto &c) { return random_reset(c); });
            });
        }
    }
    return dist;
}

std::vector<double> evolve_distribution_averaged(
    const Lattice &lattice, double p, std::size_t sweeps, std::uint32_t initial_index) {
    auto dist = delta_distribution(lattice, initial_index);
    for (std::size_t t = 0; t < sweeps; ++t) {
        for (Site s = 0; s < lattice.num_sites(); ++s) {
            apply_site_kernel(dist, lattice, s, [p](int sum) {
                return exact_up_probability([sum, p](auto &c) { return update_p(sum, Spin{+1}, p, c); });
            });
        }
    }
    return dist;
}

}  // namespace z2circ
