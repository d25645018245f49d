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
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "z2circ/cluster_state.h"
#include "z2circ/lattice.h"
#include "z2circ/tableau.h"

namespace z2circ {

/// Number of clusters with members both inside and outside `region`.
/// `in_region` is a per-site membership mask.
int entropy(const ClusterState &state, std::span<const std::uint8_t> in_region);
int entropy(const ClusterState &state, std::span<const Site> region);

/// S_A + S_B + S_C + S_ABC - S_AB - S_BC - S_AC, from the cluster entropies.
int tripartite_information(const ClusterState &state, const RegionPartition &partition);
/// Number of clusters with support on all four regions.
int clusters_spanning_all_regions(const ClusterState &state, const RegionPartition &partition);

/// <prod_i X_i>: 0 with any background site, else the product of cluster signs.
int expectation_U(const ClusterState &state);
/// <sum_i Z_i>: cluster members contribute 0.
int magnetization(const ClusterState &state);
/// <Z_i Z_j>.
int zz_correlator(const ClusterState &state, Site i, Site j);

/// The same observables read off a tableau, for oracle comparisons.
int tripartite_information(const Tableau &tableau, const RegionPartition &partition);
int expectation_U(const Tableau &tableau);
int magnetization(const Tableau &tableau);
int zz_correlator(const Tableau &tableau, Site i, Site j);

struct TrajectoryObservables {
    int tripartite_I = 0;
    int abs_U = 0;
    int U_sign = 0;
    int magnetization = 0;
    int zz_half = 0;  ///< <Z_0 Z_antipode>
    double background_fraction = 0.0;

    bool operator==(const TrajectoryObservables &) const = default;
};

TrajectoryObservables measure_all(const ClusterState &state, const RegionPartition &partition);
TrajectoryObservables measure_all(const Tableau &tableau, const Lattice &lattice, const RegionPartition &partition);

/// Sample mean and standard error of one observable.
struct Estimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t count = 0;
};

/// Streaming mean/variance (Welford). merge() combines two accumulators.
class RunningStat {
  public:
    void add(double x);
    void merge(const RunningStat &other);
    std::size_t count() const { return n_; }
    double mean() const { return mean_; }
    double variance() const;
    Estimate estimate() const;

  private:
    std::size_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

/// Names of the ensemble observables, in output order.
inline constexpr std::array<const char *, 8> kObservableNames = {
    "abs_U", "U", "tripartite", "abs_M", "M", "zz", "zz_sq", "background_fraction"};

/// Per-trajectory values keyed by observable name. Engines that cannot
/// compute an observable simply omit it.
using ObservableRecord = std::map<std::string, double>;

ObservableRecord to_record(const TrajectoryObservables &obs);

struct EnsembleSummary {
    std::map<std::string, Estimate> values;
};

/// Sample means and standard errors over trajectory records, in record order.
/// `per_site_norm` divides abs_M and M by it (1 = raw counts).
EnsembleSummary ensemble_reduce(std::span<const ObservableRecord> records, double per_site_norm = 1.0);

}  // namespace z2circ
