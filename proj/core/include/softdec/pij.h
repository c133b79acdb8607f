// Copyright 2026 Softdec Contributors
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

#ifndef SOFTDEC_PIJ_H
#define SOFTDEC_PIJ_H

#include <cstdint>
#include <vector>

#include "softdec/graph.h"

namespace softdec {

/// Sufficient statistics for pairwise-correlation edge estimation over a
/// fixed edge set: per-detector defect counts and per-bulk-edge coincidence
/// counts. Accumulated in one pass; partial accumulators merge
/// associatively.
class DefectStats {
 public:
  explicit DefectStats(const DecodingGraph& floor);

  void add_shot(const std::vector<uint8_t>& defects);
  void merge(const DefectStats& other);

  int64_t shots() const { return shots_; }
  double mean(int detector) const;
  double pair_mean(int bulk_edge_index) const;
  const std::vector<int>& bulk_edges() const { return bulk_edges_; }

 private:
  int num_detectors_;
  std::vector<int> bulk_edges_;  // indices into the floor graph's edge list
  std::vector<std::pair<int, int>> pair_nodes_;
  int64_t shots_ = 0;
  std::vector<int64_t> singles_;
  std::vector<int64_t> pairs_;
};

/// Closed-form pairwise estimate for a bulk edge from first and second
/// defect moments:
///   p = 1/2 - 1/2 sqrt(1 - 4(<didj> - <di><dj>) /
///                          (1 - 2<di> - 2<dj> + 4<didj>))
/// Returns NaN when the discriminant is negative or the denominator is 0.
double pij_bulk_estimate(double mean_i, double mean_j, double mean_ij);

/// Boundary-edge probability that makes the XOR combination of all edges at
/// the detector reproduce the observed mean: 1 - 2<d> = (1 - 2p) prod_bulk
/// (1 - 2p_e). Returns NaN when the product vanishes.
double pij_boundary_estimate(double mean_i, const std::vector<double>& incident_bulk);

/// Estimates every edge probability of the floor graph's edge set from
/// defect data, replacing each estimate by max(estimate, floor probability)
/// and falling back to the floor value when an estimate is NaN. Estimates
/// at or above 0.5 are clamped to 0.5 - 1e-9 with a warning. The estimated
/// graph keeps the floor's structure (kinds, sources, logical flips) but
/// drops generative mechanisms.
DecodingGraph estimate_pij_graph(const DefectStats& stats, const DecodingGraph& floor);

/// Convenience wrapper accumulating the dataset in one pass.
/// Requires at least 1000 shots.
DecodingGraph estimate_pij_graph(const std::vector<std::vector<uint8_t>>& defect_dataset,
                                 const DecodingGraph& floor);

}  // namespace softdec

#endif
