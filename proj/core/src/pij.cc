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

#include "softdec/pij.h"

#include <cmath>
#include <stdexcept>

#include "softdec/logging.h"

namespace softdec {

namespace {
constexpr int64_t kMinShots = 1000;
constexpr double kMaxProbability = 0.5 - 1e-9;
}  // namespace

DefectStats::DefectStats(const DecodingGraph& floor) : num_detectors_(floor.num_detectors()) {
  for (size_t e = 0; e < floor.edges.size(); ++e) {
    if (!floor.edges[e].touches_boundary()) {
      bulk_edges_.push_back(static_cast<int>(e));
      pair_nodes_.emplace_back(floor.edges[e].node_a, floor.edges[e].node_b);
    }
  }
  singles_.assign(num_detectors_, 0);
  pairs_.assign(bulk_edges_.size(), 0);
}

void DefectStats::add_shot(const std::vector<uint8_t>& defects) {
  if (static_cast<int>(defects.size()) != num_detectors_) {
    throw std::invalid_argument("defect vector has wrong shape");
  }
  ++shots_;
  for (int i = 0; i < num_detectors_; ++i) singles_[i] += defects[i] & 1;
  for (size_t k = 0; k < pair_nodes_.size(); ++k) {
    pairs_[k] += (defects[pair_nodes_[k].first] & defects[pair_nodes_[k].second]) & 1;
  }
}

void DefectStats::merge(const DefectStats& other) {
  if (other.num_detectors_ != num_detectors_ || other.bulk_edges_ != bulk_edges_) {
    throw std::invalid_argument("cannot merge stats over different graphs");
  }
  shots_ += other.shots_;
  for (size_t i = 0; i < singles_.size(); ++i) singles_[i] += other.singles_[i];
  for (size_t i = 0; i < pairs_.size(); ++i) pairs_[i] += other.pairs_[i];
}

double DefectStats::mean(int detector) const {
  return shots_ > 0 ? static_cast<double>(singles_[detector]) / shots_ : 0.0;
}

double DefectStats::pair_mean(int bulk_edge_index) const {
  return shots_ > 0 ? static_cast<double>(pairs_[bulk_edge_index]) / shots_ : 0.0;
}

double pij_bulk_estimate(double mean_i, double mean_j, double mean_ij) {
  double numerator = mean_ij - mean_i * mean_j;
  double denominator = 1.0 - 2.0 * mean_i - 2.0 * mean_j + 4.0 * mean_ij;
  if (denominator == 0.0) return std::numeric_limits<double>::quiet_NaN();
  double discriminant = 1.0 - 4.0 * numerator / denominator;
  if (!(discriminant >= 0.0)) return std::numeric_limits<double>::quiet_NaN();
  return 0.5 - 0.5 * std::sqrt(discriminant);
}

double pij_boundary_estimate(double mean_i, const std::vector<double>& incident_bulk) {
  double product = 1.0;
  for (double p : incident_bulk) product *= 1.0 - 2.0 * p;
  if (product == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return 0.5 * (1.0 - (1.0 - 2.0 * mean_i) / product);
}

DecodingGraph estimate_pij_graph(const DefectStats& stats, const DecodingGraph& floor) {
  if (stats.shots() < kMinShots) {
    throw std::invalid_argument("pairwise estimation needs at least " +
                                std::to_string(kMinShots) + " shots");
  }
  DecodingGraph estimated = floor;
  for (auto& edge : estimated.edges) edge.mechanisms.clear();

  auto stabilize = [&](double estimate, double floor_p, const char* what) {
    double p = std::isnan(estimate) ? floor_p : std::max(estimate, floor_p);
    if (p > kMaxProbability) {
      log_warn(std::string("estimated ") + what + " probability >= 0.5, clamping");
      p = kMaxProbability;
    }
    return p;
  };

  // Bulk edges first; boundary edges then absorb the residual mean.
  const auto& bulk = stats.bulk_edges();
  for (size_t k = 0; k < bulk.size(); ++k) {
    Edge& edge = estimated.edges[bulk[k]];
    double est = pij_bulk_estimate(stats.mean(edge.node_a), stats.mean(edge.node_b),
                                   stats.pair_mean(static_cast<int>(k)));
    edge.probability = stabilize(est, floor.edges[bulk[k]].probability, "bulk edge");
  }
  for (size_t e = 0; e < estimated.edges.size(); ++e) {
    Edge& edge = estimated.edges[e];
    if (!edge.touches_boundary()) continue;
    int detector = edge.node_a == kBoundaryNode ? edge.node_b : edge.node_a;
    std::vector<double> incident;
    for (size_t k = 0; k < bulk.size(); ++k) {
      const Edge& bulk_edge = estimated.edges[bulk[k]];
      if (bulk_edge.node_a == detector || bulk_edge.node_b == detector) {
        incident.push_back(bulk_edge.probability);
      }
    }
    double est = pij_boundary_estimate(stats.mean(detector), incident);
    edge.probability = stabilize(est, floor.edges[e].probability, "boundary edge");
  }
  estimated.validate();
  return estimated;
}

DecodingGraph estimate_pij_graph(const std::vector<std::vector<uint8_t>>& defect_dataset,
                                 const DecodingGraph& floor) {
  DefectStats stats(floor);
  for (const auto& shot : defect_dataset) stats.add_shot(shot);
  return estimate_pij_graph(stats, floor);
}

}  // namespace softdec
