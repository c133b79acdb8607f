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

#include "softdec/decode.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

#include "softdec/detectors.h"
#include "softdec/logging.h"
#include "softdec/matching.h"
#include "softdec/numeric.h"

namespace softdec {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

HardenedShot harden_shot(const ModelSet& models, const ShotRecord& record,
                         const CodeLayout& layout) {
  int na = layout.num_ancillas();
  int nd = layout.num_data();
  int rounds = record.rounds;
  if (static_cast<int>(record.ancilla_iq.size()) != na * rounds ||
      static_cast<int>(record.final_iq.size()) != nd) {
    throw std::invalid_argument("shot record shape does not match the layout");
  }
  HardenedShot shot;
  shot.ancilla_bits.resize(na * rounds);
  for (int a = 0; a < na; ++a) {
    for (int r = 1; r <= rounds; ++r) {
      int slot = a * rounds + (r - 1);
      shot.ancilla_bits[slot] =
          static_cast<uint8_t>(harden(models.ancilla[a], record.ancilla_iq[slot], 2));
    }
  }
  shot.final_bits.resize(nd);
  for (int q = 0; q < nd; ++q) {
    shot.final_bits[q] = static_cast<uint8_t>(harden(models.data[q], record.final_iq[q], 2));
  }
  shot.defects = detectors_no_reset(layout, shot.ancilla_bits, shot.final_bits, rounds);
  shot.z_out = 0;
  for (int q : layout.logical_support) shot.z_out ^= shot.final_bits[q];
  return shot;
}

std::vector<double> ShotWeights::materialize() const {
  std::vector<double> weights = base->base_weights();
  for (const auto& [edge, w] : overrides) weights[edge] = w;
  return weights;
}

Decoder::Decoder(const DecodingGraph& graph) : graph_(&graph) {
  num_detectors_ = graph.num_detectors();
  plain_node_ = num_detectors_;
  flip_node_ = num_detectors_ + 1;

  // 2-color detectors so that every logical-flipping edge crosses the cut
  // between the two boundary aliases. Bulk edges constrain the coloring;
  // boundary edges anchor it.
  sigma_.assign(num_detectors_, -1);
  std::vector<std::vector<std::pair<int, int>>> bulk_adj(num_detectors_);
  for (size_t e = 0; e < graph.edges.size(); ++e) {
    const Edge& edge = graph.edges[e];
    if (!edge.touches_boundary()) {
      bulk_adj[edge.node_a].emplace_back(edge.node_b, edge.logical_flip ? 1 : 0);
      bulk_adj[edge.node_b].emplace_back(edge.node_a, edge.logical_flip ? 1 : 0);
    }
  }
  for (int start = 0; start < num_detectors_; ++start) {
    if (sigma_[start] >= 0) continue;
    sigma_[start] = 0;
    std::vector<int> stack{start};
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      for (auto [v, parity] : bulk_adj[u]) {
        int want = sigma_[u] ^ parity;
        if (sigma_[v] < 0) {
          sigma_[v] = want;
          stack.push_back(v);
        } else if (sigma_[v] != want) {
          throw std::runtime_error("logical flips are not separable by a boundary cut");
        }
      }
    }
  }

  adjacency_.assign(num_detectors_ + 2, {});
  edge_flip_.resize(graph.edges.size());
  for (size_t e = 0; e < graph.edges.size(); ++e) {
    const Edge& edge = graph.edges[e];
    edge_flip_[e] = edge.logical_flip ? 1 : 0;
    int a = edge.node_a;
    int b = edge.node_b;
    if (edge.touches_boundary()) {
      int u = a == kBoundaryNode ? b : a;
      int side = sigma_[u] ^ (edge.logical_flip ? 1 : 0);
      int bnode = side ? flip_node_ : plain_node_;
      adjacency_[u].push_back({bnode, static_cast<int>(e)});
      adjacency_[bnode].push_back({u, static_cast<int>(e)});
    } else {
      adjacency_[a].push_back({b, static_cast<int>(e)});
      adjacency_[b].push_back({a, static_cast<int>(e)});
    }
  }
}

std::vector<double> Decoder::dijkstra(int source, const std::vector<double>& weights) const {
  int n = num_detectors_ + 2;
  std::vector<double> dist(n, kInf);
  std::priority_queue<std::pair<double, int>, std::vector<std::pair<double, int>>,
                      std::greater<>> heap;
  dist[source] = 0.0;
  heap.push({0.0, source});
  while (!heap.empty()) {
    auto [d, u] = heap.top();
    heap.pop();
    if (d > dist[u]) continue;
    for (const Arc& arc : adjacency_[u]) {
      double nd = d + weights[arc.edge];
      if (nd < dist[arc.to]) {
        dist[arc.to] = nd;
        heap.push({nd, arc.to});
      }
    }
  }
  return dist;
}

DecodeResult Decoder::decode(const std::vector<uint8_t>& defects) const {
  return decode(defects, graph_->base_weights());
}

DecodeResult Decoder::decode(const std::vector<uint8_t>& defects,
                             const std::vector<double>& weights) const {
  if (static_cast<int>(defects.size()) != num_detectors_) {
    throw std::invalid_argument("defect vector has wrong shape");
  }
  // Fold negative overrides in by complementing those edges: take them by
  // default, flip their endpoints' required parities, and pay |w| to undo.
  std::vector<double> w = weights;
  std::vector<uint8_t> required(defects.begin(), defects.end());
  double offset = 0.0;
  int base_class = 0;
  for (size_t e = 0; e < w.size(); ++e) {
    if (w[e] < 0.0) {
      offset += w[e];
      base_class ^= edge_flip_[e];
      const Edge& edge = graph_->edges[e];
      for (int node : {edge.node_a, edge.node_b}) {
        if (node != kBoundaryNode) required[node] ^= 1;
      }
      w[e] = -w[e];
    }
  }

  std::vector<int> t_detectors;
  int sigma_parity = 0;
  for (int v = 0; v < num_detectors_; ++v) {
    if (required[v]) {
      t_detectors.push_back(v);
      sigma_parity ^= sigma_[v];
    }
  }

  // Shortest paths among T nodes and the two boundary aliases.
  std::vector<int> nodes = t_detectors;
  nodes.push_back(plain_node_);
  nodes.push_back(flip_node_);
  int m = static_cast<int>(nodes.size());
  std::vector<std::vector<double>> dist(m);
  for (int i = 0; i < m; ++i) {
    std::vector<double> all = dijkstra(nodes[i], w);
    dist[i].resize(m);
    for (int j = 0; j < m; ++j) dist[i][j] = all[nodes[j]];
  }

  auto solve_class = [&](int target_class) {
    // Required boundary-alias parities for this logical class.
    int flip_in = target_class ^ base_class ^ sigma_parity;
    int plain_in = (static_cast<int>(t_detectors.size()) + flip_in) % 2;
    std::vector<int> members;  // indices into `nodes`
    for (size_t i = 0; i < t_detectors.size(); ++i) members.push_back(static_cast<int>(i));
    if (plain_in) members.push_back(m - 2);
    if (flip_in) members.push_back(m - 1);
    int k = static_cast<int>(members.size());
    std::vector<std::vector<double>> cost(k, std::vector<double>(k, 0.0));
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < k; ++j) {
        if (i == j) continue;
        double d = dist[members[i]][members[j]];
        if (!std::isfinite(d)) throw std::runtime_error("defect disconnected from the graph");
        cost[i][j] = d;
      }
    }
    MatchingResult match = min_weight_perfect_matching(cost);
    std::vector<std::pair<int, int>> pairs;
    for (auto [i, j] : match.pairs) {
      pairs.emplace_back(nodes[members[i]], nodes[members[j]]);
    }
    return std::make_pair(offset + match.weight, pairs);
  };

  auto [w0, pairs0] = solve_class(0);
  auto [w1, pairs1] = solve_class(1);

  DecodeResult result;
  result.flip_bit = w1 <= w0 ? 1 : 0;
  result.weight = result.flip_bit ? w1 : w0;
  result.weight_complement = result.flip_bit ? w0 : w1;
  result.matched_pairs = result.flip_bit ? std::move(pairs1) : std::move(pairs0);
  double gap = result.weight_complement - result.weight;
  double winner = sigmoid(gap);
  result.confidence = result.flip_bit ? winner : 1.0 - winner;
  return result;
}

DecodeResult mwpm_decode(const DecodingGraph& graph, const std::vector<uint8_t>& defects) {
  return Decoder(graph).decode(defects);
}

namespace {

// log P'(z | 1 - bit) - log P'(z | bit) for one measurement.
double classification_log_ratio(const ReadoutModel& model, const IQSample& z, int bit) {
  return model.log_pdf_dominant(1 - bit, z) - model.log_pdf_dominant(bit, z);
}

const ReadoutModel& model_for_key(const ModelSet& models, const MeasurementKey& key) {
  return key.is_final_data ? models.data[key.qubit] : models.ancilla[key.qubit];
}

IQSample iq_for_slot(const ShotRecord& record, const DecodingGraph& graph, uint32_t slot) {
  int ancilla_slots = graph.num_ancillas * graph.rounds;
  if (static_cast<int>(slot) < ancilla_slots) {
    if (slot >= record.ancilla_iq.size()) throw std::runtime_error("missing IQ sample");
    return record.ancilla_iq[slot];
  }
  uint32_t q = slot - ancilla_slots;
  if (q >= record.final_iq.size()) throw std::runtime_error("missing IQ sample");
  return record.final_iq[q];
}

int bit_for_slot(const HardenedShot& hardened, const DecodingGraph& graph, uint32_t slot) {
  int ancilla_slots = graph.num_ancillas * graph.rounds;
  if (static_cast<int>(slot) < ancilla_slots) return hardened.ancilla_bits[slot];
  return hardened.final_bits[slot - ancilla_slots];
}

}  // namespace

void soft_reweight_bulk(const ModelSet& models, const ShotRecord& record,
                        const HardenedShot& hardened, const DecodingGraph& graph,
                        ShotWeights& weights) {
  weights.base = &graph;
  for (size_t e = 0; e < graph.edges.size(); ++e) {
    const Edge& edge = graph.edges[e];
    if (edge.kind != EdgeKind::kClassificationError) continue;
    if (edge.source_measurements.size() != 1) {
      throw std::runtime_error("bulk classification edge must have one source measurement");
    }
    const MeasurementKey& key = edge.source_measurements.front();
    uint32_t slot = graph.slot_of_key(key);
    int bit = bit_for_slot(hardened, graph, slot);
    double ratio = classification_log_ratio(model_for_key(models, key),
                                            iq_for_slot(record, graph, slot), bit);
    weights.overrides[static_cast<int>(e)] = -ratio;
  }
}

void accumulate_class_errors(const ModelSet& models, const ShotRecord& record,
                             const HardenedShot& hardened, const DecodingGraph& graph,
                             ClassErrorStats& stats) {
  if (stats.sums.empty()) stats.sums.assign(graph.num_measurements(), 0.0);
  for (uint32_t slot = 0; slot < static_cast<uint32_t>(graph.num_measurements()); ++slot) {
    MeasurementKey key = graph.slot_key(slot);
    int bit = bit_for_slot(hardened, graph, slot);
    double ratio = classification_log_ratio(model_for_key(models, key),
                                            iq_for_slot(record, graph, slot), bit);
    stats.sums[slot] += sigmoid(ratio);  // P'(wrong) / (P'(right) + P'(wrong))
  }
  ++stats.shots;
}

SoftReweighter::SoftReweighter(const ModelSet& models, const ClassErrorStats& stats,
                               const DecodingGraph& graph, double q_floor)
    : models_(&models), graph_(&graph) {
  if (stats.shots <= 0) throw std::invalid_argument("classification statistics are empty");
  for (size_t e = 0; e < graph.edges.size(); ++e) {
    const Edge& edge = graph.edges[e];
    if (edge.kind == EdgeKind::kClassificationError) {
      if (edge.source_measurements.size() != 1) {
        throw std::runtime_error("bulk classification edge must have one source measurement");
      }
      bulk_.push_back({static_cast<int>(e), graph.slot_of_key(edge.source_measurements[0])});
    } else if (edge.kind == EdgeKind::kFinalRoundCombined) {
      if (edge.source_measurements.empty() || edge.source_measurements.size() > 2) {
        throw std::runtime_error("final-round edge must have one or two source measurements");
      }
      // Mean classification error of the edge from its measurements, then
      // the residual qubit probability q = (p - c) / (1 - 2c).
      double product = 1.0;
      FinalEdge fe;
      fe.edge = static_cast<int>(e);
      for (const auto& key : edge.source_measurements) {
        uint32_t slot = graph.slot_of_key(key);
        product *= 1.0 - 2.0 * stats.mean(slot);
        fe.slots.push_back(slot);
      }
      double c = 0.5 * (1.0 - product);
      if (c >= 0.5) throw std::runtime_error("classification error dominates edge");
      double q = (edge.probability - c) / (1.0 - 2.0 * c);
      if (q < q_floor) {
        log_warn("final-round qubit probability fell below the floor after removing "
                 "classification error; clamping (p=" +
                 std::to_string(edge.probability) + ", c=" + std::to_string(c) + ")");
        q = q_floor;
      }
      fe.log_odds_q = std::log(q) - std::log1p(-q);
      final_.push_back(std::move(fe));
    }
  }
}

void SoftReweighter::apply(const ShotRecord& record, const HardenedShot& hardened,
                           ShotWeights& weights) const {
  const DecodingGraph& graph = *graph_;
  weights.base = &graph;
  for (const auto& bulk : bulk_) {
    const MeasurementKey& key = graph.edges[bulk.edge].source_measurements[0];
    int bit = bit_for_slot(hardened, graph, bulk.slot);
    double ratio = classification_log_ratio(model_for_key(*models_, key),
                                            iq_for_slot(record, graph, bulk.slot), bit);
    weights.overrides[bulk.edge] = -ratio;
  }
  for (const auto& fe : final_) {
    const Edge& edge = graph.edges[fe.edge];
    double lq = fe.log_odds_q;
    double lk[2] = {0.0, 0.0};
    for (size_t k = 0; k < fe.slots.size(); ++k) {
      int bit = bit_for_slot(hardened, graph, fe.slots[k]);
      lk[k] = classification_log_ratio(model_for_key(*models_, edge.source_measurements[k]),
                                       iq_for_slot(record, graph, fe.slots[k]), bit);
    }
    double w;
    if (fe.slots.size() == 1) {
      // w = -log[(L1 + Lq) / (1 + L1 Lq)]
      w = log_add_exp(0.0, lk[0] + lq) - log_add_exp(lk[0], lq);
    } else {
      // w = -log[(L1 + L2 + Lq + L1 L2 Lq) / (1 + L1 L2 + L1 Lq + L2 Lq)]
      double num = log_add_exp(log_add_exp(lk[0], lk[1]), log_add_exp(lq, lk[0] + lk[1] + lq));
      double den =
          log_add_exp(log_add_exp(0.0, lk[0] + lk[1]), log_add_exp(lk[0] + lq, lk[1] + lq));
      w = den - num;
    }
    weights.overrides[fe.edge] = w;
  }
}

void final_round_soft(const ModelSet& models, const ClassErrorStats& stats,
                      const ShotRecord& record, const HardenedShot& hardened,
                      const DecodingGraph& graph, ShotWeights& weights, double q_floor) {
  SoftReweighter reweighter(models, stats, graph, q_floor);
  ShotWeights all;
  all.base = &graph;
  reweighter.apply(record, hardened, all);
  weights.base = &graph;
  for (const auto& [edge, w] : all.overrides) {
    if (graph.edges[edge].kind == EdgeKind::kFinalRoundCombined) weights.overrides[edge] = w;
  }
}

DecodeResult soft_decode(const SoftReweighter& reweighter, const ShotRecord& record,
                         const HardenedShot& hardened, const Decoder& decoder) {
  ShotWeights weights;
  weights.base = &decoder.graph();
  reweighter.apply(record, hardened, weights);
  return decoder.decode(hardened.defects, weights.materialize());
}

DecodeResult soft_decode(const ModelSet& models, const ClassErrorStats& stats,
                         const ShotRecord& record, const HardenedShot& hardened,
                         const Decoder& decoder) {
  SoftReweighter reweighter(models, stats, decoder.graph());
  return soft_decode(reweighter, record, hardened, decoder);
}

double ensemble(const std::vector<double>& confidences) {
  if (confidences.empty()) throw std::invalid_argument("ensemble of nothing");
  double acc = 0.0;
  for (double y : confidences) {
    double clamped = std::clamp(y, 1e-12, 1.0 - 1e-12);
    acc += std::log((1.0 - clamped) / clamped);
  }
  double mean = acc / static_cast<double>(confidences.size());
  return sigmoid(-mean);
}

}  // namespace softdec
