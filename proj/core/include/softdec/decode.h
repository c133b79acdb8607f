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

#ifndef SOFTDEC_DECODE_H
#define SOFTDEC_DECODE_H

#include <map>
#include <vector>

#include "softdec/graph.h"
#include "softdec/sim.h"

namespace softdec {

/// Two-state hardened view of one shot.
struct HardenedShot {
  std::vector<uint8_t> ancilla_bits;  // slot-indexed raw outcomes
  std::vector<uint8_t> final_bits;    // per data qubit
  std::vector<uint8_t> defects;       // per detector
  int z_out = 0;                      // logical readout from the final bits
};

HardenedShot harden_shot(const ModelSet& models, const ShotRecord& record,
                         const CodeLayout& layout);

/// Per-shot weight overlay. The base graph is never mutated.
struct ShotWeights {
  const DecodingGraph* base = nullptr;
  std::map<int, double> overrides;  // edge index -> weight

  std::vector<double> materialize() const;
};

struct DecodeResult {
  int flip_bit = 0;
  /// Estimated logical-flip probability from the complementary matching.
  double confidence = 0.5;
  double weight = 0.0;             // winning-class total weight
  double weight_complement = 0.0;  // best weight in the opposite class
  /// Matched node pairs of the winning class. Detector nodes use graph
  /// indices; the two boundary aliases are num_detectors() (plain) and
  /// num_detectors() + 1 (logical-flipping side).
  std::vector<std::pair<int, int>> matched_pairs;
};

/// Exact minimum-weight perfect matching decoder with per-class weights:
/// solves the best correction in both logical classes (via a shortest-path
/// T-join reduction) and reports the winner plus its complementary weight.
/// Negative per-shot weights are folded in by complementing those edges.
class Decoder {
 public:
  explicit Decoder(const DecodingGraph& graph);

  const DecodingGraph& graph() const { return *graph_; }

  DecodeResult decode(const std::vector<uint8_t>& defects) const;
  DecodeResult decode(const std::vector<uint8_t>& defects,
                      const std::vector<double>& weights) const;

 private:
  struct Arc {
    int to;
    int edge;
  };
  const DecodingGraph* graph_;
  int num_detectors_;
  int plain_node_;  // boundary alias with no logical action
  int flip_node_;   // boundary alias crossed by logical-flipping chains
  std::vector<int> sigma_;  // detector 2-coloring making flips a cut
  std::vector<std::vector<Arc>> adjacency_;
  std::vector<uint8_t> edge_flip_;

  std::vector<double> dijkstra(int source, const std::vector<double>& weights) const;
};

/// One-off decode with the graph's base weights.
DecodeResult mwpm_decode(const DecodingGraph& graph, const std::vector<uint8_t>& defects);

/// Per-shot weights for bulk classification-error edges:
///   w = -log[ P'(z~ | 1 - z) / P'(z~ | z) ]
/// evaluated at the recorded hardened outcome z, so the weight is negative
/// when the dominant-peak densities disfavor the recorded value.
void soft_reweight_bulk(const ModelSet& models, const ShotRecord& record,
                        const HardenedShot& hardened, const DecodingGraph& graph,
                        ShotWeights& weights);

/// Mean classification error per measurement slot, averaged over a
/// reference dataset (never the shots being decoded).
struct ClassErrorStats {
  std::vector<double> sums;  // per measurement slot
  int64_t shots = 0;

  double mean(uint32_t slot) const { return shots > 0 ? sums[slot] / shots : 0.0; }
};

void accumulate_class_errors(const ModelSet& models, const ShotRecord& record,
                             const HardenedShot& hardened, const DecodingGraph& graph,
                             ClassErrorStats& stats);

/// Final-round reweighting: removes each edge's mean classification error
/// from its estimated probability (q = (p - c) / (1 - 2c)) and recombines q
/// with the shot's classification likelihood ratios.
void final_round_soft(const ModelSet& models, const ClassErrorStats& stats,
                      const ShotRecord& record, const HardenedShot& hardened,
                      const DecodingGraph& graph, ShotWeights& weights,
                      double q_floor = 1e-9);

/// Precomputed per-shot reweighting for one graph: the shot-independent
/// parts (per-edge residual qubit probabilities q and their log odds) are
/// derived once from the classification statistics.
class SoftReweighter {
 public:
  SoftReweighter(const ModelSet& models, const ClassErrorStats& stats,
                 const DecodingGraph& graph, double q_floor = 1e-9);

  /// Writes bulk and final-round overrides for one shot.
  void apply(const ShotRecord& record, const HardenedShot& hardened,
             ShotWeights& weights) const;

 private:
  struct BulkEdge {
    int edge;
    uint32_t slot;
  };
  struct FinalEdge {
    int edge;
    double log_odds_q;
    std::vector<uint32_t> slots;
  };
  const ModelSet* models_;
  const DecodingGraph* graph_;
  std::vector<BulkEdge> bulk_;
  std::vector<FinalEdge> final_;
};

/// Reweights (bulk + final round) and decodes one hardened shot.
DecodeResult soft_decode(const SoftReweighter& reweighter, const ShotRecord& record,
                         const HardenedShot& hardened, const Decoder& decoder);
DecodeResult soft_decode(const ModelSet& models, const ClassErrorStats& stats,
                         const ShotRecord& record, const HardenedShot& hardened,
                         const Decoder& decoder);

/// Log-odds-mean ensembling of flip-probability estimates.
double ensemble(const std::vector<double>& confidences);

}  // namespace softdec

#endif
