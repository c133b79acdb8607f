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

#ifndef SOFTDEC_GRAPH_H
#define SOFTDEC_GRAPH_H

#include <cstdint>
#include <string>
#include <vector>

#include "softdec/layout.h"
#include "softdec/noise.h"
#include "softdec/numeric.h"

namespace softdec {

/// Detector (ancilla, round) with rounds 1..R+1; round R+1 detectors compare
/// the final data-qubit measurements against the last ancilla round.
struct DetectorId {
  int ancilla = 0;
  int round = 1;

  bool operator==(const DetectorId&) const = default;
};

enum class EdgeKind {
  kDataQubitError,
  kAncillaQubitError,
  kClassificationError,
  kFinalRoundCombined,
  kHook,
};

const char* edge_kind_name(EdgeKind kind);
EdgeKind edge_kind_from_name(const std::string& name);

/// A measurement record slot: either ancilla a measured in round r, or the
/// final measurement of data qubit q.
struct MeasurementKey {
  bool is_final_data = false;
  int qubit = 0;
  int round = 0;  // unused for final data measurements

  bool operator==(const MeasurementKey&) const = default;
};

/// One generative error mechanism behind an edge: fires independently with
/// `probability` and toggles the true value of every measurement slot in
/// `toggle_slots` (see DecodingGraph slot indexing).
struct Mechanism {
  double probability = 0.0;
  std::vector<uint32_t> toggle_slots;
};

constexpr int kBoundaryNode = -1;

struct Edge {
  int node_a = kBoundaryNode;
  int node_b = kBoundaryNode;
  double probability = 0.0;  // in (0, 0.5)
  EdgeKind kind = EdgeKind::kDataQubitError;
  bool logical_flip = false;
  /// Measurements whose classification errors produce this edge's defects;
  /// used for per-shot soft reweighting.
  std::vector<MeasurementKey> source_measurements;
  /// Qubit-error mechanisms only (classification content is never sampled).
  std::vector<Mechanism> mechanisms;

  double weight() const { return weight_from_probability(probability); }
  bool touches_boundary() const { return node_a == kBoundaryNode || node_b == kBoundaryNode; }
};

/// Decoding graph over detectors (ancilla, round 1..R+1) plus one virtual
/// boundary node. Immutable after construction.
struct DecodingGraph {
  int rounds = 0;
  int num_ancillas = 0;
  int num_data = 0;
  std::vector<Edge> edges;

  int num_detectors() const { return num_ancillas * (rounds + 1); }
  int detector_index(int ancilla, int round) const {
    return ancilla * (rounds + 1) + (round - 1);
  }
  DetectorId detector_id(int index) const {
    return {index / (rounds + 1), index % (rounds + 1) + 1};
  }

  /// Measurement slot indexing shared with ShotRecord IQ arrays:
  /// ancilla a, round r -> a*R + (r-1); final data q -> A*R + q.
  int num_measurements() const { return num_ancillas * rounds + num_data; }
  int ancilla_slot(int ancilla, int round) const { return ancilla * rounds + (round - 1); }
  int final_data_slot(int q) const { return num_ancillas * rounds + q; }
  MeasurementKey slot_key(uint32_t slot) const;
  uint32_t slot_of_key(const MeasurementKey& key) const;

  std::vector<double> base_weights() const;
  void validate() const;

  std::string to_json() const;
  static DecodingGraph from_json(const std::string& json_text);
};

/// Builds the circuit-noise graph by propagating every single-fault Pauli
/// channel through the schedule and XOR-accumulating probabilities of
/// identical defect signatures. Edges with zero probability are dropped.
DecodingGraph build_noise_floor_graph(const CodeLayout& layout, const NoiseParams& params,
                                      int rounds);

}  // namespace softdec

#endif
