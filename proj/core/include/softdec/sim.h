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

#ifndef SOFTDEC_SIM_H
#define SOFTDEC_SIM_H

#include <optional>
#include <vector>

#include "softdec/graph.h"
#include "softdec/readout.h"
#include "softdec/rng.h"

namespace softdec {

/// Readout models for every measured qubit.
struct ModelSet {
  std::vector<ReadoutModel> ancilla;
  std::vector<ReadoutModel> data;
};

/// Synthetic leakage injection: each ancilla measurement leaks with p_leak;
/// a leaked ancilla seeps back to the computational space with p_seep after
/// each measurement, returning in a random state. Invented plumbing; the
/// experiment reports leakage rates, not dynamics.
struct LeakageConfig {
  double p_leak = 0.0;
  double p_seep = 0.25;
};

struct ShotTruth {
  std::vector<uint32_t> fired_edges;  // edges whose mechanisms fired an odd number of times
  bool logical_flip = false;
  /// Leak occupation per ancilla measurement slot (a*R + r-1).
  std::vector<uint8_t> leaked;
};

/// One run: per-round per-ancilla IQ samples plus the final data-qubit
/// samples. IQ arrays use the graph's measurement slot indexing.
struct ShotRecord {
  uint64_t shot_id = 0;
  int rounds = 0;
  uint16_t initial_state = 0;
  std::vector<IQSample> ancilla_iq;
  std::vector<IQSample> final_iq;
  std::optional<ShotTruth> truth;
};

struct SimConfig {
  NoiseParams noise;
  LeakageConfig leakage;
  std::vector<int> rounds = {1, 2, 4, 8, 16};
  int shots_per_state_round = 1000;
  uint64_t seed = 0;
  bool with_truth = true;
};

/// Draws an IQ sample from P(z | state) for the given model (3-state mixture
/// when fitted, otherwise the projected 2-state response embedded in the
/// plane with isotropic spread).
IQSample draw_iq(const ReadoutModel& model, int state, Rng& rng);

/// Samples one run from the graph's generative model: every qubit-error
/// mechanism fires independently, toggling the true values of its
/// measurements; IQ samples are then drawn from the true states.
/// Classification errors are never sampled; they emerge when the analog
/// samples are hardened.
ShotRecord sample_shot(const DecodingGraph& graph, const CodeLayout& layout,
                       const ModelSet& models, const LeakageConfig& leakage,
                       uint16_t initial_state, uint64_t shot_id, uint64_t seed,
                       bool with_truth = true);

/// Synthetic readout model with centroid separation `separation` (in units
/// of sigma) along the I axis and a |2> cloud off-axis; r0/r1 control state
/// preparation mixing.
ReadoutModel make_synthetic_model(const std::string& qubit_id, double separation, double r0 = 0.0,
                                  double r1 = 1.0);

/// Per-detector analytic defect rate of the independent-edge model:
/// P(d_v = 1) = (1 - prod over edges at v of (1 - 2 p_e)) / 2.
std::vector<double> analytic_defect_rates(const DecodingGraph& graph);

/// Models file: {"kind": "softdec-models", "models": {"<qubit_id>": ...}}.
std::string models_to_json(const std::vector<ReadoutModel>& models);
std::vector<ReadoutModel> models_from_json(const std::string& json_text);

/// Assembles a ModelSet by matching model qubit_ids against the layout's
/// ancilla and data names; throws listing any missing qubit.
ModelSet assemble_model_set(const CodeLayout& layout, const std::vector<ReadoutModel>& models);

/// Identical synthetic models for every qubit in the layout.
ModelSet synthetic_model_set(const CodeLayout& layout, double separation, double r0 = 0.0,
                             double r1 = 1.0);

}  // namespace softdec

#endif
