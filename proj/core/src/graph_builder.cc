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

#include <algorithm>
#include <map>
#include <stdexcept>

#include "softdec/detectors.h"
#include "softdec/graph.h"

namespace softdec {

namespace {

// One elementary fault, reduced to the measurement-record slots whose value
// it toggles. Slot indexing matches DecodingGraph: ancilla a round r ->
// a*R + (r-1); final data q -> A*R + q.
struct Fault {
  double probability = 0.0;
  std::vector<uint32_t> slots;
  bool is_classification = false;
  MeasurementKey classification_key;
};

std::vector<uint32_t> xor_slots(std::vector<uint32_t> a, const std::vector<uint32_t>& b) {
  for (uint32_t s : b) {
    auto it = std::find(a.begin(), a.end(), s);
    if (it == a.end()) {
      a.push_back(s);
    } else {
      a.erase(it);
    }
  }
  std::sort(a.begin(), a.end());
  return a;
}

class FaultEnumerator {
 public:
  FaultEnumerator(const CodeLayout& layout, const NoiseParams& params, int rounds)
      : layout_(layout), params_(params), rounds_(rounds) {
    int na = layout.num_ancillas();
    int nd = layout.num_data();
    cz_layer_.assign(na, std::vector<int>(nd, -1));
    for (size_t layer = 0; layer < layout.cz_schedule.size(); ++layer) {
      for (const auto& [a, q] : layout.cz_schedule[layer]) {
        cz_layer_[a][q] = static_cast<int>(layer);
      }
    }
  }

  std::vector<Fault> enumerate() const {
    std::vector<Fault> faults;
    int na = layout_.num_ancillas();
    int nd = layout_.num_data();
    double flip_1q = 2.0 / 3.0 * params_.p_1q;
    double flip_reset = 2.0 / 3.0 * params_.p_reset;
    double flip_meas = 2.0 / 3.0 * params_.p_meas_qubit;
    double flip_2q = 4.0 / 15.0 * params_.p_2q;
    double idle_1q = idle_flip_probability(params_.t_1q_ns, params_.t1_us);
    double idle_2q = idle_flip_probability(params_.t_2q_ns, params_.t1_us);
    double idle_meas = idle_flip_probability(params_.t_meas_ns, params_.t1_us);
    int layers = static_cast<int>(layout_.cz_schedule.size());

    for (int r = 1; r <= rounds_; ++r) {
      if (r == 1 && flip_reset > 0.0) {
        for (int q = 0; q < nd; ++q) faults.push_back({flip_reset, data_slots(q, r, -1), false, {}});
        for (int a = 0; a < na; ++a) faults.push_back({flip_reset, ancilla_slots(a, 1), false, {}});
      }
      // First Hadamard layer; data qubits idle under it.
      for (int a = 0; a < na; ++a) faults.push_back({flip_1q, ancilla_slots(a, r), false, {}});
      for (int q = 0; q < nd; ++q) faults.push_back({idle_1q, data_slots(q, r, -1), false, {}});

      for (int layer = 0; layer < layers; ++layer) {
        std::vector<bool> ancilla_busy(na, false), data_busy(nd, false);
        for (const auto& [a, q] : layout_.cz_schedule[layer]) {
          ancilla_busy[a] = true;
          data_busy[q] = true;
          std::vector<uint32_t> anc = ancilla_slots(a, r);
          std::vector<uint32_t> dat = data_slots(q, r, layer);
          faults.push_back({flip_2q, anc, false, {}});
          faults.push_back({flip_2q, dat, false, {}});
          faults.push_back({flip_2q, xor_slots(anc, dat), false, {}});
        }
        for (int a = 0; a < na; ++a) {
          if (!ancilla_busy[a]) faults.push_back({idle_2q, ancilla_slots(a, r), false, {}});
        }
        for (int q = 0; q < nd; ++q) {
          // Idle between layers: checks scheduled before this layer already
          // saw the qubit this round.
          if (!data_busy[q]) faults.push_back({idle_2q, data_slots(q, r, layer - 1), false, {}});
        }
      }
      // Second Hadamard layer; all checks done, data errors now land on the
      // next round boundary.
      for (int a = 0; a < na; ++a) faults.push_back({flip_1q, ancilla_slots(a, r), false, {}});
      for (int q = 0; q < nd; ++q) faults.push_back({idle_1q, data_slots(q, r, layers), false, {}});
      // Ancilla measurement: qubit flip during readout plus pure
      // classification of the recorded value.
      for (int a = 0; a < na; ++a) {
        faults.push_back({flip_meas, ancilla_slots(a, r), false, {}});
        Fault cls;
        cls.probability = params_.p_meas_class;
        cls.slots = {static_cast<uint32_t>(a * rounds_ + (r - 1))};
        cls.is_classification = true;
        cls.classification_key = {false, a, r};
        faults.push_back(std::move(cls));
      }
      // Data qubits idle for the readout window.
      for (int q = 0; q < nd; ++q) {
        faults.push_back({idle_meas, data_slots(q, r, layers), false, {}});
      }
    }
    // Final transversal data measurement.
    for (int q = 0; q < nd; ++q) {
      faults.push_back({flip_meas, data_slots(q, rounds_ + 1, -1), false, {}});
      Fault cls;
      cls.probability = params_.p_meas_class;
      cls.slots = {final_slot(q)};
      cls.is_classification = true;
      cls.classification_key = {true, q, 0};
      faults.push_back(std::move(cls));
    }

    faults.erase(std::remove_if(faults.begin(), faults.end(),
                                [](const Fault& f) { return f.probability <= 0.0; }),
                 faults.end());
    return faults;
  }

  // Persistent ancilla-state flip from round from_r on: every later raw
  // measurement of that ancilla reads flipped.
  std::vector<uint32_t> ancilla_slots(int a, int from_r) const {
    std::vector<uint32_t> slots;
    for (int r = from_r; r <= rounds_; ++r) slots.push_back(a * rounds_ + (r - 1));
    return slots;
  }

  // Data-qubit flip in round r after CZ layers 0..done_layer have executed
  // (done_layer = -1 for errors before the round's checks; r = rounds+1 for
  // errors after the last check round). The accumulated no-reset record
  // toggles on alternating rounds from the first round each check sees the
  // flip, and the final measurement of q always toggles.
  std::vector<uint32_t> data_slots(int q, int r, int done_layer) const {
    std::vector<uint32_t> slots;
    for (int a = 0; a < layout_.num_ancillas(); ++a) {
      if (cz_layer_[a][q] < 0) continue;
      int first = (r <= rounds_ && cz_layer_[a][q] > done_layer) ? r : r + 1;
      for (int rr = first; rr <= rounds_; rr += 2) slots.push_back(a * rounds_ + (rr - 1));
    }
    slots.push_back(final_slot(q));
    std::sort(slots.begin(), slots.end());
    return slots;
  }

  uint32_t final_slot(int q) const {
    return static_cast<uint32_t>(layout_.num_ancillas() * rounds_ + q);
  }

 private:
  const CodeLayout& layout_;
  const NoiseParams& params_;
  int rounds_;
  std::vector<std::vector<int>> cz_layer_;
};

}  // namespace

DecodingGraph build_noise_floor_graph(const CodeLayout& layout, const NoiseParams& params,
                                      int rounds) {
  layout.validate();
  params.validate();
  if (rounds < 1) throw std::invalid_argument("rounds must be >= 1");

  DecodingGraph graph;
  graph.rounds = rounds;
  graph.num_ancillas = layout.num_ancillas();
  graph.num_data = layout.num_data();

  FaultEnumerator enumerator(layout, params, rounds);
  std::vector<Fault> faults = enumerator.enumerate();

  int na = layout.num_ancillas();
  int nd = layout.num_data();
  auto signature_of = [&](const std::vector<uint32_t>& slots) {
    std::vector<uint8_t> anc(na * rounds, 0), fin(nd, 0);
    for (uint32_t s : slots) {
      if (static_cast<int>(s) < na * rounds) {
        anc[s] ^= 1;
      } else {
        fin[s - na * rounds] ^= 1;
      }
    }
    std::vector<uint8_t> defect_bits = detectors_no_reset(layout, anc, fin, rounds);
    std::vector<int> fired;
    for (size_t i = 0; i < defect_bits.size(); ++i) {
      if (defect_bits[i]) fired.push_back(static_cast<int>(i));
    }
    return fired;
  };
  auto logical_flip_of = [&](const std::vector<uint32_t>& slots) {
    int parity = 0;
    for (uint32_t s : slots) {
      if (static_cast<int>(s) >= na * rounds) {
        int q = static_cast<int>(s) - na * rounds;
        if (std::find(layout.logical_support.begin(), layout.logical_support.end(), q) !=
            layout.logical_support.end()) {
          parity ^= 1;
        }
      }
    }
    return parity != 0;
  };

  struct Bucket {
    double probability = 0.0;
    bool logical_flip = false;
    bool has_any = false;
    bool has_classification = false;
    bool final_round = false;
    std::vector<MeasurementKey> sources;
    std::map<std::vector<uint32_t>, double> mechanisms;  // by toggle mask
  };
  std::map<std::vector<int>, Bucket> buckets;

  for (const auto& fault : faults) {
    std::vector<int> signature = signature_of(fault.slots);
    if (signature.empty()) continue;  // invisible fault
    if (signature.size() > 2) {
      throw std::runtime_error("fault produces more than two defects (hyperedge)");
    }
    Bucket& bucket = buckets[signature];
    bool flip = logical_flip_of(fault.slots);
    if (bucket.has_any && flip != bucket.logical_flip) {
      throw std::runtime_error("mechanisms with identical defects disagree on logical action");
    }
    bucket.logical_flip = flip;
    bucket.has_any = true;
    bucket.probability = xor_probability(bucket.probability, fault.probability);
    if (fault.is_classification) {
      bucket.has_classification = true;
      bucket.final_round = fault.classification_key.is_final_data ||
                           fault.classification_key.round == rounds;
      bucket.sources.push_back(fault.classification_key);
    } else {
      double& p = bucket.mechanisms[fault.slots];
      p = xor_probability(p, fault.probability);
    }
  }

  for (auto& [signature, bucket] : buckets) {
    if (bucket.probability <= 0.0) continue;
    Edge edge;
    edge.node_a = signature[0];
    edge.node_b = signature.size() == 2 ? signature[1] : kBoundaryNode;
    edge.probability = bucket.probability;
    edge.logical_flip = bucket.logical_flip;
    edge.source_measurements = bucket.sources;
    std::sort(edge.source_measurements.begin(), edge.source_measurements.end(),
              [](const MeasurementKey& x, const MeasurementKey& y) {
                return std::tie(x.is_final_data, x.qubit, x.round) <
                       std::tie(y.is_final_data, y.qubit, y.round);
              });
    for (const auto& [slots, p] : bucket.mechanisms) {
      if (p > 0.0) edge.mechanisms.push_back({p, slots});
    }
    if (bucket.has_classification) {
      if (bucket.final_round) {
        edge.kind = EdgeKind::kFinalRoundCombined;
      } else {
        edge.kind = EdgeKind::kClassificationError;
        if (edge.source_measurements.size() != 1 || !edge.mechanisms.empty()) {
          throw std::runtime_error("bulk classification edge is not a pure classification");
        }
      }
    } else if (signature.size() == 1) {
      edge.kind = EdgeKind::kDataQubitError;
    } else {
      DetectorId a = graph.detector_id(signature[0]);
      DetectorId b = graph.detector_id(signature[1]);
      if (a.ancilla == b.ancilla) {
        edge.kind = EdgeKind::kAncillaQubitError;
      } else if (a.round == b.round) {
        edge.kind = EdgeKind::kDataQubitError;
      } else {
        edge.kind = EdgeKind::kHook;
      }
    }
    graph.edges.push_back(std::move(edge));
  }
  graph.validate();
  return graph;
}

}  // namespace softdec
