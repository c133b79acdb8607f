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

#include "softdec/sim.h"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace softdec {

IQSample draw_iq(const ReadoutModel& model, int state, Rng& rng) {
  if (model.mix2d) {
    const auto& m = *model.mix2d;
    double u = rng.next_double();
    int component = 0;
    double acc = 0.0;
    for (int k = 0; k < 3; ++k) {
      acc += m.amps[state][k];
      if (u < acc) {
        component = k;
        break;
      }
      component = k;
    }
    return {m.mu[component][0] + m.sigma * rng.next_gaussian(),
            m.mu[component][1] + m.sigma * rng.next_gaussian()};
  }
  if (model.mix1d) {
    if (state == 2) throw std::runtime_error("model lacks a |2> response");
    const auto& m = *model.mix1d;
    double r = state == 0 ? m.r0 : m.r1;
    double mean = rng.next_double() < r ? m.mu1 : m.mu0;
    double parallel = mean + m.sigma * rng.next_gaussian();
    double perp = m.sigma * rng.next_gaussian();
    const Projection& p = model.projection;
    return {p.origin_i + p.axis_i * parallel - p.axis_q * perp,
            p.origin_q + p.axis_q * parallel + p.axis_i * perp};
  }
  throw std::runtime_error("readout model has no generative fit");
}

ShotRecord sample_shot(const DecodingGraph& graph, const CodeLayout& layout,
                       const ModelSet& models, const LeakageConfig& leakage,
                       uint16_t initial_state, uint64_t shot_id, uint64_t seed,
                       bool with_truth) {
  int na = graph.num_ancillas;
  int nd = graph.num_data;
  int rounds = graph.rounds;
  if (static_cast<int>(models.ancilla.size()) != na ||
      static_cast<int>(models.data.size()) != nd) {
    throw std::invalid_argument("model set does not match the layout");
  }

  Rng rng(seed, Rng::stream_id("shot", shot_id));
  std::vector<uint8_t> toggled(graph.num_measurements(), 0);
  std::vector<uint32_t> fired;

  for (uint32_t e = 0; e < graph.edges.size(); ++e) {
    int count = 0;
    for (const auto& mech : graph.edges[e].mechanisms) {
      if (rng.bernoulli(mech.probability)) {
        ++count;
        for (uint32_t slot : mech.toggle_slots) toggled[slot] ^= 1;
      }
    }
    if (with_truth && count % 2 == 1) fired.push_back(e);
  }

  // Leakage state machine per ancilla. While leaked, the measured response
  // comes from the |2> cloud; on seeping back the accumulated no-reset state
  // is replaced by a fresh random bit.
  std::vector<uint8_t> leaked(na * rounds, 0);
  std::vector<uint8_t> state3(na * rounds, 0);
  for (int a = 0; a < na; ++a) {
    bool is_leaked = false;
    uint8_t offset = 0;
    for (int r = 1; r <= rounds; ++r) {
      int slot = graph.ancilla_slot(a, r);
      if (!is_leaked && leakage.p_leak > 0.0 && rng.bernoulli(leakage.p_leak)) {
        is_leaked = true;
      }
      if (is_leaked) {
        leaked[slot] = 1;
        state3[slot] = 2;
        if (rng.bernoulli(leakage.p_seep)) {
          is_leaked = false;
          offset = static_cast<uint8_t>(rng.next_bool()) ^ (toggled[slot] & 1);
        }
      } else {
        state3[slot] = (toggled[slot] ^ offset) & 1;
      }
    }
  }

  ShotRecord record;
  record.shot_id = shot_id;
  record.rounds = rounds;
  record.initial_state = initial_state;
  record.ancilla_iq.resize(na * rounds);
  record.final_iq.resize(nd);
  for (int a = 0; a < na; ++a) {
    for (int r = 1; r <= rounds; ++r) {
      int slot = graph.ancilla_slot(a, r);
      record.ancilla_iq[slot] = draw_iq(models.ancilla[a], state3[slot], rng);
    }
  }
  for (int q = 0; q < nd; ++q) {
    int bit = ((initial_state >> q) & 1) ^ (toggled[graph.final_data_slot(q)] & 1);
    record.final_iq[q] = draw_iq(models.data[q], bit, rng);
  }

  if (with_truth) {
    ShotTruth truth;
    truth.fired_edges = std::move(fired);
    int flip = 0;
    for (int q : layout.logical_support) flip ^= toggled[graph.final_data_slot(q)] & 1;
    truth.logical_flip = flip != 0;
    truth.leaked = std::move(leaked);
    record.truth = std::move(truth);
  }
  return record;
}

ReadoutModel make_synthetic_model(const std::string& qubit_id, double separation, double r0,
                                  double r1) {
  if (!(separation > 0.0)) throw std::invalid_argument("separation must be positive");
  ReadoutModel model;
  model.qubit_id = qubit_id;
  model.projection = Projection{1.0, 0.0, 0.0, 0.0};
  model.mix1d = GaussianMixture1D{0.0, separation, 1.0, r0, r1};
  GaussianMixture2D m2;
  m2.mu = {{{0.0, 0.0}, {separation, 0.0}, {0.5 * separation, -0.8 * separation}}};
  m2.sigma = 1.0;
  m2.amps = {{{1.0 - r0, r0, 0.0}, {1.0 - r1, r1, 0.0}, {0.0, 0.0, 1.0}}};
  model.mix2d = m2;
  model.priors = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  return model;
}

std::vector<double> analytic_defect_rates(const DecodingGraph& graph) {
  std::vector<double> product(graph.num_detectors(), 1.0);
  for (const auto& edge : graph.edges) {
    for (int node : {edge.node_a, edge.node_b}) {
      if (node != kBoundaryNode) product[node] *= 1.0 - 2.0 * edge.probability;
    }
  }
  std::vector<double> rates(product.size());
  for (size_t i = 0; i < product.size(); ++i) rates[i] = 0.5 * (1.0 - product[i]);
  return rates;
}

std::string models_to_json(const std::vector<ReadoutModel>& models) {
  nlohmann::json j;
  j["kind"] = "softdec-models";
  nlohmann::json map = nlohmann::json::object();
  for (const auto& model : models) {
    map[model.qubit_id] = nlohmann::json::parse(readout_model_to_json(model));
  }
  j["models"] = map;
  return j.dump();
}

std::vector<ReadoutModel> models_from_json(const std::string& json_text) {
  nlohmann::json j = nlohmann::json::parse(json_text);
  if (j.value("kind", "") != "softdec-models") {
    throw std::runtime_error("not a softdec models file (missing kind)");
  }
  std::vector<ReadoutModel> models;
  for (auto it = j.at("models").begin(); it != j.at("models").end(); ++it) {
    models.push_back(readout_model_from_json(it.value().dump()));
  }
  return models;
}

ModelSet assemble_model_set(const CodeLayout& layout, const std::vector<ReadoutModel>& models) {
  std::map<std::string, const ReadoutModel*> by_id;
  for (const auto& m : models) by_id[m.qubit_id] = &m;
  ModelSet set;
  std::string missing;
  for (const auto& name : layout.ancillas) {
    auto it = by_id.find(name);
    if (it == by_id.end()) {
      missing += missing.empty() ? name : ", " + name;
    } else {
      set.ancilla.push_back(*it->second);
    }
  }
  for (const auto& name : layout.data_qubits) {
    auto it = by_id.find(name);
    if (it == by_id.end()) {
      missing += missing.empty() ? name : ", " + name;
    } else {
      set.data.push_back(*it->second);
    }
  }
  if (!missing.empty()) {
    throw std::runtime_error("missing readout models for: " + missing);
  }
  return set;
}

ModelSet synthetic_model_set(const CodeLayout& layout, double separation, double r0, double r1) {
  ModelSet set;
  for (const auto& name : layout.ancillas) {
    set.ancilla.push_back(make_synthetic_model(name, separation, r0, r1));
  }
  for (const auto& name : layout.data_qubits) {
    set.data.push_back(make_synthetic_model(name, separation, r0, r1));
  }
  return set;
}

}  // namespace softdec
