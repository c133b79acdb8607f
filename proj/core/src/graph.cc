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

#include "softdec/graph.h"

#include <json.hpp>

#include <stdexcept>

namespace softdec {

const char* edge_kind_name(EdgeKind kind) {
  switch (kind) {
    case EdgeKind::kDataQubitError: return "data_qubit";
    case EdgeKind::kAncillaQubitError: return "ancilla_qubit";
    case EdgeKind::kClassificationError: return "classification";
    case EdgeKind::kFinalRoundCombined: return "final_round_combined";
    case EdgeKind::kHook: return "hook";
  }
  return "?";
}

EdgeKind edge_kind_from_name(const std::string& name) {
  if (name == "data_qubit") return EdgeKind::kDataQubitError;
  if (name == "ancilla_qubit") return EdgeKind::kAncillaQubitError;
  if (name == "classification") return EdgeKind::kClassificationError;
  if (name == "final_round_combined") return EdgeKind::kFinalRoundCombined;
  if (name == "hook") return EdgeKind::kHook;
  throw std::invalid_argument("unknown edge kind: " + name);
}

MeasurementKey DecodingGraph::slot_key(uint32_t slot) const {
  int ancilla_slots = num_ancillas * rounds;
  if (static_cast<int>(slot) < ancilla_slots) {
    return {false, static_cast<int>(slot) / rounds, static_cast<int>(slot) % rounds + 1};
  }
  return {true, static_cast<int>(slot) - ancilla_slots, 0};
}

uint32_t DecodingGraph::slot_of_key(const MeasurementKey& key) const {
  return key.is_final_data ? final_data_slot(key.qubit) : ancilla_slot(key.qubit, key.round);
}

std::vector<double> DecodingGraph::base_weights() const {
  std::vector<double> w;
  w.reserve(edges.size());
  for (const auto& e : edges) w.push_back(e.weight());
  return w;
}

void DecodingGraph::validate() const {
  for (const auto& e : edges) {
    if (!(e.probability > 0.0 && e.probability < 0.5)) {
      throw std::runtime_error("edge probability outside (0, 0.5)");
    }
    if (e.node_a == kBoundaryNode && e.node_b == kBoundaryNode) {
      throw std::runtime_error("edge with both endpoints on the boundary");
    }
    for (int n : {e.node_a, e.node_b}) {
      if (n != kBoundaryNode && (n < 0 || n >= num_detectors())) {
        throw std::runtime_error("edge endpoint out of range");
      }
    }
  }
}

std::string DecodingGraph::to_json() const {
  nlohmann::json j;
  j["rounds"] = rounds;
  j["num_ancillas"] = num_ancillas;
  j["num_data"] = num_data;
  nlohmann::json detectors = nlohmann::json::array();
  for (int i = 0; i < num_detectors(); ++i) {
    DetectorId id = detector_id(i);
    detectors.push_back({{"ancilla", id.ancilla}, {"round", id.round}});
  }
  j["detectors"] = detectors;
  nlohmann::json edges_json = nlohmann::json::array();
  for (const auto& e : edges) {
    nlohmann::json je;
    je["a"] = e.node_a;
    je["b"] = e.node_b;
    je["p"] = e.probability;
    je["kind"] = edge_kind_name(e.kind);
    je["logical_flip"] = e.logical_flip;
    nlohmann::json sources = nlohmann::json::array();
    for (const auto& k : e.source_measurements) {
      sources.push_back({{"final", k.is_final_data}, {"qubit", k.qubit}, {"round", k.round}});
    }
    je["source_measurements"] = sources;
    nlohmann::json mechs = nlohmann::json::array();
    for (const auto& m : e.mechanisms) {
      mechs.push_back({{"p", m.probability}, {"toggles", m.toggle_slots}});
    }
    je["mechanisms"] = mechs;
    edges_json.push_back(je);
  }
  j["edges"] = edges_json;
  return j.dump();
}

DecodingGraph DecodingGraph::from_json(const std::string& json_text) {
  nlohmann::json j = nlohmann::json::parse(json_text);
  DecodingGraph g;
  g.rounds = j.at("rounds").get<int>();
  g.num_ancillas = j.at("num_ancillas").get<int>();
  g.num_data = j.at("num_data").get<int>();
  for (const auto& je : j.at("edges")) {
    Edge e;
    e.node_a = je.at("a").get<int>();
    e.node_b = je.at("b").get<int>();
    e.probability = je.at("p").get<double>();
    e.kind = edge_kind_from_name(je.at("kind").get<std::string>());
    e.logical_flip = je.at("logical_flip").get<bool>();
    for (const auto& k : je.at("source_measurements")) {
      e.source_measurements.push_back(
          {k.at("final").get<bool>(), k.at("qubit").get<int>(), k.at("round").get<int>()});
    }
    for (const auto& m : je.at("mechanisms")) {
      Mechanism mech;
      mech.probability = m.at("p").get<double>();
      mech.toggle_slots = m.at("toggles").get<std::vector<uint32_t>>();
      e.mechanisms.push_back(std::move(mech));
    }
    g.edges.push_back(std::move(e));
  }
  g.validate();
  return g;
}

void NoiseParams::validate() const {
  for (double p : {p_1q, p_2q, p_reset, p_meas_qubit, p_meas_class}) {
    if (!(p >= 0.0 && p < 0.5)) throw std::runtime_error("noise probability outside [0, 0.5)");
  }
  for (double t : {t1_us, t2_us, t_1q_ns, t_2q_ns, t_meas_ns}) {
    if (!(t > 0.0)) throw std::runtime_error("noise timescale must be positive");
  }
}

std::string NoiseParams::to_json() const {
  nlohmann::json j;
  j["p_1q"] = p_1q;
  j["p_2q"] = p_2q;
  j["p_reset"] = p_reset;
  j["p_meas_qubit"] = p_meas_qubit;
  j["p_meas_class"] = p_meas_class;
  j["t1_us"] = t1_us;
  j["t2_us"] = t2_us;
  j["t_1q_ns"] = t_1q_ns;
  j["t_2q_ns"] = t_2q_ns;
  j["t_meas_ns"] = t_meas_ns;
  return j.dump();
}

NoiseParams NoiseParams::from_json(const std::string& json_text) {
  nlohmann::json j = nlohmann::json::parse(json_text);
  NoiseParams p;
  p.p_1q = j.value("p_1q", p.p_1q);
  p.p_2q = j.value("p_2q", p.p_2q);
  p.p_reset = j.value("p_reset", p.p_reset);
  p.p_meas_qubit = j.value("p_meas_qubit", p.p_meas_qubit);
  p.p_meas_class = j.value("p_meas_class", p.p_meas_class);
  p.t1_us = j.value("t1_us", p.t1_us);
  p.t2_us = j.value("t2_us", p.t2_us);
  p.t_1q_ns = j.value("t_1q_ns", p.t_1q_ns);
  p.t_2q_ns = j.value("t_2q_ns", p.t_2q_ns);
  p.t_meas_ns = j.value("t_meas_ns", p.t_meas_ns);
  p.validate();
  return p;
}

}  // namespace softdec
