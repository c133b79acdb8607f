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

#include "softdec/layout.h"

#include <json.hpp>

#include <algorithm>
#include <map>
#include <stdexcept>

#include "softdec/rng.h"

namespace softdec {

CodeLayout CodeLayout::surface13() {
  CodeLayout layout;
  layout.data_qubits = {"D1", "D2", "D3", "D4", "D5", "D6", "D7", "D8", "D9"};
  layout.ancillas = {"Z1", "Z2", "Z3", "Z4"};
  // Grid (row by row from the bottom-left):
  //   D7 D8 D9
  //   D4 D5 D6
  //   D1 D2 D3
  layout.stabilizer_support = {
      {0, 1, 3, 4},  // Z1: D1 D2 D4 D5
      {2, 5},        // Z2: D3 D6
      {3, 6},        // Z3: D4 D7
      {4, 5, 7, 8},  // Z4: D5 D6 D8 D9
  };
  layout.logical_support = {0, 1, 2};  // bottom row
  // Four-layer CZ dance; weight-2 ancillas idle in two layers.
  layout.cz_schedule = {
      {{0, 4}, {2, 6}, {3, 8}},  // Z1-D5  Z3-D7  Z4-D9
      {{0, 1}, {2, 3}, {3, 5}},  // Z1-D2  Z3-D4  Z4-D6
      {{0, 3}, {1, 5}, {3, 4}},  // Z1-D4  Z2-D6  Z4-D5
      {{0, 0}, {1, 2}, {3, 7}},  // Z1-D1  Z2-D3  Z4-D8
  };
  return layout;
}

void CodeLayout::validate() const {
  int nd = num_data();
  int na = num_ancillas();
  if (nd == 0 || na == 0) throw std::runtime_error("layout: empty qubit lists");
  if (static_cast<int>(stabilizer_support.size()) != na) {
    throw std::runtime_error("layout: one support set required per ancilla");
  }
  std::vector<int> membership(nd, 0);
  for (const auto& support : stabilizer_support) {
    for (int q : support) {
      if (q < 0 || q >= nd) throw std::runtime_error("layout: support index out of range");
      membership[q]++;
    }
  }
  for (int q = 0; q < nd; ++q) {
    if (membership[q] == 0) {
      throw std::runtime_error("layout: data qubit " + data_qubits[q] + " is in no check");
    }
  }
  for (int q : logical_support) {
    if (q < 0 || q >= nd) throw std::runtime_error("layout: logical support out of range");
  }
  // Every (ancilla, data) pair in a support must appear exactly once in the
  // schedule, and nothing else may.
  std::map<std::pair<int, int>, int> scheduled;
  for (const auto& layer : cz_schedule) {
    for (const auto& [a, q] : layer) scheduled[{a, q}]++;
  }
  for (int a = 0; a < na; ++a) {
    for (int q : stabilizer_support[a]) {
      if (scheduled[{a, q}] != 1) {
        throw std::runtime_error("layout: schedule must touch (" + ancillas[a] + "," +
                                 data_qubits[q] + ") exactly once");
      }
      scheduled.erase({a, q});
    }
  }
  if (!scheduled.empty()) throw std::runtime_error("layout: schedule contains non-support pair");
  if (basis_states().empty()) throw std::runtime_error("layout: no valid basis state");
}

std::vector<uint16_t> CodeLayout::basis_states() const {
  std::vector<uint16_t> states;
  int nd = num_data();
  for (uint32_t s = 0; s < (1u << nd); ++s) {
    bool ok = true;
    for (const auto& support : stabilizer_support) {
      int parity = 0;
      for (int q : support) parity ^= (s >> q) & 1;
      if (parity) {
        ok = false;
        break;
      }
    }
    if (ok) {
      int parity = 0;
      for (int q : logical_support) parity ^= (s >> q) & 1;
      ok = parity == 0;
    }
    if (ok) states.push_back(static_cast<uint16_t>(s));
  }
  return states;
}

std::vector<std::pair<int, int>> CodeLayout::degenerate_pairs() const {
  std::vector<std::pair<int, int>> pairs;
  int nd = num_data();
  std::vector<std::vector<int>> signature(nd);
  for (int a = 0; a < num_ancillas(); ++a) {
    for (int q : stabilizer_support[a]) signature[q].push_back(a);
  }
  for (int q1 = 0; q1 < nd; ++q1) {
    for (int q2 = q1 + 1; q2 < nd; ++q2) {
      if (signature[q1] == signature[q2]) pairs.emplace_back(q1, q2);
    }
  }
  return pairs;
}

std::string CodeLayout::state_to_string(uint16_t state) const {
  std::string bits(num_data(), '0');
  for (int q = 0; q < num_data(); ++q) {
    if ((state >> q) & 1) bits[q] = '1';
  }
  return bits;
}

uint16_t CodeLayout::state_from_string(const std::string& bits) const {
  if (static_cast<int>(bits.size()) != num_data()) {
    throw std::invalid_argument("state string must have one bit per data qubit");
  }
  uint16_t state = 0;
  for (int q = 0; q < num_data(); ++q) {
    if (bits[q] == '1') {
      state |= static_cast<uint16_t>(1u << q);
    } else if (bits[q] != '0') {
      throw std::invalid_argument("state string must be binary");
    }
  }
  return state;
}

uint64_t CodeLayout::hash() const { return fnv1a(to_json()); }

std::string CodeLayout::to_json() const {
  nlohmann::json j;
  j["data_qubits"] = data_qubits;
  j["ancillas"] = ancillas;
  j["stabilizer_support"] = stabilizer_support;
  j["logical_support"] = logical_support;
  nlohmann::json sched = nlohmann::json::array();
  for (const auto& layer : cz_schedule) {
    nlohmann::json l = nlohmann::json::array();
    for (const auto& [a, q] : layer) l.push_back({a, q});
    sched.push_back(l);
  }
  j["cz_schedule"] = sched;
  return j.dump();
}

CodeLayout CodeLayout::from_json(const std::string& json_text) {
  nlohmann::json j = nlohmann::json::parse(json_text);
  CodeLayout layout;
  layout.data_qubits = j.at("data_qubits").get<std::vector<std::string>>();
  layout.ancillas = j.at("ancillas").get<std::vector<std::string>>();
  layout.stabilizer_support = j.at("stabilizer_support").get<std::vector<std::vector<int>>>();
  layout.logical_support = j.at("logical_support").get<std::vector<int>>();
  for (const auto& layer : j.at("cz_schedule")) {
    std::vector<std::pair<int, int>> l;
    for (const auto& pair : layer) l.emplace_back(pair.at(0).get<int>(), pair.at(1).get<int>());
    layout.cz_schedule.push_back(std::move(l));
  }
  layout.validate();
  return layout;
}

}  // namespace softdec
