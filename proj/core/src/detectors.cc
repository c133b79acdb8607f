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

#include "softdec/detectors.h"

#include <stdexcept>

namespace softdec {

std::vector<uint8_t> detectors_no_reset(const CodeLayout& layout,
                                        const std::vector<uint8_t>& ancilla_outcomes,
                                        const std::vector<uint8_t>& final_data, int rounds) {
  int na = layout.num_ancillas();
  int nd = layout.num_data();
  if (rounds < 1) throw std::invalid_argument("rounds must be >= 1");
  if (static_cast<int>(ancilla_outcomes.size()) != na * rounds) {
    throw std::invalid_argument("ancilla outcome array has wrong shape");
  }
  if (static_cast<int>(final_data.size()) != nd) {
    throw std::invalid_argument("final data array has wrong shape");
  }

  std::vector<uint8_t> defects(na * (rounds + 1), 0);
  auto z = [&](int a, int r) -> uint8_t {
    return r >= 1 ? (ancilla_outcomes[a * rounds + (r - 1)] & 1) : 0;
  };
  for (int a = 0; a < na; ++a) {
    for (int r = 1; r <= rounds; ++r) {
      defects[a * (rounds + 1) + (r - 1)] = z(a, r) ^ z(a, r - 2);
    }
    uint8_t parity = 0;
    for (int q : layout.stabilizer_support[a]) parity ^= final_data[q] & 1;
    defects[a * (rounds + 1) + rounds] = parity ^ z(a, rounds) ^ z(a, rounds - 1);
  }
  return defects;
}

std::vector<double> defect_rates(const std::vector<std::vector<uint8_t>>& defects) {
  if (defects.empty()) throw std::invalid_argument("empty defect dataset");
  std::vector<double> rates(defects.front().size(), 0.0);
  for (const auto& shot : defects) {
    if (shot.size() != rates.size()) throw std::invalid_argument("ragged defect dataset");
    for (size_t i = 0; i < shot.size(); ++i) rates[i] += shot[i] & 1;
  }
  for (double& r : rates) r /= static_cast<double>(defects.size());
  return rates;
}

}  // namespace softdec
