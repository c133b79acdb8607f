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

#ifndef SOFTDEC_LAYOUT_H
#define SOFTDEC_LAYOUT_H

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace softdec {

/// Code geometry and gate schedule for a bit-flip patch: data qubits, the
/// Z-check supports measured by each ancilla, the logical-Z support, and the
/// two-qubit gate schedule the parity checks run on (which fixes the hook
/// error structure).
struct CodeLayout {
  std::vector<std::string> data_qubits;
  std::vector<std::string> ancillas;
  /// stabilizer_support[a] = data-qubit indices in ancilla a's check.
  std::vector<std::vector<int>> stabilizer_support;
  /// Data-qubit indices whose parity defines the logical Z readout.
  std::vector<int> logical_support;
  /// cz_schedule[layer] = (ancilla, data) pairs executed in that layer.
  std::vector<std::vector<std::pair<int, int>>> cz_schedule;

  int num_data() const { return static_cast<int>(data_qubits.size()); }
  int num_ancillas() const { return static_cast<int>(ancillas.size()); }

  /// Nine data qubits in a 3x3 grid read row by row from the bottom-left,
  /// four Z ancillas, logical support on the bottom row.
  static CodeLayout surface13();

  /// Throws std::runtime_error when a data qubit is in no check, when the
  /// schedule disagrees with the supports, or when no basis state satisfies
  /// every parity.
  void validate() const;

  /// All computational basis states (bit q = data qubit q) with even parity
  /// on every stabilizer support and on the logical support, ascending.
  std::vector<uint16_t> basis_states() const;

  /// Data-qubit pairs whose final-round measurement errors trigger identical
  /// defects (same stabilizer membership).
  std::vector<std::pair<int, int>> degenerate_pairs() const;

  /// Bit string "b1..bn" with character q giving data qubit q's bit.
  std::string state_to_string(uint16_t state) const;
  uint16_t state_from_string(const std::string& bits) const;

  uint64_t hash() const;
  std::string to_json() const;
  static CodeLayout from_json(const std::string& json_text);
};

}  // namespace softdec

#endif
