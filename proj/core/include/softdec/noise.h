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

#ifndef SOFTDEC_NOISE_H
#define SOFTDEC_NOISE_H

#include <cmath>
#include <string>

namespace softdec {

/// Circuit-noise parameterization. Gate/reset/measurement probabilities are
/// depolarizing strengths (Pauli W drawn with p/3 after 1q operations, VW
/// with p/15 after 2q gates); idling is the Pauli twirl of amplitude damping
/// and dephasing over the idle duration.
struct NoiseParams {
  double p_1q = 0.5e-3;
  double p_2q = 5e-3;
  double p_reset = 0.0;
  double p_meas_qubit = 1e-3;
  double p_meas_class = 1e-3;
  double t1_us = 30.0;
  double t2_us = 30.0;
  double t_1q_ns = 20.0;
  double t_2q_ns = 60.0;
  double t_meas_ns = 420.0;

  /// Conservative lower-bound values used to stabilize data-derived graphs.
  static NoiseParams floor_defaults() { return NoiseParams{}; }

  void validate() const;
  std::string to_json() const;
  static NoiseParams from_json(const std::string& json_text);
};

/// Twirled idle channel: p_X(t) = p_Y(t) = (1 - exp(-t/T1)) / 4.
inline double idle_pauli_x(double t_ns, double t1_us) {
  return 0.25 * (1.0 - std::exp(-t_ns / (1000.0 * t1_us)));
}

/// p_Z(t) = (1 - exp(-t/T2)) / 2 - (1 - exp(-t/T1)) / 4.
inline double idle_pauli_z(double t_ns, double t1_us, double t2_us) {
  return 0.5 * (1.0 - std::exp(-t_ns / (1000.0 * t2_us))) - idle_pauli_x(t_ns, t1_us);
}

/// Probability that an idle window flips the qubit in the Z basis
/// (X or Y component of the twirl).
inline double idle_flip_probability(double t_ns, double t1_us) {
  return 2.0 * idle_pauli_x(t_ns, t1_us);
}

}  // namespace softdec

#endif
