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

#ifndef SOFTDEC_DETECTORS_H
#define SOFTDEC_DETECTORS_H

#include <cstdint>
#include <vector>

#include "softdec/layout.h"

namespace softdec {

/// Defect bits for the no-reset scheme. Ancilla outcomes are the raw
/// hardened measurements z[a][r], indexed a*R + (r-1); final_data holds the
/// hardened final measurement of each data qubit. The result is indexed
/// a*(R+1) + (r-1) for r in 1..R+1:
///   d[a][1]   = z[a][1]
///   d[a][r]   = z[a][r] xor z[a][r-2]            (2 <= r <= R)
///   d[a][R+1] = parity(final over support(a)) xor z[a][R] xor z[a][R-1]
std::vector<uint8_t> detectors_no_reset(const CodeLayout& layout,
                                        const std::vector<uint8_t>& ancilla_outcomes,
                                        const std::vector<uint8_t>& final_data, int rounds);

/// Mean defect fraction per detector over a dataset of defect vectors.
std::vector<double> defect_rates(const std::vector<std::vector<uint8_t>>& defects);

}  // namespace softdec

#endif
