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

#ifndef SOFTDEC_MATCHING_H
#define SOFTDEC_MATCHING_H

#include <utility>
#include <vector>

namespace softdec {

struct MatchingResult {
  double weight = 0.0;
  /// Matched index pairs (i < j), sorted by i.
  std::vector<std::pair<int, int>> pairs;
};

/// Exact minimum-weight perfect matching on a complete graph given a dense
/// symmetric weight matrix (n even, n <= a few hundred). Runs the
/// primal-dual blossom method on integer-scaled weights, so results are
/// deterministic; the returned weight is the double-precision sum over the
/// chosen pairs.
MatchingResult min_weight_perfect_matching(const std::vector<std::vector<double>>& weights);

}  // namespace softdec

#endif
