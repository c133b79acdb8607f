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

#ifndef SOFTDEC_ANALYSIS_H
#define SOFTDEC_ANALYSIS_H

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "softdec/decode.h"

namespace softdec {

/// Decoder verdict for one run, joined with the prepared/observed logical
/// bits. A run is successful when z_in ^ z_out ^ flip_bit == 0.
struct ShotOutcome {
  uint64_t shot_id = 0;
  int rounds = 0;
  uint16_t state = 0;
  int z_in = 0;
  int z_out = 0;
  int flip_bit = 0;
  double confidence = 0.5;

  bool success() const { return ((z_in ^ z_out ^ flip_bit) & 1) == 0; }
  /// True logical flip indicated by the measured outcome.
  int observed_flip() const { return (z_in ^ z_out) & 1; }
};

struct FidelityPoint {
  int rounds = 0;
  double fidelity = 0.0;
  double sigma = 0.0;
  int64_t shots = 0;
};

/// Success fraction per round count, averaged uniformly over the prepared
/// states; sigma^2 = F (1 - F) / N.
std::vector<FidelityPoint> fidelity(const std::vector<ShotOutcome>& outcomes);

/// Fitted decay F(R) = (1 + (1 - 2 eps)^(R - round_offset)) / 2.
struct LogicalFit {
  double eps = 0.0;
  double round_offset = 0.0;
  std::array<std::array<double, 2>, 2> covariance{{{0, 0}, {0, 0}}};
  std::vector<double> residuals;  // weighted, per point

  double eps_sigma() const;
  double offset_sigma() const;
};

double fidelity_model(double eps, double round_offset, double rounds);

/// Weighted (1/sigma^2) nonlinear least squares over all provided points;
/// set include_early_rounds = false to drop R = 1, 2 for stationarity
/// studies. Requires >= 3 usable points.
LogicalFit fit_logical(const std::vector<FidelityPoint>& points,
                       bool include_early_rounds = true);

/// "5.30 ± 0.18 %"
std::string format_eps_percent(double eps, double sigma);

/// True when any measurement in the record hardens to |2> under the
/// three-state classifiers.
bool shot_has_leakage(const ModelSet& models, const ShotRecord& record);

enum class PostselectMode { kConstantFraction, kConstantThreshold };

struct ConfidencePostselection {
  std::vector<ShotOutcome> kept;
  std::map<int, double> thresholds;         // per rounds value
  std::map<int, double> retained_fraction;  // per rounds value
  int64_t discarded = 0;
};

/// Discards the `budget` runs whose confidence sits closest to 1/2, either
/// split evenly across round groups (constant fraction) or through a single
/// global threshold (constant threshold). Ties break by ascending shot id.
ConfidencePostselection postselect_confidence(const std::vector<ShotOutcome>& outcomes,
                                              PostselectMode mode, int64_t budget);

struct HistogramBin {
  double lo = 0.0;
  double hi = 0.0;
  int64_t count = 0;
  double flip_fraction = 0.0;
};

/// Per-round histogram of confidences with the empirical flip fraction of
/// each bin.
std::map<int, std::vector<HistogramBin>> confidence_histogram(
    const std::vector<ShotOutcome>& outcomes, int bins);

// Report emission. Every file starts with a "# config_hash=..." comment.
std::string fidelity_csv(const std::vector<FidelityPoint>& points, uint64_t config_hash);
std::string retained_fraction_csv(const ConfidencePostselection& selection,
                                  const std::vector<ShotOutcome>& all_outcomes,
                                  uint64_t config_hash);
std::string confidence_histogram_csv(const std::vector<HistogramBin>& bins,
                                     uint64_t config_hash);
std::string fit_summary_json(const LogicalFit& fit, const std::vector<FidelityPoint>& points,
                             const std::string& config_json, uint64_t config_hash);

}  // namespace softdec

#endif
