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

#ifndef SOFTDEC_READOUT_H
#define SOFTDEC_READOUT_H

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace softdec {

/// One analog measurement: integrated in-phase and quadrature voltages.
struct IQSample {
  double i_volt = 0.0;
  double q_volt = 0.0;
};

/// Signed coordinate along the projection axis joining the |0> and |1>
/// centroids.
struct ProjectedSample {
  double value = 0.0;
};

/// Mapping from the IQ plane to the projection axis:
/// project(z) = axis . (z - origin), with |axis| = 1 and origin at the
/// |0> calibration centroid.
struct Projection {
  double axis_i = 1.0;
  double axis_q = 0.0;
  double origin_i = 0.0;
  double origin_q = 0.0;

  ProjectedSample operator()(const IQSample& z) const {
    return {axis_i * (z.i_volt - origin_i) + axis_q * (z.q_volt - origin_q)};
  }
};

/// Projected two-state readout response:
///   P(z~ | j) = (1 - r_j) N(z~; mu0, sigma) + r_j N(z~; mu1, sigma).
/// r_j is the weight of the |1>-centroid component in the state-j response.
struct GaussianMixture1D {
  double mu0 = 0.0;
  double mu1 = 1.0;
  double sigma = 1.0;
  double r0 = 0.0;
  double r1 = 1.0;

  double log_pdf(int state, double z) const;
  double pdf(int state, double z) const;
  /// Dominant-peak density P'(z~ | j): only the component centered at mu_j.
  double log_pdf_dominant(int state, double z) const;
};

/// Full-plane three-state response:
///   P(z | j) = A_j N(z; mu[0], s) + B_j N(z; mu[1], s) + C_j N(z; mu[2], s)
/// with isotropic covariance sigma^2 I shared by all components.
struct GaussianMixture2D {
  std::array<std::array<double, 2>, 3> mu{{{0, 0}, {1, 0}, {0, 1}}};
  double sigma = 1.0;
  /// Row j holds (A_j, B_j, C_j); each row sums to 1.
  std::array<std::array<double, 3>, 3> amps{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};

  double log_pdf(int state, const IQSample& z) const;
  double pdf(int state, const IQSample& z) const;
};

/// Physics-derived projected response with qubit decay during the
/// measurement window. alpha is the inverse variance of the Gaussian noise
/// and beta = tau_m / T1 the damping strength:
///   P(z~ | 0) = N(z~; mu0, 1/sqrt(alpha))
///   P(z~ | 1) = exp(-beta) N(z~; mu1, .) + (decay bridge between mu1 and mu0)
struct AmplitudeDampingModel {
  double mu0 = 0.0;
  double mu1 = 1.0;
  double alpha = 1.0;
  double beta = 0.0;

  double log_pdf(int state, double z) const;
  double pdf(int state, double z) const;
};

/// Per-qubit readout description: classifier geometry plus every fitted PDF
/// family. Immutable after fitting; all evaluation members are const and
/// safe to share across threads.
struct ReadoutModel {
  std::string qubit_id;
  Projection projection;
  std::optional<GaussianMixture1D> mix1d;
  std::optional<GaussianMixture2D> mix2d;
  std::optional<AmplitudeDampingModel> amp_damp;
  /// Normalized over however many states a query uses; uniform by default.
  std::array<double, 3> priors{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};

  bool has_two_state() const { return mix1d.has_value() || amp_damp.has_value(); }
  bool has_three_state() const { return mix2d.has_value(); }

  double project(const IQSample& z) const { return projection(z).value; }

  /// log P(z | j) for the requested state count (2 -> projected model,
  /// 3 -> full-plane model).
  double log_pdf(int state, const IQSample& z, int states) const;
  /// log P'(z~ | j): dominant-peak projected density used for soft edge
  /// weights.
  double log_pdf_dominant(int state, const IQSample& z) const;
};

struct FitOptions {
  enum class Backend { kMaximumLikelihood, kHistogram };
  Backend backend = Backend::kMaximumLikelihood;
  int max_iterations = 500;
  double tolerance = 1e-10;
};

/// Fits the projected two-state mixture jointly to both calibration sets
/// (shared means and sigma). The fitted r0 is retained in mix1d; the
/// dominant-peak densities force r0 = 0 and r1 = 1 by construction.
ReadoutModel fit_two_state(const std::vector<IQSample>& calib0,
                           const std::vector<IQSample>& calib1,
                           const FitOptions& options = {});

/// Fits the 2D three-state mixture; the returned model also carries the
/// two-state projection/mix1d fitted from calib0/calib1.
ReadoutModel fit_three_state(const std::vector<IQSample>& calib0,
                             const std::vector<IQSample>& calib1,
                             const std::vector<IQSample>& calib2,
                             const FitOptions& options = {});

/// Maximum-likelihood fit of the amplitude-damping response.
AmplitudeDampingModel fit_amplitude_damping(const std::vector<IQSample>& calib0,
                                            const std::vector<IQSample>& calib1,
                                            const FitOptions& options = {});

/// Posterior P(j | z) over 2 or 3 states; uniform priors unless the model
/// carries explicit ones. Always sums to 1; evaluated in log space.
std::vector<double> posterior(const ReadoutModel& model, const IQSample& z, int states);

/// Maximum-likelihood hardened outcome; ties break toward the lower state.
int harden(const ReadoutModel& model, const IQSample& z, int states);

/// l = 1 iff the three-state hardened outcome is 2.
bool leakage_flag(const ReadoutModel& model, const IQSample& z);

/// P(d = 1 | z_now, z_prev2) for the no-reset detector comparing two
/// measurements of the same ancilla two rounds apart.
double defect_probability(const ReadoutModel& model, const IQSample& z_now,
                          const IQSample& z_prev2);

/// Equal-prior probability that harden() disagrees with the prepared state,
/// averaged over states 0 and 1. Evaluated by quadrature on the projected
/// densities.
double assignment_error(const ReadoutModel& model);

// JSON serialization; doubles round-trip bit-exactly.
std::string readout_model_to_json(const ReadoutModel& model);
ReadoutModel readout_model_from_json(const std::string& json_text);

/// Calibration file: {"<qubit_id>": {"0": [[i,q],...], "1": ..., "2": ...}}.
struct CalibrationSet {
  std::string qubit_id;
  std::array<std::vector<IQSample>, 3> per_state;
};
std::vector<CalibrationSet> load_calibration_json(const std::string& json_text);

}  // namespace softdec

#endif
