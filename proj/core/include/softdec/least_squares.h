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

#ifndef SOFTDEC_LEAST_SQUARES_H
#define SOFTDEC_LEAST_SQUARES_H

#include <functional>
#include <vector>

namespace softdec {

using ResidualFn = std::function<std::vector<double>(const std::vector<double>&)>;

struct LeastSquaresOptions {
  int max_iterations = 200;
  double ftol = 1e-12;
  double xtol = 1e-12;
};

struct LeastSquaresResult {
  std::vector<double> params;
  /// (J^T J)^-1 at the optimum. When the residuals are pre-scaled by
  /// 1/sigma_i this is the parameter covariance.
  std::vector<std::vector<double>> covariance;
  std::vector<double> residuals;
  double chi2 = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Levenberg-Marquardt with a central-difference Jacobian. Residuals carry
/// any weights; throws std::runtime_error on non-convergence with the final
/// chi2 in the message.
LeastSquaresResult levenberg_marquardt(const ResidualFn& residuals,
                                       std::vector<double> initial,
                                       const LeastSquaresOptions& options = {});

struct SimplexOptions {
  int max_evaluations = 4000;
  double tolerance = 1e-11;
};

struct SimplexResult {
  std::vector<double> params;
  double value = 0.0;
  int evaluations = 0;
  bool converged = false;
};

/// Nelder-Mead simplex minimization for smooth low-dimensional objectives
/// where gradients are inconvenient (maximum-likelihood fits).
SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& objective,
                          std::vector<double> initial, double scale,
                          const SimplexOptions& options = {});

}  // namespace softdec

#endif
