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

#ifndef SOFTDEC_NUMERIC_H
#define SOFTDEC_NUMERIC_H

#include <cmath>
#include <functional>

namespace softdec {

constexpr double kLogTwoPi = 1.8378770664093453;

/// log(exp(a) + exp(b)) without overflow.
double log_add_exp(double a, double b);

/// log(exp(a) - exp(b)) for a >= b; returns -inf when a == b.
double log_diff_exp(double a, double b);

/// Density of a 1D normal with mean mu and standard deviation sigma.
double norm_pdf(double x, double mu, double sigma);
double log_norm_pdf(double x, double mu, double sigma);

/// Standard normal CDF.
double norm_cdf(double x);

/// log(erfc(x)), valid for all x including the far tail where erfc underflows.
double log_erfc(double x);

/// Adaptive Simpson quadrature of f over [a, b] to absolute tolerance tol.
double integrate(const std::function<double(double)>& f, double a, double b, double tol);

/// XOR-combination of independent flip probabilities:
/// p (+) q = p(1-q) + q(1-p).
inline double xor_probability(double p, double q) {
  return p * (1.0 - q) + q * (1.0 - p);
}

/// Edge weight from an error probability p in (0, 0.5).
inline double weight_from_probability(double p) {
  return -std::log(p / (1.0 - p));
}

/// Logistic sigmoid.
inline double sigmoid(double x) {
  if (x >= 0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace softdec

#endif
