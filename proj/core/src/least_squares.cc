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

#include "softdec/least_squares.h"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace softdec {

namespace {

Eigen::MatrixXd numeric_jacobian(const ResidualFn& residuals, const std::vector<double>& p,
                                 int m) {
  int n = static_cast<int>(p.size());
  Eigen::MatrixXd jac(m, n);
  std::vector<double> pp = p;
  for (int j = 0; j < n; ++j) {
    double h = std::max(1e-7 * std::abs(p[j]), 1e-9);
    pp[j] = p[j] + h;
    std::vector<double> rp = residuals(pp);
    pp[j] = p[j] - h;
    std::vector<double> rm = residuals(pp);
    pp[j] = p[j];
    for (int i = 0; i < m; ++i) {
      jac(i, j) = (rp[i] - rm[i]) / (2.0 * h);
    }
  }
  return jac;
}

double sum_sq(const std::vector<double>& r) {
  double s = 0.0;
  for (double v : r) s += v * v;
  return s;
}

}  // namespace

LeastSquaresResult levenberg_marquardt(const ResidualFn& residuals, std::vector<double> initial,
                                       const LeastSquaresOptions& options) {
  int n = static_cast<int>(initial.size());
  std::vector<double> p = std::move(initial);
  std::vector<double> r = residuals(p);
  int m = static_cast<int>(r.size());
  if (m < n) throw std::invalid_argument("fewer residuals than parameters");

  double chi2 = sum_sq(r);
  double lambda = 1e-3;
  bool converged = false;
  int iter = 0;

  for (; iter < options.max_iterations; ++iter) {
    Eigen::MatrixXd jac = numeric_jacobian(residuals, p, m);
    Eigen::Map<Eigen::VectorXd> rv(r.data(), m);
    Eigen::MatrixXd jtj = jac.transpose() * jac;
    Eigen::VectorXd jtr = jac.transpose() * rv;

    bool stepped = false;
    for (int attempt = 0; attempt < 40; ++attempt) {
      Eigen::MatrixXd damped = jtj;
      for (int k = 0; k < n; ++k) damped(k, k) += lambda * std::max(jtj(k, k), 1e-12);
      Eigen::VectorXd delta = damped.ldlt().solve(-jtr);
      std::vector<double> trial(p);
      for (int k = 0; k < n; ++k) trial[k] += delta[k];
      std::vector<double> rt = residuals(trial);
      double chi2_t = sum_sq(rt);
      if (std::isfinite(chi2_t) && chi2_t <= chi2) {
        double step = delta.cwiseAbs().maxCoeff();
        double drop = chi2 - chi2_t;
        p = std::move(trial);
        r = std::move(rt);
        chi2 = chi2_t;
        lambda = std::max(lambda * 0.3, 1e-12);
        stepped = true;
        if (drop <= options.ftol * (1.0 + chi2) && step <= options.xtol) converged = true;
        break;
      }
      lambda *= 10.0;
      if (lambda > 1e14) break;
    }
    if (converged || !stepped) {
      converged = converged || stepped == false;  // stalled at a (local) optimum
      break;
    }
  }

  LeastSquaresResult result;
  result.params = p;
  result.residuals = r;
  result.chi2 = chi2;
  result.iterations = iter;
  result.converged = converged || iter < options.max_iterations;
  if (!result.converged) {
    throw std::runtime_error("least-squares fit did not converge (chi2=" + std::to_string(chi2) +
                             " after " + std::to_string(iter) + " iterations)");
  }

  Eigen::MatrixXd jac = numeric_jacobian(residuals, p, m);
  Eigen::MatrixXd jtj = jac.transpose() * jac;
  Eigen::MatrixXd cov = jtj.completeOrthogonalDecomposition().pseudoInverse();
  result.covariance.assign(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) result.covariance[i][j] = cov(i, j);
  return result;
}

SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& objective,
                          std::vector<double> initial, double scale,
                          const SimplexOptions& options) {
  int n = static_cast<int>(initial.size());
  std::vector<std::vector<double>> simplex(n + 1, initial);
  for (int i = 0; i < n; ++i) {
    simplex[i + 1][i] += (initial[i] != 0.0) ? scale * std::abs(initial[i]) : scale;
  }
  std::vector<double> values(n + 1);
  int evals = 0;
  for (int i = 0; i <= n; ++i) values[i] = (++evals, objective(simplex[i]));

  auto order = [&]() {
    std::vector<int> idx(n + 1);
    for (int i = 0; i <= n; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return values[a] < values[b]; });
    std::vector<std::vector<double>> s2(n + 1);
    std::vector<double> v2(n + 1);
    for (int i = 0; i <= n; ++i) {
      s2[i] = simplex[idx[i]];
      v2[i] = values[idx[i]];
    }
    simplex = std::move(s2);
    values = std::move(v2);
  };

  while (evals < options.max_evaluations) {
    order();
    if (std::abs(values[n] - values[0]) <=
        options.tolerance * (1.0 + std::abs(values[0]))) {
      return {simplex[0], values[0], evals, true};
    }
    std::vector<double> centroid(n, 0.0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) centroid[j] += simplex[i][j] / n;

    auto blend = [&](double t) {
      std::vector<double> x(n);
      for (int j = 0; j < n; ++j) x[j] = centroid[j] + t * (simplex[n][j] - centroid[j]);
      return x;
    };

    std::vector<double> xr = blend(-1.0);
    double fr = (++evals, objective(xr));
    if (fr < values[0]) {
      std::vector<double> xe = blend(-2.0);
      double fe = (++evals, objective(xe));
      if (fe < fr) {
        simplex[n] = xe;
        values[n] = fe;
      } else {
        simplex[n] = xr;
        values[n] = fr;
      }
    } else if (fr < values[n - 1]) {
      simplex[n] = xr;
      values[n] = fr;
    } else {
      std::vector<double> xc = blend(fr < values[n] ? -0.5 : 0.5);
      double fc = (++evals, objective(xc));
      if (fc < std::min(fr, values[n])) {
        simplex[n] = xc;
        values[n] = fc;
      } else {
        for (int i = 1; i <= n; ++i) {
          for (int j = 0; j < n; ++j)
            simplex[i][j] = simplex[0][j] + 0.5 * (simplex[i][j] - simplex[0][j]);
          values[i] = (++evals, objective(simplex[i]));
        }
      }
    }
  }
  order();
  return {simplex[0], values[0], evals, false};
}

}  // namespace softdec
