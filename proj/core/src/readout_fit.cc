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

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "softdec/least_squares.h"
#include "softdec/logging.h"
#include "softdec/numeric.h"
#include "softdec/readout.h"

namespace softdec {

namespace {

constexpr int kMinCalibrationSamples = 100;

void check_samples(const std::vector<IQSample>& samples, const char* label) {
  if (samples.size() < kMinCalibrationSamples) {
    throw std::invalid_argument(std::string("calibration set ") + label + " has fewer than " +
                                std::to_string(kMinCalibrationSamples) + " samples");
  }
  for (const auto& z : samples) {
    if (!std::isfinite(z.i_volt) || !std::isfinite(z.q_volt)) {
      throw std::invalid_argument(std::string("non-finite sample in calibration set ") + label);
    }
  }
}

std::array<double, 2> centroid(const std::vector<IQSample>& samples) {
  double si = 0.0, sq = 0.0;
  for (const auto& z : samples) {
    si += z.i_volt;
    sq += z.q_volt;
  }
  double n = static_cast<double>(samples.size());
  return {si / n, sq / n};
}

double spread_estimate(const std::vector<IQSample>& samples, const std::array<double, 2>& c) {
  double s = 0.0;
  for (const auto& z : samples) {
    double di = z.i_volt - c[0];
    double dq = z.q_volt - c[1];
    s += di * di + dq * dq;
  }
  return std::sqrt(s / (2.0 * samples.size()));
}

Projection projection_between(const std::vector<IQSample>& calib0,
                              const std::vector<IQSample>& calib1) {
  auto c0 = centroid(calib0);
  auto c1 = centroid(calib1);
  double dx = c1[0] - c0[0];
  double dy = c1[1] - c0[1];
  double norm = std::hypot(dx, dy);
  double sigma_est = 0.5 * (spread_estimate(calib0, c0) + spread_estimate(calib1, c1));
  if (norm < 1e-12 * std::max(sigma_est, 1e-300)) {
    throw std::runtime_error("inseparable states: calibration centroids coincide");
  }
  Projection p;
  p.axis_i = dx / norm;
  p.axis_q = dy / norm;
  p.origin_i = c0[0];
  p.origin_q = c0[1];
  return p;
}

std::vector<double> project_all(const Projection& p, const std::vector<IQSample>& samples) {
  std::vector<double> out;
  out.reserve(samples.size());
  for (const auto& z : samples) out.push_back(p(z).value);
  return out;
}

struct TwoStateData {
  std::vector<double> x0;
  std::vector<double> x1;
};

GaussianMixture1D em_two_state(const TwoStateData& data, const FitOptions& options) {
  double n0 = static_cast<double>(data.x0.size());
  double n1 = static_cast<double>(data.x1.size());
  double mean1 = 0.0;
  for (double x : data.x1) mean1 += x;
  mean1 /= n1;

  GaussianMixture1D m;
  m.mu0 = 0.0;
  m.mu1 = mean1;
  double var = 0.0;
  for (double x : data.x0) var += x * x;
  for (double x : data.x1) var += (x - mean1) * (x - mean1);
  m.sigma = std::max(std::sqrt(var / (n0 + n1)), 1e-12);
  m.r0 = 0.02;
  m.r1 = 0.98;

  std::vector<double> g0(data.x0.size()), g1(data.x1.size());
  double prev_ll = -std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    // E step: responsibility of the mu1 component.
    auto responsibility = [&](double x, double r) {
      if (r <= 0.0) return 0.0;
      if (r >= 1.0) return 1.0;
      double la = std::log1p(-r) + log_norm_pdf(x, m.mu0, m.sigma);
      double lb = std::log(r) + log_norm_pdf(x, m.mu1, m.sigma);
      return std::exp(lb - log_add_exp(la, lb));
    };
    double ll = 0.0;
    for (size_t i = 0; i < data.x0.size(); ++i) {
      g0[i] = responsibility(data.x0[i], m.r0);
      ll += m.log_pdf(0, data.x0[i]);
    }
    for (size_t i = 0; i < data.x1.size(); ++i) {
      g1[i] = responsibility(data.x1[i], m.r1);
      ll += m.log_pdf(1, data.x1[i]);
    }
    // M step.
    double w1 = 0.0, w1x = 0.0, w0 = 0.0, w0x = 0.0, s0 = 0.0, s1 = 0.0;
    for (size_t i = 0; i < data.x0.size(); ++i) {
      w1 += g0[i];
      w1x += g0[i] * data.x0[i];
      w0 += 1.0 - g0[i];
      w0x += (1.0 - g0[i]) * data.x0[i];
      s0 += g0[i];
    }
    for (size_t i = 0; i < data.x1.size(); ++i) {
      w1 += g1[i];
      w1x += g1[i] * data.x1[i];
      w0 += 1.0 - g1[i];
      w0x += (1.0 - g1[i]) * data.x1[i];
      s1 += g1[i];
    }
    if (w0 > 0.0) m.mu0 = w0x / w0;
    if (w1 > 0.0) m.mu1 = w1x / w1;
    double var_acc = 0.0;
    for (size_t i = 0; i < data.x0.size(); ++i) {
      double d0 = data.x0[i] - m.mu0, d1 = data.x0[i] - m.mu1;
      var_acc += (1.0 - g0[i]) * d0 * d0 + g0[i] * d1 * d1;
    }
    for (size_t i = 0; i < data.x1.size(); ++i) {
      double d0 = data.x1[i] - m.mu0, d1 = data.x1[i] - m.mu1;
      var_acc += (1.0 - g1[i]) * d0 * d0 + g1[i] * d1 * d1;
    }
    m.sigma = std::max(std::sqrt(var_acc / (n0 + n1)), 1e-12);
    m.r0 = std::clamp(s0 / n0, 0.0, 1.0);
    m.r1 = std::clamp(s1 / n1, 0.0, 1.0);

    if (std::abs(ll - prev_ll) <= options.tolerance * (1.0 + std::abs(ll))) break;
    prev_ll = ll;
  }
  if (m.mu0 > m.mu1) {
    std::swap(m.mu0, m.mu1);
    m.r0 = 1.0 - m.r0;
    m.r1 = 1.0 - m.r1;
  }
  return m;
}

// Histogram backend, following the calibration-fit recipe: project, build
// normalized histograms per prepared state with Freedman-Diaconis bins, then
// least-squares fit the shared double Gaussian to both histograms at once.
struct Histogram {
  std::vector<double> centers;
  std::vector<double> density;
};

Histogram make_histogram(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  size_t n = xs.size();
  double q1 = xs[n / 4];
  double q3 = xs[(3 * n) / 4];
  double iqr = std::max(q3 - q1, 1e-12);
  double width = 2.0 * iqr / std::cbrt(static_cast<double>(n));
  double lo = xs.front(), hi = xs.back();
  int bins = std::max(8, static_cast<int>(std::ceil((hi - lo) / width)));
  Histogram h;
  h.centers.resize(bins);
  h.density.assign(bins, 0.0);
  double bw = (hi - lo) / bins;
  for (int b = 0; b < bins; ++b) h.centers[b] = lo + (b + 0.5) * bw;
  for (double x : xs) {
    int b = std::min(bins - 1, static_cast<int>((x - lo) / bw));
    h.density[b] += 1.0;
  }
  for (double& d : h.density) d /= n * bw;
  return h;
}

GaussianMixture1D histogram_two_state(const TwoStateData& data, const FitOptions& options) {
  Histogram h0 = make_histogram(data.x0);
  Histogram h1 = make_histogram(data.x1);
  GaussianMixture1D init = em_two_state(data, FitOptions{});  // cheap starting point

  auto unpack = [](const std::vector<double>& p) {
    GaussianMixture1D m;
    m.mu0 = p[0];
    m.mu1 = p[1];
    m.sigma = std::exp(p[2]);
    m.r0 = sigmoid(p[3]);
    m.r1 = sigmoid(p[4]);
    return m;
  };
  ResidualFn residuals = [&](const std::vector<double>& p) {
    GaussianMixture1D m = unpack(p);
    std::vector<double> r;
    r.reserve(h0.centers.size() + h1.centers.size());
    for (size_t i = 0; i < h0.centers.size(); ++i)
      r.push_back(h0.density[i] - m.pdf(0, h0.centers[i]));
    for (size_t i = 0; i < h1.centers.size(); ++i)
      r.push_back(h1.density[i] - m.pdf(1, h1.centers[i]));
    return r;
  };
  auto logit = [](double v) {
    v = std::clamp(v, 1e-6, 1.0 - 1e-6);
    return std::log(v / (1.0 - v));
  };
  std::vector<double> p0 = {init.mu0, init.mu1, std::log(init.sigma), logit(init.r0),
                            logit(init.r1)};
  LeastSquaresOptions lm;
  lm.max_iterations = options.max_iterations;
  LeastSquaresResult res = levenberg_marquardt(residuals, p0, lm);
  GaussianMixture1D m = unpack(res.params);
  if (m.mu0 > m.mu1) {
    std::swap(m.mu0, m.mu1);
    m.r0 = 1.0 - m.r0;
    m.r1 = 1.0 - m.r1;
  }
  return m;
}

}  // namespace

ReadoutModel fit_two_state(const std::vector<IQSample>& calib0,
                           const std::vector<IQSample>& calib1, const FitOptions& options) {
  check_samples(calib0, "0");
  check_samples(calib1, "1");
  ReadoutModel model;
  model.projection = projection_between(calib0, calib1);
  model.priors = {0.5, 0.5, 0.0};
  TwoStateData data{project_all(model.projection, calib0), project_all(model.projection, calib1)};
  model.mix1d = (options.backend == FitOptions::Backend::kHistogram)
                    ? histogram_two_state(data, options)
                    : em_two_state(data, options);
  return model;
}

ReadoutModel fit_three_state(const std::vector<IQSample>& calib0,
                             const std::vector<IQSample>& calib1,
                             const std::vector<IQSample>& calib2, const FitOptions& options) {
  check_samples(calib0, "0");
  check_samples(calib1, "1");
  check_samples(calib2, "2");
  ReadoutModel model = fit_two_state(calib0, calib1, options);

  const std::vector<IQSample>* sets[3] = {&calib0, &calib1, &calib2};
  std::array<std::array<double, 2>, 3> mu;
  double sigma_est = 0.0;
  for (int j = 0; j < 3; ++j) {
    mu[j] = centroid(*sets[j]);
    sigma_est += spread_estimate(*sets[j], mu[j]) / 3.0;
  }
  for (int a = 0; a < 3; ++a) {
    for (int b = a + 1; b < 3; ++b) {
      double d = std::hypot(mu[a][0] - mu[b][0], mu[a][1] - mu[b][1]);
      if (d < 1e-12 * std::max(sigma_est, 1e-300)) {
        throw std::runtime_error("coincident centroids for states " + std::to_string(a) +
                                 " and " + std::to_string(b));
      }
    }
  }

  GaussianMixture2D m;
  m.mu = mu;
  m.sigma = std::max(sigma_est, 1e-12);
  for (int j = 0; j < 3; ++j)
    for (int k = 0; k < 3; ++k) m.amps[j][k] = (j == k) ? 0.9 : 0.05;

  double prev_ll = -std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    std::array<std::array<double, 3>, 3> amp_acc{};
    std::array<std::array<double, 2>, 3> mu_acc{};
    std::array<double, 3> comp_w{};
    double var_acc = 0.0, ll = 0.0, n_total = 0.0;

    for (int j = 0; j < 3; ++j) {
      for (const auto& z : *sets[j]) {
        std::array<double, 3> lt;
        double norm = -std::numeric_limits<double>::infinity();
        for (int k = 0; k < 3; ++k) {
          double di = z.i_volt - m.mu[k][0];
          double dq = z.q_volt - m.mu[k][1];
          lt[k] = (m.amps[j][k] > 0.0 ? std::log(m.amps[j][k])
                                      : -std::numeric_limits<double>::infinity()) -
                  0.5 * (di * di + dq * dq) / (m.sigma * m.sigma) - 2.0 * std::log(m.sigma) -
                  kLogTwoPi;
          norm = log_add_exp(norm, lt[k]);
        }
        ll += norm;
        for (int k = 0; k < 3; ++k) {
          double g = std::exp(lt[k] - norm);
          amp_acc[j][k] += g;
          mu_acc[k][0] += g * z.i_volt;
          mu_acc[k][1] += g * z.q_volt;
          comp_w[k] += g;
          double di = z.i_volt - m.mu[k][0];
          double dq = z.q_volt - m.mu[k][1];
          var_acc += g * (di * di + dq * dq);
        }
        n_total += 1.0;
      }
    }

    for (int k = 0; k < 3; ++k) {
      if (comp_w[k] > 0.0) {
        m.mu[k][0] = mu_acc[k][0] / comp_w[k];
        m.mu[k][1] = mu_acc[k][1] / comp_w[k];
      }
    }
    m.sigma = std::max(std::sqrt(var_acc / (2.0 * n_total)), 1e-12);
    for (int j = 0; j < 3; ++j) {
      double n = static_cast<double>(sets[j]->size());
      for (int k = 0; k < 3; ++k) m.amps[j][k] = std::clamp(amp_acc[j][k] / n, 0.0, 1.0);
      double row = m.amps[j][0] + m.amps[j][1] + m.amps[j][2];
      for (int k = 0; k < 3; ++k) m.amps[j][k] /= row;
    }
    if (std::abs(ll - prev_ll) <= options.tolerance * (1.0 + std::abs(ll))) break;
    prev_ll = ll;
  }
  model.mix2d = m;
  model.priors = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  return model;
}

AmplitudeDampingModel fit_amplitude_damping(const std::vector<IQSample>& calib0,
                                            const std::vector<IQSample>& calib1,
                                            const FitOptions& options) {
  check_samples(calib0, "0");
  check_samples(calib1, "1");
  Projection proj = projection_between(calib0, calib1);
  std::vector<double> x0 = project_all(proj, calib0);
  std::vector<double> x1 = project_all(proj, calib1);

  double mean1 = 0.0;
  for (double x : x1) mean1 += x;
  mean1 /= x1.size();
  double var0 = 0.0;
  for (double x : x0) var0 += x * x;
  var0 /= x0.size();

  // Parameters: (mu0, mu1, log alpha, t) with beta = t^2 to keep beta >= 0.
  auto unpack = [](const std::vector<double>& p) {
    AmplitudeDampingModel m;
    m.mu0 = p[0];
    m.mu1 = p[1];
    m.alpha = std::exp(p[2]);
    m.beta = p[3] * p[3];
    return m;
  };
  auto nll = [&](const std::vector<double>& p) {
    AmplitudeDampingModel m = unpack(p);
    if (std::abs(m.mu1 - m.mu0) < 1e-9) return 1e300;
    double acc = 0.0;
    for (double x : x0) acc -= m.log_pdf(0, x);
    for (double x : x1) acc -= m.log_pdf(1, x);
    return acc;
  };
  std::vector<double> p0 = {0.0, mean1, -std::log(std::max(var0, 1e-24)), std::sqrt(0.1)};
  SimplexOptions so;
  so.max_evaluations = std::max(4000, options.max_iterations * 40);
  SimplexResult res = nelder_mead(nll, p0, 0.2, so);
  if (!res.converged) {
    throw std::runtime_error("amplitude-damping fit did not converge (nll=" +
                             std::to_string(res.value) + " after " +
                             std::to_string(res.evaluations) + " evaluations)");
  }
  return unpack(res.params);
}

}  // namespace softdec
