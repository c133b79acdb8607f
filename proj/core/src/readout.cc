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

#include "softdec/readout.h"

#include <json.hpp>

#include <cmath>
#include <stdexcept>

#include "softdec/numeric.h"

namespace softdec {

double GaussianMixture1D::log_pdf(int state, double z) const {
  double r = (state == 0) ? r0 : r1;
  double a = log_norm_pdf(z, mu0, sigma);
  double b = log_norm_pdf(z, mu1, sigma);
  if (r <= 0.0) return a;
  if (r >= 1.0) return b;
  return log_add_exp(std::log1p(-r) + a, std::log(r) + b);
}

double GaussianMixture1D::pdf(int state, double z) const { return std::exp(log_pdf(state, z)); }

double GaussianMixture1D::log_pdf_dominant(int state, double z) const {
  return log_norm_pdf(z, state == 0 ? mu0 : mu1, sigma);
}

double GaussianMixture2D::log_pdf(int state, const IQSample& z) const {
  const auto& row = amps[state];
  double best = -std::numeric_limits<double>::infinity();
  std::array<double, 3> terms{};
  for (int k = 0; k < 3; ++k) {
    if (row[k] <= 0.0) {
      terms[k] = -std::numeric_limits<double>::infinity();
      continue;
    }
    double di = z.i_volt - mu[k][0];
    double dq = z.q_volt - mu[k][1];
    terms[k] = std::log(row[k]) - 0.5 * (di * di + dq * dq) / (sigma * sigma) -
               2.0 * std::log(sigma) - kLogTwoPi;
    best = std::max(best, terms[k]);
  }
  if (std::isinf(best)) return best;
  double sum = 0.0;
  for (double t : terms) sum += std::exp(t - best);
  return best + std::log(sum);
}

double GaussianMixture2D::pdf(int state, const IQSample& z) const {
  return std::exp(log_pdf(state, z));
}

double AmplitudeDampingModel::log_pdf(int state, double z) const {
  double sigma = 1.0 / std::sqrt(alpha);
  if (state == 0) return log_norm_pdf(z, mu0, sigma);

  // Mirror so the decay bridge runs toward increasing z~; the density is
  // invariant under reflecting (mu0, mu1, z).
  double m0 = mu0, m1 = mu1, x = z;
  if (m1 < m0) {
    m0 = -m0;
    m1 = -m1;
    x = -x;
  }
  double survived = -beta + log_norm_pdf(x, m1, sigma);
  if (beta <= 0.0) return survived;

  double delta = m1 - m0;
  double shift = sigma * sigma * beta / delta;
  double expo = -beta * (x - m0) / delta + 0.5 * sigma * sigma * beta * beta / (delta * delta);
  double a = (m1 - x + shift) / (std::sqrt(2.0) * sigma);
  double b = (m0 - x + shift) / (std::sqrt(2.0) * sigma);

  // erf(a) - erf(b) = erfc(b) - erfc(a), computed in log space to survive
  // the far tails where both operands collapse.
  double log_bracket;
  if (b >= 0.0) {
    log_bracket = log_diff_exp(log_erfc(b), log_erfc(a));
  } else if (a <= 0.0) {
    log_bracket = log_diff_exp(log_erfc(-a), log_erfc(-b));
  } else {
    log_bracket = std::log(std::erf(a) - std::erf(b));
  }
  if (std::isinf(log_bracket)) return survived;
  double bridge = std::log(beta / (2.0 * delta)) + expo + log_bracket;
  return log_add_exp(survived, bridge);
}

double AmplitudeDampingModel::pdf(int state, double z) const {
  return std::exp(log_pdf(state, z));
}

double ReadoutModel::log_pdf(int state, const IQSample& z, int states) const {
  if (states == 3) {
    if (!mix2d) throw std::runtime_error("readout model has no three-state fit");
    return mix2d->log_pdf(state, z);
  }
  if (states != 2) throw std::invalid_argument("states must be 2 or 3");
  double x = project(z);
  if (mix1d) return mix1d->log_pdf(state, x);
  if (amp_damp) return amp_damp->log_pdf(state, x);
  throw std::runtime_error("readout model has no two-state fit");
}

double ReadoutModel::log_pdf_dominant(int state, const IQSample& z) const {
  double x = project(z);
  if (mix1d) return mix1d->log_pdf_dominant(state, x);
  if (amp_damp) {
    // The closest analog of a dominant peak for the physics model: the
    // undecayed Gaussian at the state's own mean.
    double sigma = 1.0 / std::sqrt(amp_damp->alpha);
    return log_norm_pdf(x, state == 0 ? amp_damp->mu0 : amp_damp->mu1, sigma);
  }
  throw std::runtime_error("readout model has no two-state fit");
}

std::vector<double> posterior(const ReadoutModel& model, const IQSample& z, int states) {
  if (states != 2 && states != 3) throw std::invalid_argument("states must be 2 or 3");
  std::vector<double> log_post(states);
  double prior_sum = 0.0;
  for (int j = 0; j < states; ++j) prior_sum += model.priors[j];
  for (int j = 0; j < states; ++j) {
    double prior = prior_sum > 0.0 ? model.priors[j] / prior_sum : 1.0 / states;
    log_post[j] = model.log_pdf(j, z, states) +
                  (prior > 0.0 ? std::log(prior) : -std::numeric_limits<double>::infinity());
  }
  double norm = log_post[0];
  for (int j = 1; j < states; ++j) norm = log_add_exp(norm, log_post[j]);
  std::vector<double> post(states);
  for (int j = 0; j < states; ++j) post[j] = std::exp(log_post[j] - norm);
  return post;
}

int harden(const ReadoutModel& model, const IQSample& z, int states) {
  std::vector<double> post = posterior(model, z, states);
  int best = 0;
  for (int j = 1; j < states; ++j) {
    if (post[j] > post[best]) best = j;  // ties stay on the lower state
  }
  return best;
}

bool leakage_flag(const ReadoutModel& model, const IQSample& z) {
  return harden(model, z, 3) == 2;
}

double defect_probability(const ReadoutModel& model, const IQSample& z_now,
                          const IQSample& z_prev2) {
  std::vector<double> now = posterior(model, z_now, 2);
  std::vector<double> prev = posterior(model, z_prev2, 2);
  return now[0] * prev[1] + now[1] * prev[0];
}

double assignment_error(const ReadoutModel& model) {
  if (!model.has_two_state()) throw std::runtime_error("readout model has no two-state fit");
  double mu0, mu1, sigma;
  if (model.mix1d) {
    mu0 = model.mix1d->mu0;
    mu1 = model.mix1d->mu1;
    sigma = model.mix1d->sigma;
  } else {
    mu0 = model.amp_damp->mu0;
    mu1 = model.amp_damp->mu1;
    sigma = 1.0 / std::sqrt(model.amp_damp->alpha);
  }
  double lo = std::min(mu0, mu1) - 12.0 * sigma;
  double hi = std::max(mu0, mu1) + 12.0 * sigma;
  auto pdf0 = [&](double x) {
    return model.mix1d ? model.mix1d->pdf(0, x) : model.amp_damp->pdf(0, x);
  };
  auto pdf1 = [&](double x) {
    return model.mix1d ? model.mix1d->pdf(1, x) : model.amp_damp->pdf(1, x);
  };
  // Equal-prior maximum-likelihood classifier: error = 1/2 integral min(P0, P1).
  return 0.5 * integrate([&](double x) { return std::min(pdf0(x), pdf1(x)); }, lo, hi, 1e-10);
}

namespace {

using nlohmann::json;

json projection_to_json(const Projection& p) {
  return json{{"axis", {p.axis_i, p.axis_q}}, {"origin", {p.origin_i, p.origin_q}}};
}

Projection projection_from_json(const json& j) {
  Projection p;
  p.axis_i = j.at("axis").at(0).get<double>();
  p.axis_q = j.at("axis").at(1).get<double>();
  p.origin_i = j.at("origin").at(0).get<double>();
  p.origin_q = j.at("origin").at(1).get<double>();
  return p;
}

}  // namespace

std::string readout_model_to_json(const ReadoutModel& model) {
  json j;
  j["qubit_id"] = model.qubit_id;
  j["projection"] = projection_to_json(model.projection);
  j["priors"] = model.priors;
  if (model.mix1d) {
    const auto& m = *model.mix1d;
    j["mix1d"] = {{"mu0", m.mu0}, {"mu1", m.mu1}, {"sigma", m.sigma}, {"r0", m.r0}, {"r1", m.r1}};
  }
  if (model.mix2d) {
    const auto& m = *model.mix2d;
    j["mix2d"] = {{"mu", m.mu}, {"sigma", m.sigma}, {"amps", m.amps}};
  }
  if (model.amp_damp) {
    const auto& m = *model.amp_damp;
    j["amp_damp"] = {{"mu0", m.mu0}, {"mu1", m.mu1}, {"alpha", m.alpha}, {"beta", m.beta}};
  }
  return j.dump();
}

ReadoutModel readout_model_from_json(const std::string& json_text) {
  json j = json::parse(json_text);
  ReadoutModel model;
  model.qubit_id = j.at("qubit_id").get<std::string>();
  model.projection = projection_from_json(j.at("projection"));
  model.priors = j.at("priors").get<std::array<double, 3>>();
  if (j.contains("mix1d")) {
    const auto& m = j["mix1d"];
    model.mix1d = GaussianMixture1D{m.at("mu0"), m.at("mu1"), m.at("sigma"), m.at("r0"),
                                    m.at("r1")};
  }
  if (j.contains("mix2d")) {
    const auto& m = j["mix2d"];
    GaussianMixture2D g;
    g.mu = m.at("mu").get<std::array<std::array<double, 2>, 3>>();
    g.sigma = m.at("sigma").get<double>();
    g.amps = m.at("amps").get<std::array<std::array<double, 3>, 3>>();
    model.mix2d = g;
  }
  if (j.contains("amp_damp")) {
    const auto& m = j["amp_damp"];
    model.amp_damp =
        AmplitudeDampingModel{m.at("mu0"), m.at("mu1"), m.at("alpha"), m.at("beta")};
  }
  return model;
}

std::vector<CalibrationSet> load_calibration_json(const std::string& json_text) {
  json j = json::parse(json_text);
  std::vector<CalibrationSet> sets;
  for (auto it = j.begin(); it != j.end(); ++it) {
    CalibrationSet set;
    set.qubit_id = it.key();
    for (int state = 0; state < 3; ++state) {
      std::string key = std::to_string(state);
      if (!it.value().contains(key)) continue;
      for (const auto& pair : it.value().at(key)) {
        set.per_state[state].push_back({pair.at(0).get<double>(), pair.at(1).get<double>()});
      }
    }
    sets.push_back(std::move(set));
  }
  return sets;
}

}  // namespace softdec
