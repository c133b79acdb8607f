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

#include "softdec/analysis.h"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "softdec/least_squares.h"
#include "softdec/logging.h"

namespace softdec {

std::vector<FidelityPoint> fidelity(const std::vector<ShotOutcome>& outcomes) {
  if (outcomes.empty()) throw std::invalid_argument("no outcomes to analyze");
  // rounds -> state -> (successes, total)
  std::map<int, std::map<uint16_t, std::pair<int64_t, int64_t>>> groups;
  for (const auto& o : outcomes) {
    auto& cell = groups[o.rounds][o.state];
    cell.first += o.success() ? 1 : 0;
    cell.second += 1;
  }
  std::vector<FidelityPoint> points;
  for (const auto& [rounds, states] : groups) {
    double mean = 0.0;
    int64_t total = 0;
    for (const auto& [state, cell] : states) {
      if (cell.second == 0) throw std::runtime_error("empty state cell");
      mean += static_cast<double>(cell.first) / cell.second;
      total += cell.second;
    }
    mean /= static_cast<double>(states.size());
    FidelityPoint p;
    p.rounds = rounds;
    p.fidelity = mean;
    p.shots = total;
    p.sigma = std::sqrt(mean * (1.0 - mean) / static_cast<double>(total));
    points.push_back(p);
  }
  return points;
}

double fidelity_model(double eps, double round_offset, double rounds) {
  return 0.5 * (1.0 + std::pow(1.0 - 2.0 * eps, rounds - round_offset));
}

double LogicalFit::eps_sigma() const { return std::sqrt(std::max(covariance[0][0], 0.0)); }
double LogicalFit::offset_sigma() const { return std::sqrt(std::max(covariance[1][1], 0.0)); }

LogicalFit fit_logical(const std::vector<FidelityPoint>& points, bool include_early_rounds) {
  std::vector<FidelityPoint> used;
  for (const auto& p : points) {
    if (!include_early_rounds && p.rounds <= 2) continue;
    used.push_back(p);
  }
  if (used.size() < 3) throw std::invalid_argument("need at least 3 fidelity points");

  // Log-linear starting point from points strictly above 1/2:
  // log(2F - 1) = (R - R0) log(1 - 2 eps).
  double eps0 = 0.05, r0 = 0.0;
  {
    std::vector<std::pair<double, double>> xy;
    for (const auto& p : used) {
      if (p.fidelity > 0.5 + 1e-9) xy.emplace_back(p.rounds, std::log(2.0 * p.fidelity - 1.0));
    }
    if (xy.size() >= 2) {
      double sx = 0, sy = 0, sxx = 0, sxy = 0;
      for (auto [x, y] : xy) {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
      }
      double n = static_cast<double>(xy.size());
      double denom = n * sxx - sx * sx;
      if (std::abs(denom) > 1e-12) {
        double slope = (n * sxy - sx * sy) / denom;
        double intercept = (sy - slope * sx) / n;
        if (slope < -1e-12) {
          eps0 = std::clamp(0.5 * (1.0 - std::exp(slope)), 1e-6, 0.49);
          r0 = -intercept / slope;
        }
      }
    }
  }

  ResidualFn residuals = [&](const std::vector<double>& p) {
    std::vector<double> r(used.size());
    bool valid = p[0] > -0.49 && p[0] < 0.5 - 1e-12;
    for (size_t i = 0; i < used.size(); ++i) {
      double sigma = used[i].sigma > 0.0 ? used[i].sigma : 1.0;
      if (!valid) {
        r[i] = 1e9;
        continue;
      }
      r[i] = (used[i].fidelity - fidelity_model(p[0], p[1], used[i].rounds)) / sigma;
    }
    return r;
  };

  LeastSquaresResult res;
  try {
    res = levenberg_marquardt(residuals, {eps0, r0});
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string("logical fit did not converge: ") + e.what());
  }

  LogicalFit fit;
  fit.eps = std::clamp(res.params[0], 0.0, 0.5);
  fit.round_offset = res.params[1];
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) fit.covariance[i][j] = res.covariance[i][j];
  }
  fit.residuals = res.residuals;
  return fit;
}

std::string format_eps_percent(double eps, double sigma) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f ± %.2f %%", eps * 100.0, sigma * 100.0);
  return buf;
}

bool shot_has_leakage(const ModelSet& models, const ShotRecord& record) {
  int na = static_cast<int>(models.ancilla.size());
  for (int a = 0; a < na; ++a) {
    for (int r = 1; r <= record.rounds; ++r) {
      if (harden(models.ancilla[a], record.ancilla_iq[a * record.rounds + (r - 1)], 3) == 2) {
        return true;
      }
    }
  }
  for (size_t q = 0; q < models.data.size(); ++q) {
    if (harden(models.data[q], record.final_iq[q], 3) == 2) return true;
  }
  return false;
}

ConfidencePostselection postselect_confidence(const std::vector<ShotOutcome>& outcomes,
                                              PostselectMode mode, int64_t budget) {
  if (budget < 0) throw std::invalid_argument("negative post-selection budget");
  if (budget > static_cast<int64_t>(outcomes.size())) {
    throw std::invalid_argument("post-selection budget exceeds the dataset");
  }
  auto margin = [](const ShotOutcome& o) { return std::abs(o.confidence - 0.5); };

  std::map<int, std::vector<const ShotOutcome*>> by_rounds;
  for (const auto& o : outcomes) by_rounds[o.rounds].push_back(&o);

  std::vector<const ShotOutcome*> discard;
  ConfidencePostselection result;

  if (mode == PostselectMode::kConstantFraction) {
    int64_t groups = static_cast<int64_t>(by_rounds.size());
    int64_t quota = budget / groups;
    int64_t remainder = budget % groups;
    // Remainder lands on the largest round counts, where confidence is
    // weakest.
    std::vector<int> rounds_desc;
    for (const auto& [r, v] : by_rounds) rounds_desc.push_back(r);
    std::sort(rounds_desc.rbegin(), rounds_desc.rend());
    std::map<int, int64_t> quotas;
    for (const auto& [r, v] : by_rounds) quotas[r] = quota;
    for (int64_t i = 0; i < remainder; ++i) quotas[rounds_desc[i % rounds_desc.size()]] += 1;

    for (auto& [rounds, group] : by_rounds) {
      int64_t q = quotas[rounds];
      if (q > static_cast<int64_t>(group.size())) {
        throw std::invalid_argument("post-selection budget exceeds a round group");
      }
      std::sort(group.begin(), group.end(), [&](const ShotOutcome* a, const ShotOutcome* b) {
        return std::make_pair(margin(*a), a->shot_id) < std::make_pair(margin(*b), b->shot_id);
      });
      for (int64_t i = 0; i < q; ++i) discard.push_back(group[i]);
      result.thresholds[rounds] = q > 0 ? margin(*group[q - 1]) : 0.0;
    }
  } else {
    std::vector<const ShotOutcome*> all;
    for (const auto& o : outcomes) all.push_back(&o);
    std::sort(all.begin(), all.end(), [&](const ShotOutcome* a, const ShotOutcome* b) {
      return std::make_pair(margin(*a), a->shot_id) < std::make_pair(margin(*b), b->shot_id);
    });
    for (int64_t i = 0; i < budget; ++i) discard.push_back(all[i]);
    double threshold = budget > 0 ? margin(*all[budget - 1]) : 0.0;
    for (const auto& [r, v] : by_rounds) result.thresholds[r] = threshold;
  }

  std::vector<uint8_t> discarded_flag(outcomes.size(), 0);
  std::map<int, int64_t> discarded_per_round;
  for (const ShotOutcome* o : discard) {
    discarded_flag[o - outcomes.data()] = 1;
    discarded_per_round[o->rounds] += 1;
  }
  for (size_t i = 0; i < outcomes.size(); ++i) {
    if (!discarded_flag[i]) result.kept.push_back(outcomes[i]);
  }
  for (const auto& [rounds, group] : by_rounds) {
    int64_t n = static_cast<int64_t>(group.size());
    result.retained_fraction[rounds] =
        n > 0 ? 1.0 - static_cast<double>(discarded_per_round[rounds]) / n : 1.0;
  }
  result.discarded = static_cast<int64_t>(discard.size());
  return result;
}

std::map<int, std::vector<HistogramBin>> confidence_histogram(
    const std::vector<ShotOutcome>& outcomes, int bins) {
  if (bins < 2) throw std::invalid_argument("need at least 2 bins");
  std::map<int, std::vector<HistogramBin>> result;
  std::map<int, std::vector<std::pair<int64_t, int64_t>>> acc;  // (count, flips)
  for (const auto& o : outcomes) {
    auto& v = acc[o.rounds];
    if (v.empty()) v.assign(bins, {0, 0});
    int b = std::min(bins - 1, static_cast<int>(o.confidence * bins));
    b = std::max(0, b);
    v[b].first += 1;
    v[b].second += o.observed_flip();
  }
  for (const auto& [rounds, v] : acc) {
    std::vector<HistogramBin> hist(bins);
    for (int b = 0; b < bins; ++b) {
      hist[b].lo = static_cast<double>(b) / bins;
      hist[b].hi = static_cast<double>(b + 1) / bins;
      hist[b].count = v[b].first;
      hist[b].flip_fraction =
          v[b].first > 0 ? static_cast<double>(v[b].second) / v[b].first : 0.0;
    }
    result[rounds] = std::move(hist);
  }
  return result;
}

namespace {

std::string hash_comment(uint64_t config_hash) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "# config_hash=%016llx\n",
                static_cast<unsigned long long>(config_hash));
  return buf;
}

std::string format_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string fidelity_csv(const std::vector<FidelityPoint>& points, uint64_t config_hash) {
  std::string out = hash_comment(config_hash);
  out += "R,fidelity,sigma,shots\n";
  for (const auto& p : points) {
    out += std::to_string(p.rounds) + "," + format_full(p.fidelity) + "," +
           format_full(p.sigma) + "," + std::to_string(p.shots) + "\n";
  }
  return out;
}

std::string retained_fraction_csv(const ConfidencePostselection& selection,
                                  const std::vector<ShotOutcome>& all_outcomes,
                                  uint64_t config_hash) {
  std::map<int, int64_t> totals;
  for (const auto& o : all_outcomes) totals[o.rounds] += 1;
  std::string out = hash_comment(config_hash);
  out += "R,threshold,retained_fraction,total,discarded\n";
  for (const auto& [rounds, fraction] : selection.retained_fraction) {
    int64_t total = totals[rounds];
    int64_t discarded = total - llround(fraction * total);
    out += std::to_string(rounds) + "," + format_full(selection.thresholds.at(rounds)) + "," +
           format_full(fraction) + "," + std::to_string(total) + "," +
           std::to_string(discarded) + "\n";
  }
  return out;
}

std::string confidence_histogram_csv(const std::vector<HistogramBin>& bins,
                                     uint64_t config_hash) {
  std::string out = hash_comment(config_hash);
  out += "bin_lo,bin_hi,count,flip_fraction\n";
  for (const auto& b : bins) {
    out += format_full(b.lo) + "," + format_full(b.hi) + "," + std::to_string(b.count) + "," +
           format_full(b.flip_fraction) + "\n";
  }
  return out;
}

std::string fit_summary_json(const LogicalFit& fit, const std::vector<FidelityPoint>& points,
                             const std::string& config_json, uint64_t config_hash) {
  nlohmann::json j;
  j["eps_L"] = fit.eps;
  j["eps_L_sigma"] = fit.eps_sigma();
  j["round_offset"] = fit.round_offset;
  j["round_offset_sigma"] = fit.offset_sigma();
  j["covariance"] = fit.covariance;
  j["eps_L_formatted"] = format_eps_percent(fit.eps, fit.eps_sigma());
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& p : points) {
    pts.push_back({{"R", p.rounds},
                   {"fidelity", p.fidelity},
                   {"sigma", p.sigma},
                   {"shots", p.shots}});
  }
  j["fidelity"] = pts;
  j["config"] = nlohmann::json::parse(config_json);
  j["config_hash"] = config_hash;
  return j.dump(2);
}

}  // namespace softdec
