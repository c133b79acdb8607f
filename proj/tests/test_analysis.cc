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

#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "softdec/rng.h"
#include "softdec/sim.h"

using namespace softdec;

namespace {

ShotOutcome outcome(uint64_t id, int rounds, int z_out, int b, double y, uint16_t state = 0) {
  ShotOutcome o;
  o.shot_id = id;
  o.rounds = rounds;
  o.state = state;
  o.z_in = 0;
  o.z_out = z_out;
  o.flip_bit = b;
  o.confidence = y;
  return o;
}

std::vector<FidelityPoint> exact_points(double eps, double r0, const std::vector<int>& rounds,
                                        double sigma) {
  std::vector<FidelityPoint> points;
  for (int r : rounds) {
    FidelityPoint p;
    p.rounds = r;
    p.fidelity = fidelity_model(eps, r0, r);
    p.sigma = sigma;
    p.shots = 100000;
    points.push_back(p);
  }
  return points;
}

}  // namespace

TEST_CASE("fidelity extremes and the binomial error bar") {
  std::vector<ShotOutcome> outcomes;
  for (int i = 0; i < 100; ++i) outcomes.push_back(outcome(i, 4, 0, 0, 0.1));
  auto points = fidelity(outcomes);
  REQUIRE(points.size() == 1);
  CHECK(points[0].fidelity == 1.0);
  CHECK(points[0].sigma == 0.0);

  for (auto& o : outcomes) o.flip_bit = 1;  // always wrong
  points = fidelity(outcomes);
  CHECK(points[0].fidelity == 0.0);

  // 9000 of 10^4 successes: sigma = sqrt(0.9 * 0.1 / 1e4) = 0.003.
  outcomes.clear();
  for (int i = 0; i < 10000; ++i) outcomes.push_back(outcome(i, 8, 0, i < 1000 ? 1 : 0, 0.5));
  points = fidelity(outcomes);
  CHECK(points[0].fidelity == doctest::Approx(0.9).epsilon(1e-12));
  CHECK(points[0].sigma == doctest::Approx(0.003).epsilon(1e-12));
  CHECK(points[0].sigma * points[0].sigma ==
        doctest::Approx(points[0].fidelity * (1 - points[0].fidelity) / points[0].shots)
            .epsilon(1e-12));
  CHECK_THROWS(fidelity({}));
}

TEST_CASE("fidelity averages states uniformly") {
  std::vector<ShotOutcome> outcomes;
  // State 0: 100 shots, all success. State 1: 300 shots, all failure.
  for (int i = 0; i < 100; ++i) outcomes.push_back(outcome(i, 2, 0, 0, 0.5, 0));
  for (int i = 0; i < 300; ++i) outcomes.push_back(outcome(100 + i, 2, 0, 1, 0.5, 3));
  auto points = fidelity(outcomes);
  CHECK(points[0].fidelity == doctest::Approx(0.5).epsilon(1e-12));  // not 0.25
  CHECK(points[0].shots == 400);
}

TEST_CASE("fit_logical recovers exact synthetic decay") {
  auto points = exact_points(0.05, 0.0, {1, 2, 4, 8, 16}, 1e-3);
  LogicalFit fit = fit_logical(points);
  CHECK(std::abs(fit.eps - 0.05) < 1e-9);
  CHECK(std::abs(fit.round_offset - 0.0) < 1e-7);

  auto shifted = exact_points(0.031, 1.7, {1, 2, 4, 8, 16}, 1e-3);
  fit = fit_logical(shifted);
  CHECK(std::abs(fit.eps - 0.031) < 1e-9);
  CHECK(std::abs(fit.round_offset - 1.7) < 1e-6);
}

TEST_CASE("fit_logical is invariant under round relabeling") {
  auto points = exact_points(0.04, 0.5, {1, 2, 4, 8, 16}, 1e-3);
  LogicalFit base = fit_logical(points);
  int shift = 3;
  auto moved = points;
  for (auto& p : moved) p.rounds += shift;
  LogicalFit relabeled = fit_logical(moved);
  CHECK(relabeled.eps == doctest::Approx(base.eps).epsilon(1e-9));
  CHECK(relabeled.round_offset == doctest::Approx(base.round_offset + shift).epsilon(1e-6));
}

TEST_CASE("fit_logical coverage on binomial noise") {
  // 200 repetitions at eps = 0.05, N = 1e5 per point: the 2-sigma interval
  // must cover the truth in at least 95% of trials.
  Rng rng(17, Rng::stream_id("coverage"));
  const double eps_true = 0.05;
  const int64_t n = 100000;
  int covered = 0;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<FidelityPoint> points;
    for (int r : {1, 2, 4, 8, 16}) {
      double f = fidelity_model(eps_true, 0.0, r);
      int64_t successes = 0;
      // Normal approximation to the binomial is fine at n = 1e5.
      double draw = f + std::sqrt(f * (1 - f) / n) * rng.next_gaussian();
      successes = llround(draw * n);
      FidelityPoint p;
      p.rounds = r;
      p.shots = n;
      p.fidelity = static_cast<double>(successes) / n;
      p.sigma = std::sqrt(p.fidelity * (1 - p.fidelity) / n);
      points.push_back(p);
    }
    LogicalFit fit = fit_logical(points);
    if (std::abs(fit.eps - eps_true) <= 2.0 * fit.eps_sigma()) ++covered;
  }
  CHECK(covered >= 190);
}

TEST_CASE("fit_logical needs three points") {
  auto points = exact_points(0.05, 0.0, {4, 8}, 1e-3);
  CHECK_THROWS(fit_logical(points));
  auto few = exact_points(0.05, 0.0, {1, 2, 4}, 1e-3);
  CHECK_THROWS(fit_logical(few, /*include_early_rounds=*/false));
}

TEST_CASE("report formatting of rate and uncertainty") {
  CHECK(format_eps_percent(0.0530, 0.0018) == "5.30 ± 0.18 %");
  CHECK(format_eps_percent(0.0494, 0.0015) == "4.94 ± 0.15 %");
}

TEST_CASE("postselect_confidence budget semantics") {
  std::vector<ShotOutcome> outcomes;
  Rng rng(23, Rng::stream_id("ps"));
  for (int r : {1, 2, 4, 8}) {
    for (int i = 0; i < 250; ++i) {
      outcomes.push_back(
          outcome(outcomes.size(), r, 0, 0, rng.next_double(), static_cast<uint16_t>(i % 16)));
    }
  }
  // Zero budget discards nothing (threshold 0).
  auto none = postselect_confidence(outcomes, PostselectMode::kConstantThreshold, 0);
  CHECK(none.discarded == 0);
  CHECK(none.kept.size() == outcomes.size());
  for (const auto& [r, th] : none.thresholds) CHECK(th == 0.0);

  // Full budget discards everything.
  auto all = postselect_confidence(outcomes, PostselectMode::kConstantThreshold,
                                   static_cast<int64_t>(outcomes.size()));
  CHECK(all.kept.empty());

  // Equal budgets discard equal totals in both modes.
  for (int64_t budget : {100, 377, 800}) {
    auto frac = postselect_confidence(outcomes, PostselectMode::kConstantFraction, budget);
    auto thr = postselect_confidence(outcomes, PostselectMode::kConstantThreshold, budget);
    CHECK(frac.discarded == budget);
    CHECK(thr.discarded == budget);
    CHECK(static_cast<int64_t>(frac.kept.size()) ==
          static_cast<int64_t>(outcomes.size()) - budget);
    CHECK(thr.kept.size() == frac.kept.size());
  }
  // Constant fraction splits the budget evenly across the four groups.
  auto frac = postselect_confidence(outcomes, PostselectMode::kConstantFraction, 400);
  for (const auto& [r, kept] : frac.retained_fraction) {
    CHECK(kept == doctest::Approx(1.0 - 100.0 / 250.0).epsilon(1e-12));
  }
  // Budget above the dataset is rejected.
  CHECK_THROWS(postselect_confidence(outcomes, PostselectMode::kConstantThreshold,
                                     static_cast<int64_t>(outcomes.size()) + 1));
}

TEST_CASE("postselect_confidence tie-break is deterministic by shot id") {
  std::vector<ShotOutcome> outcomes;
  for (int i = 0; i < 10; ++i) outcomes.push_back(outcome(i, 4, 0, 0, 0.5));
  auto sel = postselect_confidence(outcomes, PostselectMode::kConstantThreshold, 4);
  CHECK(sel.discarded == 4);
  REQUIRE(sel.kept.size() == 6);
  for (size_t i = 0; i < sel.kept.size(); ++i) {
    CHECK(sel.kept[i].shot_id == 4 + i);  // lowest ids discarded first on ties
  }
}

TEST_CASE("calibrated confidences: post-selection raises fidelity everywhere") {
  // Perfectly calibrated generator: flip happens with probability y.
  Rng rng(29, Rng::stream_id("mono"));
  std::vector<ShotOutcome> outcomes;
  for (int r : {1, 2, 4, 8}) {
    // Deeper rounds are less confident.
    double spread = 0.05 + 0.04 * r;
    for (int i = 0; i < 20000; ++i) {
      double y = std::clamp(spread * std::abs(rng.next_gaussian()), 0.0, 0.95);
      int flip = rng.bernoulli(y) ? 1 : 0;
      // Decoder answers b = 0 (y < 0.5 throughout), so success iff no flip.
      outcomes.push_back(outcome(outcomes.size(), r, flip, 0, y));
    }
  }
  auto before = fidelity(outcomes);
  auto sel = postselect_confidence(outcomes, PostselectMode::kConstantThreshold, 16000);
  auto after = fidelity(sel.kept);
  REQUIRE(before.size() == after.size());
  for (size_t i = 0; i < before.size(); ++i) {
    double combined =
        std::sqrt(before[i].sigma * before[i].sigma + after[i].sigma * after[i].sigma);
    CHECK(after[i].fidelity > before[i].fidelity - 2.0 * combined);
  }
  // Constant threshold discards relatively more at larger R.
  double first = sel.retained_fraction.begin()->second;
  double last = sel.retained_fraction.rbegin()->second;
  CHECK(last < first);
}

TEST_CASE("confidence_histogram shapes") {
  CHECK_THROWS(confidence_histogram({}, 1));
  auto empty = confidence_histogram({}, 10);
  CHECK(empty.empty());

  std::vector<ShotOutcome> centered;
  for (int i = 0; i < 50; ++i) centered.push_back(outcome(i, 2, 0, 0, 0.5));
  auto hist = confidence_histogram(centered, 10);
  REQUIRE(hist.count(2) == 1);
  int occupied = 0;
  for (const auto& bin : hist[2]) occupied += bin.count > 0 ? 1 : 0;
  CHECK(occupied == 1);
  CHECK(hist[2][5].count == 50);

  // Calibrated uniform confidences: per-bin flip fraction tracks the center.
  Rng rng(31, Rng::stream_id("hist"));
  std::vector<ShotOutcome> uniform;
  for (int i = 0; i < 200000; ++i) {
    double y = rng.next_double();
    uniform.push_back(outcome(i, 4, rng.bernoulli(y) ? 1 : 0, 0, y));
  }
  auto cal = confidence_histogram(uniform, 10);
  for (const auto& bin : cal[4]) {
    double center = 0.5 * (bin.lo + bin.hi);
    double se = std::sqrt(center * (1 - center) / bin.count);
    CHECK(std::abs(bin.flip_fraction - center) < 3.5 * se + 1e-3);
  }
}

TEST_CASE("leakage flags discard shots with any hardened |2>") {
  CodeLayout layout = CodeLayout::surface13();
  ModelSet models = synthetic_model_set(layout, 12.0);
  NoiseParams quiet;
  quiet.p_1q = quiet.p_2q = quiet.p_meas_qubit = quiet.p_meas_class = 0.0;
  quiet.t1_us = quiet.t2_us = 1e9;
  DecodingGraph graph = build_noise_floor_graph(layout, quiet, 6);

  // No leakage injected: nothing flagged.
  for (int i = 0; i < 50; ++i) {
    ShotRecord record = sample_shot(graph, layout, models, {0.0, 0.25}, 0, i, 3);
    CHECK_FALSE(shot_has_leakage(models, record));
  }
  // Injected leakage is caught at the expected rate.
  LeakageConfig leak{0.02, 0.4};
  int flagged = 0, truth = 0, n = 2000;
  for (int i = 0; i < n; ++i) {
    ShotRecord record = sample_shot(graph, layout, models, leak, 0, i, 4);
    bool has = false;
    for (uint8_t l : record.truth->leaked) has |= l != 0;
    truth += has ? 1 : 0;
    flagged += shot_has_leakage(models, record) ? 1 : 0;
  }
  CHECK(flagged == truth);  // sharp clouds: classifier equals truth
  CHECK(flagged > 0);
  // Retention decays with depth: longer runs leak more.
  int flagged_short = 0;
  DecodingGraph short_graph = build_noise_floor_graph(layout, quiet, 1);
  for (int i = 0; i < n; ++i) {
    ShotRecord record = sample_shot(short_graph, layout, models, leak, 0, i, 4);
    flagged_short += shot_has_leakage(models, record) ? 1 : 0;
  }
  CHECK(flagged_short < flagged);
}

TEST_CASE("csv and summary emission") {
  auto points = exact_points(0.05, 0.0, {1, 2, 4}, 1e-3);
  std::string csv = fidelity_csv(points, 0xabcdef);
  CHECK(csv.find("# config_hash=0000000000abcdef") == 0);
  CHECK(csv.find("R,fidelity,sigma,shots") != std::string::npos);
  CHECK(csv.find("\n1,") != std::string::npos);

  LogicalFit fit = fit_logical(exact_points(0.05, 0.0, {1, 2, 4, 8, 16}, 1e-3));
  std::string summary = fit_summary_json(fit, points, R"({"seed": 5})", 7);
  CHECK(summary.find("eps_L") != std::string::npos);
  CHECK(summary.find("config_hash") != std::string::npos);

  std::vector<ShotOutcome> outcomes;
  for (int i = 0; i < 100; ++i) outcomes.push_back(outcome(i, 2, 0, 0, 0.4));
  auto sel = postselect_confidence(outcomes, PostselectMode::kConstantThreshold, 10);
  std::string retained = retained_fraction_csv(sel, outcomes, 7);
  CHECK(retained.find("R,threshold,retained_fraction,total,discarded") != std::string::npos);
  CHECK(retained.find("\n2,") != std::string::npos);
}
