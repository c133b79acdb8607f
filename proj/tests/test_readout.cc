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

#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <cstring>

#include "softdec/numeric.h"
#include "softdec/rng.h"
#include "softdec/sim.h"

using namespace softdec;

namespace {

std::vector<IQSample> gaussian_cloud(Rng& rng, double cx, double cy, double sigma, int n) {
  std::vector<IQSample> samples;
  samples.reserve(n);
  for (int i = 0; i < n; ++i) {
    samples.push_back({cx + sigma * rng.next_gaussian(), cy + sigma * rng.next_gaussian()});
  }
  return samples;
}

std::vector<IQSample> mixed_cloud(Rng& rng, double weight1, double cx0, double cx1, double sigma,
                                  int n) {
  std::vector<IQSample> samples;
  for (int i = 0; i < n; ++i) {
    double cx = rng.next_double() < weight1 ? cx1 : cx0;
    samples.push_back({cx + sigma * rng.next_gaussian(), sigma * rng.next_gaussian()});
  }
  return samples;
}

}  // namespace

TEST_CASE("fit_two_state recovers generating parameters") {
  Rng rng(101, Rng::stream_id("fit2"));
  auto calib0 = gaussian_cloud(rng, 0.0, 0.0, 1.0, 6000);
  auto calib1 = gaussian_cloud(rng, 4.0, 0.0, 1.0, 6000);
  ReadoutModel model = fit_two_state(calib0, calib1);
  REQUIRE(model.mix1d.has_value());
  CHECK(std::abs(model.mix1d->mu0) < 0.08);
  CHECK(model.mix1d->mu1 == doctest::Approx(4.0).epsilon(0.02));
  CHECK(model.mix1d->sigma == doctest::Approx(1.0).epsilon(0.03));
  CHECK(model.mix1d->r0 < 0.02);
  CHECK(model.mix1d->r1 > 0.98);
}

TEST_CASE("fit_two_state recovers a mixed excited-state response") {
  // 10% of the |1> preparations actually sit on the |0> cloud.
  Rng rng(102, Rng::stream_id("fit2mix"));
  auto calib0 = gaussian_cloud(rng, 0.0, 0.0, 1.0, 8000);
  auto calib1 = mixed_cloud(rng, 0.9, 0.0, 4.0, 1.0, 8000);
  ReadoutModel model = fit_two_state(calib0, calib1);
  CHECK(model.mix1d->r1 == doctest::Approx(0.9).epsilon(0.03));
}

TEST_CASE("identical clouds are inseparable") {
  std::vector<IQSample> calib(500, IQSample{1.0, 1.0});
  CHECK_THROWS_WITH_AS(fit_two_state(calib, calib), doctest::Contains("inseparable"),
                       std::runtime_error);
}

TEST_CASE("non-finite and undersized calibration rejected") {
  Rng rng(103, Rng::stream_id("bad"));
  auto good = gaussian_cloud(rng, 0.0, 0.0, 1.0, 500);
  auto far = gaussian_cloud(rng, 5.0, 0.0, 1.0, 500);
  auto bad = far;
  bad[17].i_volt = std::nan("");
  CHECK_THROWS(fit_two_state(good, bad));
  std::vector<IQSample> tiny(far.begin(), far.begin() + 50);
  CHECK_THROWS(fit_two_state(good, tiny));
}

TEST_CASE("histogram backend agrees with the likelihood fit") {
  Rng rng(104, Rng::stream_id("hist"));
  auto calib0 = gaussian_cloud(rng, 0.0, 0.0, 1.0, 20000);
  auto calib1 = mixed_cloud(rng, 0.95, 0.0, 4.0, 1.0, 20000);
  FitOptions hist;
  hist.backend = FitOptions::Backend::kHistogram;
  ReadoutModel model = fit_two_state(calib0, calib1, hist);
  CHECK(std::abs(model.mix1d->mu0) < 0.1);
  CHECK(model.mix1d->mu1 == doctest::Approx(4.0).epsilon(0.03));
  CHECK(model.mix1d->sigma == doctest::Approx(1.0).epsilon(0.05));
  CHECK(std::abs(model.mix1d->r1 - 0.95) < 0.05);
}

TEST_CASE("fit_three_state recovers amplitude rows") {
  Rng rng(105, Rng::stream_id("fit3"));
  std::array<std::array<double, 2>, 3> mu = {{{0, 0}, {5, 0}, {2.5, -5}}};
  std::array<std::array<double, 3>, 3> amps = {
      {{1.0, 0.0, 0.0}, {0.05, 0.95, 0.0}, {0.05, 0.15, 0.80}}};
  auto draw = [&](int state, int n) {
    std::vector<IQSample> out;
    for (int i = 0; i < n; ++i) {
      double u = rng.next_double();
      int k = u < amps[state][0] ? 0 : (u < amps[state][0] + amps[state][1] ? 1 : 2);
      out.push_back({mu[k][0] + rng.next_gaussian(), mu[k][1] + rng.next_gaussian()});
    }
    return out;
  };
  ReadoutModel model = fit_three_state(draw(0, 8000), draw(1, 8000), draw(2, 8000));
  REQUIRE(model.mix2d.has_value());
  for (int j = 0; j < 3; ++j) {
    double row = 0.0;
    for (int k = 0; k < 3; ++k) {
      CHECK(std::abs(model.mix2d->amps[j][k] - amps[j][k]) < 0.02);
      row += model.mix2d->amps[j][k];
    }
    CHECK(row == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(std::abs(model.mix2d->mu[j][0] - mu[j][0]) < 0.06);
    CHECK(std::abs(model.mix2d->mu[j][1] - mu[j][1]) < 0.06);
  }
  CHECK(model.mix2d->sigma == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("fit_three_state pure clouds give the identity") {
  Rng rng(106, Rng::stream_id("fit3id"));
  ReadoutModel model = fit_three_state(gaussian_cloud(rng, 0, 0, 1, 4000),
                                       gaussian_cloud(rng, 6, 0, 1, 4000),
                                       gaussian_cloud(rng, 3, -6, 1, 4000));
  for (int j = 0; j < 3; ++j) {
    for (int k = 0; k < 3; ++k) {
      CHECK(std::abs(model.mix2d->amps[j][k] - (j == k ? 1.0 : 0.0)) < 0.01);
    }
  }
}

TEST_CASE("fit_three_state rejects coincident centroids") {
  Rng rng(107, Rng::stream_id("fit3bad"));
  auto c0 = gaussian_cloud(rng, 0, 0, 1, 500);
  auto c1 = gaussian_cloud(rng, 6, 0, 1, 500);
  CHECK_THROWS_WITH_AS(fit_three_state(c0, c1, c1), doctest::Contains("coincident"),
                       std::runtime_error);
}

TEST_CASE("amplitude damping pdf normalizes and hits the beta=0 limit") {
  AmplitudeDampingModel model{0.0, 4.0, 0.8, 0.35};
  CHECK(integrate([&](double z) { return model.pdf(0, z); }, -30.0, 30.0, 1e-9) ==
        doctest::Approx(1.0).epsilon(1e-6));
  CHECK(integrate([&](double z) { return model.pdf(1, z); }, -30.0, 30.0, 1e-9) ==
        doctest::Approx(1.0).epsilon(1e-6));

  AmplitudeDampingModel pure{0.0, 4.0, 0.8, 0.0};
  double sigma = 1.0 / std::sqrt(0.8);
  for (double z : {-1.0, 2.0, 4.0, 6.5}) {
    CHECK(pure.pdf(1, z) == doctest::Approx(norm_pdf(z, 4.0, sigma)).epsilon(1e-12));
  }
  // Far tails stay finite in log space.
  CHECK(std::isfinite(model.log_pdf(1, 500.0)));
  CHECK(std::isfinite(model.log_pdf(1, -500.0)));
  // Reflecting every coordinate leaves the density unchanged.
  AmplitudeDampingModel flipped{0.0, -4.0, 0.8, 0.35};
  for (double z : {-5.0, -2.0, 0.5}) {
    CHECK(flipped.pdf(1, z) == doctest::Approx(model.pdf(1, -z)).epsilon(1e-12));
  }
}

TEST_CASE("fit_amplitude_damping: beta=0 data fits to nearly zero beta") {
  Rng rng(108, Rng::stream_id("ampdamp0"));
  auto calib0 = gaussian_cloud(rng, 0.0, 0.0, 1.0, 4000);
  auto calib1 = gaussian_cloud(rng, 4.0, 0.0, 1.0, 4000);
  AmplitudeDampingModel model = fit_amplitude_damping(calib0, calib1);
  CHECK(model.beta < 0.05);
  CHECK(std::abs(model.mu1 - model.mu0) == doctest::Approx(4.0).epsilon(0.03));
}

TEST_CASE("fit_amplitude_damping recovers the damping strength") {
  // Forward decay simulation: the qubit decays at an exponential time within
  // the integration window, so the mean response interpolates between the
  // centroids.
  Rng rng(109, Rng::stream_id("ampdamp"));
  const double beta = 0.2, mu0 = 0.0, mu1 = 4.0, sigma = 1.0;
  auto calib0 = gaussian_cloud(rng, mu0, 0.0, sigma, 20000);
  std::vector<IQSample> calib1;
  for (int i = 0; i < 20000; ++i) {
    double u = std::min(-std::log(1.0 - rng.next_double()) / beta, 1.0);
    double mean = u * mu1 + (1.0 - u) * mu0;
    calib1.push_back({mean + sigma * rng.next_gaussian(), sigma * rng.next_gaussian()});
  }
  AmplitudeDampingModel model = fit_amplitude_damping(calib0, calib1);
  CHECK(std::abs(model.beta - 0.2) < 0.03);
  CHECK(integrate([&](double z) { return model.pdf(1, z); }, -30.0, 30.0, 1e-9) ==
        doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("posterior values") {
  ReadoutModel model = make_synthetic_model("q", 4.0);
  // Exact midpoint of the symmetric response.
  auto post = posterior(model, {2.0, 0.7}, 2);
  CHECK(post[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(post[1] == doctest::Approx(0.5).epsilon(1e-12));

  // mu0=-1, mu1=+1, sigma=1, z~=-1: P(0|z) = 1 / (1 + e^-2).
  ReadoutModel shifted;
  shifted.projection = Projection{1.0, 0.0, 0.0, 0.0};
  shifted.mix1d = GaussianMixture1D{-1.0, 1.0, 1.0, 0.0, 1.0};
  auto at_mu0 = posterior(shifted, {-1.0, 0.0}, 2);
  CHECK(at_mu0[0] == doctest::Approx(0.8807970779778823).epsilon(1e-12));

  // Three-state posterior at the |2> centroid.
  ReadoutModel wide = make_synthetic_model("q", 8.0);
  auto at_mu2 = posterior(wide, {4.0, -6.4}, 3);
  CHECK(at_mu2[2] > 0.99);
}

TEST_CASE("harden rules") {
  ReadoutModel model = make_synthetic_model("q", 8.0);
  CHECK(harden(model, {8.0, 0.0}, 2) == 1);
  CHECK(harden(model, {4.0, 0.25}, 2) == 0);  // exact midpoint tie -> lower state
  CHECK(harden(model, {4.0, -6.4}, 3) == 2);
  CHECK(leakage_flag(model, {4.0, -6.4}));
  CHECK_FALSE(leakage_flag(model, {0.0, 0.0}));
}

TEST_CASE("defect_probability values and brute-force oracle") {
  ReadoutModel model = make_synthetic_model("q", 8.0);
  // Saturated posteriors: certain defect.
  CHECK(defect_probability(model, {0.0, 0.0}, {8.0, 0.0}) == doctest::Approx(1.0).epsilon(1e-6));
  // Both measurements fully ambiguous.
  CHECK(defect_probability(model, {4.0, 0.0}, {4.0, 0.0}) == doctest::Approx(0.5).epsilon(1e-12));

  // P(1|now) = 0.9, P(1|prev) = 0.8: enumerate the four state assignments.
  double expected = 0.0;
  for (int know : {0, 1}) {
    for (int kprev : {0, 1}) {
      double p = (know ? 0.9 : 0.1) * (kprev ? 0.8 : 0.2);
      if (know ^ kprev) expected += p;
    }
  }
  CHECK(expected == doctest::Approx(0.26));
  // Invert P(1|z~) = sigmoid(d (z~ - mid)) to place the samples.
  double d = 8.0, mid = 4.0;
  double z_now = mid + std::log(0.9 / 0.1) / d;
  double z_prev = mid + std::log(0.8 / 0.2) / d;
  CHECK(defect_probability(model, {z_now, 0.0}, {z_prev, 0.0}) ==
        doctest::Approx(0.26).epsilon(1e-9));
}

TEST_CASE("posterior sums to one and harden is its argmax (fuzz)") {
  ReadoutModel model = make_synthetic_model("q", 4.0, 0.03, 0.93);
  Rng rng(110, Rng::stream_id("fuzz"));
  for (int i = 0; i < 100000; ++i) {
    IQSample z{-6.0 + 20.0 * rng.next_double(), -12.0 + 20.0 * rng.next_double()};
    int states = (i % 2 == 0) ? 2 : 3;
    auto post = posterior(model, z, states);
    double sum = 0.0;
    int best = 0;
    for (int j = 0; j < states; ++j) {
      REQUIRE(post[j] >= 0.0);
      REQUIRE(post[j] <= 1.0);
      sum += post[j];
      if (post[j] > post[best]) best = j;
    }
    REQUIRE(std::abs(sum - 1.0) < 1e-12);
    REQUIRE(harden(model, z, states) == best);
  }
}

TEST_CASE("soft defect probability crosses 1/2 exactly with the hardened defect") {
  ReadoutModel model = make_synthetic_model("q", 3.0);
  Rng rng(111, Rng::stream_id("defect-fuzz"));
  for (int i = 0; i < 20000; ++i) {
    IQSample now{-4.0 + 11.0 * rng.next_double(), 3.0 * rng.next_gaussian()};
    IQSample prev{-4.0 + 11.0 * rng.next_double(), 3.0 * rng.next_gaussian()};
    int hard_defect = harden(model, now, 2) ^ harden(model, prev, 2);
    double soft = defect_probability(model, now, prev);
    if (std::abs(soft - 0.5) < 1e-9) continue;  // ties excluded
    REQUIRE((soft > 0.5) == (hard_defect == 1));
  }
}

TEST_CASE("Monte-Carlo assignment error matches the Gaussian overlap") {
  // Separation 2 sigma: error = Phi(-1).
  ReadoutModel model = make_synthetic_model("q", 2.0);
  Rng rng(112, Rng::stream_id("assign"));
  const int n = 400000;
  int64_t errors = 0;
  for (int i = 0; i < n; ++i) {
    int state = i % 2;
    IQSample z = draw_iq(model, state, rng);
    if (harden(model, z, 2) != state) ++errors;
  }
  double expected = 0.15865525393145707;
  double rate = static_cast<double>(errors) / n;
  double se = std::sqrt(expected * (1.0 - expected) / n);
  CHECK(std::abs(rate - expected) < 3.0 * se);
  // Quadrature agrees with the closed form.
  CHECK(assignment_error(model) == doctest::Approx(expected).epsilon(1e-6));
}

TEST_CASE("fit_two_state is rotation invariant in its projected parameters") {
  Rng rng(113, Rng::stream_id("rot"));
  auto calib0 = gaussian_cloud(rng, 1.0, -2.0, 1.0, 5000);
  auto calib1 = gaussian_cloud(rng, 4.0, 1.0, 1.0, 5000);
  ReadoutModel base = fit_two_state(calib0, calib1);

  double theta = 1.234;
  auto rotate = [&](const std::vector<IQSample>& in) {
    std::vector<IQSample> out;
    for (const auto& z : in) {
      out.push_back({std::cos(theta) * z.i_volt - std::sin(theta) * z.q_volt,
                     std::sin(theta) * z.i_volt + std::cos(theta) * z.q_volt});
    }
    return out;
  };
  ReadoutModel rotated = fit_two_state(rotate(calib0), rotate(calib1));
  CHECK(rotated.mix1d->mu0 == doctest::Approx(base.mix1d->mu0).epsilon(1e-9));
  CHECK(rotated.mix1d->mu1 == doctest::Approx(base.mix1d->mu1).epsilon(1e-9));
  CHECK(rotated.mix1d->sigma == doctest::Approx(base.mix1d->sigma).epsilon(1e-9));
  CHECK(rotated.mix1d->r0 == doctest::Approx(base.mix1d->r0).epsilon(1e-6));
  CHECK(rotated.mix1d->r1 == doctest::Approx(base.mix1d->r1).epsilon(1e-6));
}

TEST_CASE("every fitted pdf integrates to one") {
  Rng rng(114, Rng::stream_id("norm"));
  auto calib0 = gaussian_cloud(rng, 0.0, 0.0, 1.3, 2000);
  auto calib1 = mixed_cloud(rng, 0.9, 0.0, 3.5, 1.3, 2000);
  ReadoutModel model = fit_two_state(calib0, calib1);
  const auto& m = *model.mix1d;
  for (int state : {0, 1}) {
    CHECK(integrate([&](double z) { return m.pdf(state, z); }, -25.0, 25.0, 1e-9) ==
          doctest::Approx(1.0).epsilon(1e-6));
  }
  // 2D mixture via nested quadrature.
  ReadoutModel m3 = make_synthetic_model("q", 4.0, 0.02, 0.9);
  for (int state : {0, 1, 2}) {
    double v = integrate(
        [&](double x) {
          return integrate([&](double y) { return m3.mix2d->pdf(state, {x, y}); }, -12.0, 10.0,
                           1e-9);
        },
        -8.0, 12.0, 1e-7);
    CHECK(v == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("model JSON round-trips bit-exactly") {
  Rng rng(115, Rng::stream_id("json"));
  auto calib0 = gaussian_cloud(rng, 0.31, -0.77, 0.93, 500);
  auto calib1 = gaussian_cloud(rng, 3.73, 0.21, 0.93, 500);
  ReadoutModel model = fit_two_state(calib0, calib1);
  model.qubit_id = "Z3";
  model.amp_damp = AmplitudeDampingModel{0.013, 3.71, 1.17, 0.083};
  std::string once = readout_model_to_json(model);
  ReadoutModel parsed = readout_model_from_json(once);
  std::string twice = readout_model_to_json(parsed);
  CHECK(once == twice);
  CHECK(std::memcmp(&parsed.mix1d->sigma, &model.mix1d->sigma, sizeof(double)) == 0);
  CHECK(std::memcmp(&parsed.amp_damp->beta, &model.amp_damp->beta, sizeof(double)) == 0);
}

TEST_CASE("calibration file parsing") {
  std::string text = R"({
    "Z1": {"0": [[0.1, 0.2], [0.3, 0.4]], "1": [[1.0, 1.1]]},
    "D2": {"0": [[5, 6]], "1": [[7, 8]], "2": [[9, 10]]}
  })";
  auto sets = load_calibration_json(text);
  REQUIRE(sets.size() == 2);
  CHECK(sets[0].qubit_id == "D2");
  CHECK(sets[1].qubit_id == "Z1");
  CHECK(sets[1].per_state[0].size() == 2);
  CHECK(sets[0].per_state[2].size() == 1);
  CHECK(sets[1].per_state[0][1].q_volt == 0.4);
}
