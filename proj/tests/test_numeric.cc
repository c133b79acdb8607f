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

#include "softdec/numeric.h"

#include <doctest.h>

#include <cmath>

#include "softdec/least_squares.h"
#include "softdec/rng.h"

using namespace softdec;

TEST_CASE("log_add_exp basic identities") {
  CHECK(log_add_exp(std::log(2.0), std::log(3.0)) == doctest::Approx(std::log(5.0)));
  CHECK(log_add_exp(-1e308, 0.0) == doctest::Approx(0.0));
  CHECK(log_add_exp(1000.0, 1000.0) == doctest::Approx(1000.0 + std::log(2.0)));
}

TEST_CASE("log_diff_exp") {
  CHECK(log_diff_exp(std::log(5.0), std::log(3.0)) == doctest::Approx(std::log(2.0)));
  CHECK(std::isinf(log_diff_exp(1.0, 1.0)));
  CHECK_THROWS(log_diff_exp(0.0, 1.0));
}

TEST_CASE("log_erfc matches erfc in the bulk and is finite in the tail") {
  for (double x : {-3.0, -0.5, 0.0, 1.0, 5.0, 20.0}) {
    CHECK(log_erfc(x) == doctest::Approx(std::log(std::erfc(x))).epsilon(1e-12));
  }
  // Beyond erfc underflow: compare against the quadratic leading term.
  double x = 40.0;
  double approx = -x * x - std::log(x * std::sqrt(M_PI));
  CHECK(log_erfc(x) == doctest::Approx(approx).epsilon(1e-3));
  CHECK(std::isfinite(log_erfc(200.0)));
}

TEST_CASE("quadrature integrates a gaussian to 1") {
  double v = integrate([](double x) { return norm_pdf(x, 0.7, 1.3); }, -20.0, 20.0, 1e-10);
  CHECK(v == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("xor_probability and weights") {
  CHECK(xor_probability(0.1, 0.2) == doctest::Approx(0.26));
  CHECK(xor_probability(0.0, 0.3) == doctest::Approx(0.3));
  CHECK(weight_from_probability(0.5 / (1 + std::exp(1.0)) * 2) > 0.0);
  // w strictly decreasing in p on (0, 0.5).
  double prev = weight_from_probability(1e-6);
  for (double p = 1e-3; p < 0.5; p += 1e-2) {
    double w = weight_from_probability(p);
    CHECK(w < prev);
    CHECK(w > 0.0);
    prev = w;
  }
}

TEST_CASE("rng determinism and stream independence") {
  Rng a(42, Rng::stream_id("x"));
  Rng b(42, Rng::stream_id("x"));
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  Rng c(42, Rng::stream_id("y"));
  bool any_diff = false;
  for (int i = 0; i < 10; ++i) any_diff |= (b.next_u64() != c.next_u64());
  CHECK(any_diff);
}

TEST_CASE("rng gaussian moments") {
  Rng rng(1, Rng::stream_id("gauss"));
  const int n = 200000;
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    double x = rng.next_gaussian();
    s += x;
    s2 += x * x;
  }
  CHECK(s / n == doctest::Approx(0.0).epsilon(0.02));
  CHECK(s2 / n == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("levenberg_marquardt recovers an exponential") {
  // y = 2 exp(-x / 3) sampled exactly.
  std::vector<double> xs, ys;
  for (int i = 0; i < 20; ++i) {
    xs.push_back(0.3 * i);
    ys.push_back(2.0 * std::exp(-0.3 * i / 3.0));
  }
  auto residuals = [&](const std::vector<double>& p) {
    std::vector<double> r(xs.size());
    for (size_t i = 0; i < xs.size(); ++i) r[i] = ys[i] - p[0] * std::exp(-xs[i] / p[1]);
    return r;
  };
  auto res = levenberg_marquardt(residuals, {1.0, 1.0});
  CHECK(res.params[0] == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(res.params[1] == doctest::Approx(3.0).epsilon(1e-8));
}

TEST_CASE("nelder_mead minimizes rosenbrock") {
  auto f = [](const std::vector<double>& p) {
    double a = 1.0 - p[0];
    double b = p[1] - p[0] * p[0];
    return a * a + 100.0 * b * b;
  };
  auto res = nelder_mead(f, {-1.2, 1.0}, 0.5, {20000, 1e-14});
  CHECK(res.params[0] == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(res.params[1] == doctest::Approx(1.0).epsilon(1e-4));
}
