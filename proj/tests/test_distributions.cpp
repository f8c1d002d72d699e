// Copyright 2026 The hsreg Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <array>
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "hsreg/distributions.hpp"
#include "hsreg/error.hpp"
#include "hsreg/mlp.hpp"
#include "oracles/mp_special.hpp"

using namespace hsreg;

namespace {

// Solves P(k, x) = p in 50-digit arithmetic by plain bisection.
double oracle_gamma_quantile(double k, double p) {
  oracle::mp lo = 0, hi = 1;
  while (oracle::reg_lower_gamma(k, hi) < p) hi *= 2;
  for (int i = 0; i < 200; ++i) {
    const oracle::mp mid = (lo + hi) / 2;
    (oracle::reg_lower_gamma(k, mid) < p ? lo : hi) = mid;
  }
  return static_cast<double>((lo + hi) / 2);
}

double composed_nll(Family f, double y, std::array<double, 2> raw) {
  return nll(distribution_from_raw(f, raw), y);
}

}  // namespace

TEST_SUITE("distributions") {

TEST_CASE("Gaussian NLL values") {
  CHECK(gaussian_nll(0, 0, 1) == doctest::Approx(0.918939).epsilon(1e-6));
  CHECK(gaussian_nll(1, 0, 1) == doctest::Approx(1.418939).epsilon(1e-6));
  const double direct = -std::log(std::exp(-0.5 * 4.0) / (0.5 * std::sqrt(2.0 * M_PI)));
  CHECK(gaussian_nll(2, 1, 0.5) == doctest::Approx(direct).epsilon(1e-14));
  CHECK(gaussian_nll(2, 1, 0.5) == doctest::Approx(2.225791).epsilon(1e-6));
  CHECK_THROWS_AS(gaussian_nll(0, 0, 0), DomainError);
}

TEST_CASE("Laplace NLL values") {
  CHECK(laplace_nll(0, 0, 1) == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  CHECK(laplace_nll(1, 0, 1) == doctest::Approx(1.693147).epsilon(1e-6));
  CHECK(laplace_nll(3, 1, 2) == doctest::Approx(std::log(4.0) + 1.0).epsilon(1e-14));
  CHECK_THROWS_AS(laplace_nll(0, 0, -1), DomainError);
}

TEST_CASE("gamma NLL values") {
  CHECK(gamma_nll(1, 1, 1) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(gamma_nll(2, 1, 1) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(gamma_nll(2, 2, 1) == doctest::Approx(2.0 - std::log(2.0)).epsilon(1e-14));
  CHECK_THROWS_AS(gamma_nll(0.0, 2, 1), DomainError);
  CHECK_THROWS_AS(gamma_nll(-1.0, 2, 1), DomainError);
}

TEST_CASE("factory validation") {
  CHECK_THROWS_AS(PredictiveDistribution::gaussian(0, 0), DomainError);
  CHECK_THROWS_AS(PredictiveDistribution::laplace(std::nan(""), 1), DomainError);
  CHECK_THROWS_AS(PredictiveDistribution::gamma(1, -1), DomainError);
  CHECK(PredictiveDistribution::gamma(2, 3).family() == Family::kGamma);
}

TEST_CASE("closed-form gradient examples") {
  // Gaussian with y = mu: no pull on the mean.
  CHECK(nll_grad(Family::kGaussian, 1.5, std::array{1.5, 0.3}).d_raw[0] == 0.0);
  // Laplace: d/dmu = -sign(y - mu) / b.
  const double raw_b = 0.2;
  const double b = softplus(raw_b);
  CHECK(nll_grad(Family::kLaplace, 3.0, std::array{1.0, raw_b}).d_raw[0] ==
        doctest::Approx(-1.0 / b).epsilon(1e-15));
  CHECK(nll_grad(Family::kLaplace, 0.0, std::array{1.0, raw_b}).d_raw[0] ==
        doctest::Approx(1.0 / b).epsilon(1e-15));
}

TEST_CASE("gradients match finite differences of the composed link and NLL") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  std::uniform_real_distribution<double> pos(0.2, 4.0);
  const double h = 1e-6;
  for (Family f : {Family::kGaussian, Family::kLaplace, Family::kGamma}) {
    for (int t = 0; t < 40; ++t) {
      const std::array<double, 2> raw = {f == Family::kGamma ? u(rng) + 1.0 : u(rng), u(rng)};
      const double y = pos(rng);
      const NllGrad g = nll_grad(f, y, raw);
      for (int i = 0; i < 2; ++i) {
        auto up = raw, down = raw;
        up[i] += h;
        down[i] -= h;
        const double fd = (composed_nll(f, y, up) - composed_nll(f, y, down)) / (2 * h);
        const double scale = std::max({std::abs(fd), std::abs(g.d_raw[i]), 1e-3});
        CHECK(std::abs(fd - g.d_raw[i]) / scale < 1e-6);
      }
    }
  }
}

TEST_CASE("nll_and_grad value equals nll of the linked distribution") {
  const std::array raw = {0.4, -0.3};
  for (Family f : {Family::kGaussian, Family::kLaplace, Family::kGamma}) {
    CHECK(nll_and_grad(f, 1.2, raw).value == composed_nll(f, 1.2, raw));
  }
}

TEST_CASE("scale floor clamps the link and zeroes its gradient") {
  const std::array raw = {0.0, -50.0};
  const auto d = distribution_from_raw(Family::kGaussian, raw);
  CHECK(std::get<GaussianParams>(d.params()).sigma == kScaleFloor);
  CHECK(nll_grad(Family::kGaussian, 0.0, raw).d_raw[1] == 0.0);
  CHECK(std::isfinite(nll(d, 1e-7)));
}

TEST_CASE("mean, median and quantile examples") {
  const auto e = PredictiveDistribution::gamma(1, 1);
  CHECK(quantile(e, 0.5) == doctest::Approx(std::log(2.0)).epsilon(1e-9));
  CHECK(quantile(e, 1.0 - std::exp(-1.0)) == doctest::Approx(1.0).epsilon(1e-9));
  const auto g2 = PredictiveDistribution::gamma(2, 1);
  const double ref = oracle_gamma_quantile(2.0, 0.5);
  CHECK(std::abs(median(g2) - ref) < 1e-9);
  CHECK(median(g2) == doctest::Approx(1.678347).epsilon(1e-6));
  CHECK(median(g2) == quantile(g2, 0.5));
  CHECK(mean(PredictiveDistribution::gamma(3.5, 0.25)) == 3.5 * 0.25);
  CHECK(median(PredictiveDistribution::gaussian(2, 0.7)) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(median(PredictiveDistribution::laplace(2, 0.7)) == 2.0);
  CHECK_THROWS_AS(quantile(e, 0.0), DomainError);
  CHECK_THROWS_AS(quantile(e, 1.0), DomainError);
}

TEST_CASE("quantile and cdf round-trip for every family") {
  const std::vector<PredictiveDistribution> dists = {
      PredictiveDistribution::gaussian(1.3, 0.4), PredictiveDistribution::laplace(-0.5, 2.0),
      PredictiveDistribution::gamma(0.5, 2.0),    PredictiveDistribution::gamma(5.0, 0.3),
      PredictiveDistribution::gamma(200.0, 0.01)};
  for (const auto& d : dists) {
    for (int i = 1; i <= 99; ++i) {
      const double p = i / 100.0;
      CHECK(std::abs(cdf(d, quantile(d, p)) - p) <= 1e-8);
    }
  }
}

TEST_CASE("exp(-nll) integrates to one") {
  const std::vector<PredictiveDistribution> dists = {
      PredictiveDistribution::gaussian(1.0, 0.5), PredictiveDistribution::laplace(2.0, 0.3),
      PredictiveDistribution::gamma(3.0, 0.5), PredictiveDistribution::gamma(1.5, 1.2)};
  for (const auto& d : dists) {
    const double lo = d.family() == Family::kGamma ? 1e-9 : mean(d) - 40.0;
    const double hi = mean(d) + 60.0;
    // Composite Simpson over a split at the mean (the Laplace kink).
    auto simpson = [&](double a, double b) {
      const int n = 200000;
      const double h = (b - a) / n;
      double s = std::exp(-nll(d, a)) + std::exp(-nll(d, b));
      for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * std::exp(-nll(d, a + i * h));
      return s * h / 3.0;
    };
    const double total = simpson(lo, mean(d)) + simpson(mean(d), hi);
    CHECK(std::abs(total - 1.0) < 1e-6);
  }
}

TEST_CASE("NLL minimisers over the location: Laplace at the median, Gaussian at the mean") {
  const std::vector<double> sample = {0.3, 1.9, 0.8, 4.2, 1.1, 0.5, 2.7};
  double best_l = 0, best_g = 0, min_l = 1e300, min_g = 1e300;
  for (int i = 0; i <= 50000; ++i) {
    const double mu = i * 1e-4;
    double l = 0, g = 0;
    for (double y : sample) {
      l += laplace_nll(y, mu, 1.0);
      g += gaussian_nll(y, mu, 1.0);
    }
    if (l < min_l) min_l = l, best_l = mu;
    if (g < min_g) min_g = g, best_g = mu;
  }
  CHECK(best_l == doctest::Approx(1.1).epsilon(1e-3));
  double m = 0;
  for (double y : sample) m += y;
  CHECK(best_g == doctest::Approx(m / sample.size()).epsilon(1e-3));
}

TEST_CASE("spread measure per family") {
  CHECK(stddev(PredictiveDistribution::gaussian(0, 0.3)) == 0.3);
  CHECK(stddev(PredictiveDistribution::laplace(0, 0.3)) == doctest::Approx(0.3 * std::sqrt(2.0)));
  CHECK(stddev(PredictiveDistribution::gamma(4, 0.5)) == doctest::Approx(1.0));
}

TEST_CASE("homoscedastic losses and the gamma restriction") {
  const HeadKind g{Family::kGaussian, false};
  const std::array raw = {1.0};
  CHECK(head_loss(g, 3.0, raw).value == 4.0);
  CHECK(head_loss(g, 3.0, raw).grad.d_raw[0] == -4.0);
  const HeadKind l{Family::kLaplace, false};
  CHECK(head_loss(l, 3.0, raw).value == 2.0);
  CHECK(head_loss(l, 3.0, raw).grad.d_raw[0] == -1.0);
  CHECK_THROWS_AS(head_loss(HeadKind{Family::kGamma, false}, 1.0, raw), ConfigError);
  CHECK(HeadKind{Family::kGamma, true}.outputs() == 2);
  CHECK(g.outputs() == 1);
}

TEST_CASE("family names") {
  CHECK(family_from_string("laplace") == Family::kLaplace);
  CHECK_THROWS_AS(family_from_string("weibull"), ConfigError);
}

}  // TEST_SUITE
