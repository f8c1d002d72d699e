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

#include "hsreg/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "hsreg/error.hpp"
#include "hsreg/mlp.hpp"
#include "hsreg/special_functions.hpp"

namespace hsreg {

namespace {

constexpr double kHalfLog2Pi = 0.91893853320467274178;  // 0.5 * ln(2 pi)
constexpr double kQuantileTolerance = 1e-10;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require(bool ok, const std::string& what) {
  if (!ok) throw DomainError(what);
}

bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }

void check_probability(double p) {
  require(p > 0.0 && p < 1.0, "quantile: p must lie in (0, 1), got " + std::to_string(p));
}

// Wilson-Hilferty cube approximation, with the small-x series fallback when
// the cube goes non-positive.
double wilson_hilferty(double k, double p) {
  const double z = normal_quantile(p);
  const double c = 1.0 / (9.0 * k);
  const double t = 1.0 - c + z * std::sqrt(c);
  if (t > 0.0) return k * t * t * t;
  // P(k, x) ~ x^k / Gamma(k + 1) for small x.
  return std::exp((std::log(p) + log_gamma(k + 1.0)) / k);
}

// Solves P(k, x) = p on the unit-scale gamma. Newton steps safeguarded by a
// bisection bracket.
double standard_gamma_quantile(double k, double p) {
  double lo = 0.0;
  double hi = std::max(wilson_hilferty(k, p), 1e-300);
  while (reg_lower_incomplete_gamma(k, hi) < p) {
    lo = hi;
    hi *= 2.0;
    if (!std::isfinite(hi)) throw DomainError("gamma quantile: bracket expansion overflowed");
  }
  double x = std::clamp(wilson_hilferty(k, p), lo, hi);
  if (!(x > lo && x < hi)) x = 0.5 * (lo + hi);
  const double log_norm = log_gamma(k);
  for (int iter = 0; iter < 400; ++iter) {
    const double residual = reg_lower_incomplete_gamma(k, x) - p;
    if (std::abs(residual) <= kQuantileTolerance) return x;
    if (residual < 0.0) {
      lo = x;
    } else {
      hi = x;
    }
    const double density = std::exp((k - 1.0) * std::log(x) - x - log_norm);
    double next = x - residual / density;
    if (!(next > lo && next < hi) || !std::isfinite(next)) next = 0.5 * (lo + hi);
    if (next == x || hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) return x;
    x = next;
  }
  return x;
}

double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

// Linked, floored positive value and its derivative w.r.t. the raw input.
struct Positive {
  double value;
  double d_raw;
};

Positive positive_link(double z) {
  const double s = softplus(z);
  if (s < kScaleFloor) return {kScaleFloor, 0.0};
  return {s, softplus_grad(z)};
}

void check_raw(std::span<const double> raw, std::size_t n) {
  if (raw.size() != n) {
    throw ShapeError("expected " + std::to_string(n) + " raw head outputs, got " +
                     std::to_string(raw.size()));
  }
  for (double v : raw) require(std::isfinite(v), "raw head output is not finite");
}

}  // namespace

const char* to_string(Family family) {
  switch (family) {
    case Family::kGaussian:
      return "gaussian";
    case Family::kLaplace:
      return "laplace";
    case Family::kGamma:
      return "gamma";
  }
  return "?";
}

Family family_from_string(const std::string& name) {
  if (name == "gaussian") return Family::kGaussian;
  if (name == "laplace") return Family::kLaplace;
  if (name == "gamma") return Family::kGamma;
  throw ConfigError("head", "unknown distribution family '" + name + "'");
}

PredictiveDistribution PredictiveDistribution::gaussian(double mu, double sigma) {
  require(std::isfinite(mu) && finite_positive(sigma), "gaussian: need finite mu and sigma > 0");
  return PredictiveDistribution(GaussianParams{mu, sigma});
}

PredictiveDistribution PredictiveDistribution::laplace(double mu, double b) {
  require(std::isfinite(mu) && finite_positive(b), "laplace: need finite mu and b > 0");
  return PredictiveDistribution(LaplaceParams{mu, b});
}

PredictiveDistribution PredictiveDistribution::gamma(double k, double phi) {
  require(finite_positive(k) && finite_positive(phi), "gamma: need k > 0 and phi > 0");
  return PredictiveDistribution(GammaParams{k, phi});
}

Family PredictiveDistribution::family() const noexcept {
  return static_cast<Family>(params_.index());
}

double gaussian_nll(double y, double mu, double sigma) {
  require(sigma > 0.0, "gaussian_nll: sigma must be > 0");
  const double r = (y - mu) / sigma;
  return kHalfLog2Pi + std::log(sigma) + 0.5 * r * r;
}

double laplace_nll(double y, double mu, double b) {
  require(b > 0.0, "laplace_nll: b must be > 0");
  return std::log(2.0 * b) + std::abs(y - mu) / b;
}

double gamma_nll(double y, double k, double phi) {
  require(y > 0.0, "gamma_nll: label " + std::to_string(y) + " outside gamma support (y > 0)");
  require(k > 0.0 && phi > 0.0, "gamma_nll: k and phi must be > 0");
  return log_gamma(k) + k * std::log(phi) - (k - 1.0) * std::log(y) + y / phi;
}

double nll(const PredictiveDistribution& dist, double y) {
  return std::visit(Overloaded{
                        [&](const GaussianParams& g) { return gaussian_nll(y, g.mu, g.sigma); },
                        [&](const LaplaceParams& l) { return laplace_nll(y, l.mu, l.b); },
                        [&](const GammaParams& g) { return gamma_nll(y, g.k, g.phi); },
                    },
                    dist.params());
}

double cdf(const PredictiveDistribution& dist, double x) {
  return std::visit(Overloaded{
                        [&](const GaussianParams& g) { return normal_cdf((x - g.mu) / g.sigma); },
                        [&](const LaplaceParams& l) {
                          const double t = (x - l.mu) / l.b;
                          return t < 0.0 ? 0.5 * std::exp(t) : 1.0 - 0.5 * std::exp(-t);
                        },
                        [&](const GammaParams& g) {
                          return x <= 0.0 ? 0.0 : reg_lower_incomplete_gamma(g.k, x / g.phi);
                        },
                    },
                    dist.params());
}

double mean(const PredictiveDistribution& dist) {
  return std::visit(Overloaded{
                        [](const GaussianParams& g) { return g.mu; },
                        [](const LaplaceParams& l) { return l.mu; },
                        [](const GammaParams& g) { return g.k * g.phi; },
                    },
                    dist.params());
}

double median(const PredictiveDistribution& dist) { return quantile(dist, 0.5); }

double stddev(const PredictiveDistribution& dist) {
  return std::visit(Overloaded{
                        [](const GaussianParams& g) { return g.sigma; },
                        [](const LaplaceParams& l) { return std::numbers::sqrt2 * l.b; },
                        [](const GammaParams& g) { return std::sqrt(g.k) * g.phi; },
                    },
                    dist.params());
}

double quantile(const PredictiveDistribution& dist, double p) {
  check_probability(p);
  return std::visit(Overloaded{
                        [&](const GaussianParams& g) { return g.mu + g.sigma * normal_quantile(p); },
                        [&](const LaplaceParams& l) {
                          return p < 0.5 ? l.mu + l.b * std::log(2.0 * p)
                                         : l.mu - l.b * std::log(2.0 - 2.0 * p);
                        },
                        [&](const GammaParams& g) { return g.phi * standard_gamma_quantile(g.k, p); },
                    },
                    dist.params());
}

PredictiveDistribution distribution_from_raw(Family family, std::span<const double> raw) {
  check_raw(raw, 2);
  switch (family) {
    case Family::kGaussian:
      return PredictiveDistribution::gaussian(raw[0], positive_link(raw[1]).value);
    case Family::kLaplace:
      return PredictiveDistribution::laplace(raw[0], positive_link(raw[1]).value);
    case Family::kGamma:
      return PredictiveDistribution::gamma(positive_link(raw[0]).value,
                                           positive_link(raw[1]).value);
  }
  throw DomainError("distribution_from_raw: unknown family");
}

NllEval nll_and_grad(Family family, double y, std::span<const double> raw) {
  check_raw(raw, 2);
  NllEval out;
  switch (family) {
    case Family::kGaussian: {
      const double mu = raw[0];
      const Positive s = positive_link(raw[1]);
      const double r = y - mu;
      const double inv_var = 1.0 / (s.value * s.value);
      out.value = gaussian_nll(y, mu, s.value);
      out.grad.d_raw[0] = -r * inv_var;
      out.grad.d_raw[1] = (1.0 / s.value - r * r * inv_var / s.value) * s.d_raw;
      break;
    }
    case Family::kLaplace: {
      const double mu = raw[0];
      const Positive b = positive_link(raw[1]);
      const double r = y - mu;
      out.value = laplace_nll(y, mu, b.value);
      out.grad.d_raw[0] = -sign(r) / b.value;
      out.grad.d_raw[1] = (1.0 / b.value - std::abs(r) / (b.value * b.value)) * b.d_raw;
      break;
    }
    case Family::kGamma: {
      const Positive k = positive_link(raw[0]);
      const Positive phi = positive_link(raw[1]);
      out.value = gamma_nll(y, k.value, phi.value);
      out.grad.d_raw[0] = (digamma(k.value) + std::log(phi.value) - std::log(y)) * k.d_raw;
      out.grad.d_raw[1] = (k.value / phi.value - y / (phi.value * phi.value)) * phi.d_raw;
      break;
    }
  }
  return out;
}

NllGrad nll_grad(Family family, double y, std::span<const double> raw) {
  return nll_and_grad(family, y, raw).grad;
}

std::string HeadKind::name() const {
  return std::string(to_string(family)) + (heteroscedastic ? "-hetero" : "-homo");
}

NllEval head_loss(const HeadKind& head, double y, std::span<const double> raw) {
  if (head.heteroscedastic) return nll_and_grad(head.family, y, raw);
  check_raw(raw, 1);
  const double r = y - raw[0];
  NllEval out;
  switch (head.family) {
    case Family::kGaussian:
      out.value = r * r;
      out.grad.d_raw[0] = -2.0 * r;
      break;
    case Family::kLaplace:
      out.value = std::abs(r);
      out.grad.d_raw[0] = -sign(r);
      break;
    case Family::kGamma:
      throw ConfigError("heteroscedastic", "the gamma head has no homoscedastic variant");
  }
  return out;
}

}  // namespace hsreg
