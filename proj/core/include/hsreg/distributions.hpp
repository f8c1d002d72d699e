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

#ifndef HSREG_DISTRIBUTIONS_HPP_
#define HSREG_DISTRIBUTIONS_HPP_

#include <array>
#include <span>
#include <string>
#include <variant>

namespace hsreg {

// Lower bound applied to linked scale/shape outputs before they enter an NLL.
inline constexpr double kScaleFloor = 1e-6;

enum class Family { kGaussian, kLaplace, kGamma };

const char* to_string(Family family);
Family family_from_string(const std::string& name);

struct GaussianParams {
  double mu;
  double sigma;
  friend bool operator==(const GaussianParams&, const GaussianParams&) = default;
};

// b = sqrt(2) * sigma.
struct LaplaceParams {
  double mu;
  double b;
  friend bool operator==(const LaplaceParams&, const LaplaceParams&) = default;
};

// Shape k, scale phi (hours). Mean k * phi.
struct GammaParams {
  double k;
  double phi;
  friend bool operator==(const GammaParams&, const GammaParams&) = default;
};

// Predictive distribution over a duration in hours. Constructors validate
// positivity and finiteness and throw DomainError otherwise.
class PredictiveDistribution {
 public:
  static PredictiveDistribution gaussian(double mu, double sigma);
  static PredictiveDistribution laplace(double mu, double b);
  static PredictiveDistribution gamma(double k, double phi);

  Family family() const noexcept;
  const std::variant<GaussianParams, LaplaceParams, GammaParams>& params() const noexcept {
    return params_;
  }

  friend bool operator==(const PredictiveDistribution&, const PredictiveDistribution&) = default;

 private:
  explicit PredictiveDistribution(std::variant<GaussianParams, LaplaceParams, GammaParams> p)
      : params_(p) {}

  std::variant<GaussianParams, LaplaceParams, GammaParams> params_;
};

// Negative log densities in nats, including all normalising constants.
double gaussian_nll(double y, double mu, double sigma);
double laplace_nll(double y, double mu, double b);
double gamma_nll(double y, double k, double phi);
double nll(const PredictiveDistribution& dist, double y);

double cdf(const PredictiveDistribution& dist, double x);
double mean(const PredictiveDistribution& dist);
double median(const PredictiveDistribution& dist);
double stddev(const PredictiveDistribution& dist);
// Inverse CDF for p in (0, 1). The gamma branch inverts the regularized
// incomplete gamma to |P - p| <= 1e-10.
double quantile(const PredictiveDistribution& dist, double p);

// Raw head layout for a two-output network:
//   Gaussian: (mu, softplus -> sigma)
//   Laplace:  (mu, softplus -> b)
//   Gamma:    (softplus -> k, softplus -> phi)
// Linked scale/shape values are clamped at kScaleFloor.
PredictiveDistribution distribution_from_raw(Family family, std::span<const double> raw);

// d nll / d raw head outputs, chain rule through the links already applied.
struct NllGrad {
  std::array<double, 2> d_raw{0.0, 0.0};
};

struct NllEval {
  double value = 0.0;
  NllGrad grad;
};

NllEval nll_and_grad(Family family, double y, std::span<const double> raw);
NllGrad nll_grad(Family family, double y, std::span<const double> raw);

// Training objective for one head configuration. Heteroscedastic heads use
// their full NLL; homoscedastic Gaussian/Laplace heads use squared/absolute
// error, their fixed-scale maximum-likelihood equivalents.
struct HeadKind {
  Family family = Family::kGaussian;
  bool heteroscedastic = true;

  std::size_t outputs() const noexcept { return heteroscedastic ? 2 : 1; }
  std::string name() const;
  friend bool operator==(const HeadKind&, const HeadKind&) = default;
};

NllEval head_loss(const HeadKind& head, double y, std::span<const double> raw);

}  // namespace hsreg

#endif  // HSREG_DISTRIBUTIONS_HPP_
