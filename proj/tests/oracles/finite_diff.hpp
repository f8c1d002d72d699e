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

// Central finite differences over every parameter of an MLP.
#ifndef HSREG_TESTS_ORACLES_FINITE_DIFF_HPP_
#define HSREG_TESTS_ORACLES_FINITE_DIFF_HPP_

#include <cmath>
#include <vector>

#include "hsreg/mlp.hpp"

namespace oracle {

// Flattens weights then biases, layer by layer (the for_each_parameter order).
inline std::vector<double> flatten(const hsreg::MlpGradients& g) {
  std::vector<double> out;
  for (std::size_t l = 0; l < g.weight.size(); ++l) {
    for (double w : g.weight[l].flat()) out.push_back(w);
    for (double b : g.bias[l]) out.push_back(b);
  }
  return out;
}

template <typename Loss>
std::vector<double> central_differences(hsreg::MlpModel model, Loss&& loss, double step) {
  std::vector<double*> params;
  hsreg::for_each_parameter(model, [&](double& p) { params.push_back(&p); });
  std::vector<double> out(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double saved = *params[i];
    *params[i] = saved + step;
    const double up = loss(model);
    *params[i] = saved - step;
    const double down = loss(model);
    *params[i] = saved;
    out[i] = (up - down) / (2.0 * step);
  }
  return out;
}

// Relative agreement with an absolute floor for gradients that are ~0.
inline bool gradients_agree(double analytic, double numeric, double rel_tol, double abs_floor) {
  const double diff = std::abs(analytic - numeric);
  return diff <= abs_floor || diff <= rel_tol * std::max(std::abs(analytic), std::abs(numeric));
}

}  // namespace oracle

#endif  // HSREG_TESTS_ORACLES_FINITE_DIFF_HPP_
