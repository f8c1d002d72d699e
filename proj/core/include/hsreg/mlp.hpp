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

#ifndef HSREG_MLP_HPP_
#define HSREG_MLP_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "hsreg/dense_matrix.hpp"

namespace hsreg {

double softplus(double z);
// Logistic sigmoid, the derivative of softplus.
double softplus_grad(double z);
// Inverse of softplus for y > 0.
double inverse_softplus(double y);

enum class Link { kIdentity, kSoftplus };

const char* to_string(Link link);
Link link_from_string(const std::string& name);
double apply_link(Link link, double z);

// Output layer description: one link per output. One output means a
// homoscedastic point model, two outputs a heteroscedastic distribution head.
struct HeadSpec {
  std::vector<Link> links;

  std::size_t outputs() const noexcept { return links.size(); }
  friend bool operator==(const HeadSpec&, const HeadSpec&) = default;
};

// Fully connected layer. `weight` is fan_in x fan_out so a batch is
// propagated as batch * weight + bias.
struct DenseLayer {
  DenseMatrix weight;
  std::vector<double> bias;

  std::size_t fan_in() const noexcept { return weight.rows(); }
  std::size_t fan_out() const noexcept { return weight.cols(); }
  friend bool operator==(const DenseLayer&, const DenseLayer&) = default;
};

// ReLU multilayer perceptron. Dropout acts on hidden activations only.
struct MlpModel {
  std::vector<DenseLayer> layers;
  HeadSpec head;
  double dropout_rate = 0.0;
  std::uint64_t rng_seed = 0;
  std::string schema_hash;

  std::size_t input_dim() const;
  std::size_t output_dim() const;
  std::size_t hidden_layer_count() const { return layers.empty() ? 0 : layers.size() - 1; }
  std::size_t parameter_count() const;

  // Throws ShapeError / ConfigError if the layer chain or head is inconsistent.
  void validate() const;

  friend bool operator==(const MlpModel&, const MlpModel&) = default;
};

// Builds a model with Glorot-uniform weights and zero biases, seeded by `seed`.
// An empty `hidden_widths` gives a linear model.
MlpModel make_mlp(std::size_t input_dim, const std::vector<std::size_t>& hidden_widths,
                  HeadSpec head, double dropout_rate, std::uint64_t seed);

struct ForwardOptions {
  bool training = false;
  // Seed for the dropout masks of this call; ignored when not training.
  std::uint64_t mask_seed = 0;
};

// Everything backward() needs from a forward pass.
class GradientTape {
 public:
  const DenseMatrix& raw_outputs() const noexcept { return raw_outputs_; }
  bool consumed() const noexcept { return consumed_; }
  std::size_t batch_size() const noexcept { return input_.rows(); }

 private:
  friend struct TapeAccess;

  DenseMatrix input_;
  // Per hidden layer: ReLU input, and the post-dropout activation.
  std::vector<DenseMatrix> pre_activations_;
  std::vector<DenseMatrix> activations_;
  // Per hidden layer: 0 or 1/(1-p) per unit; empty when dropout was off.
  std::vector<DenseMatrix> masks_;
  DenseMatrix raw_outputs_;
  bool consumed_ = false;
};

struct ForwardResult {
  // Post-link head outputs, one column per head output.
  DenseMatrix outputs;
  GradientTape tape;
};

ForwardResult forward(const MlpModel& model, const DenseMatrix& batch,
                      const ForwardOptions& options = {});

// Inference-only pass; returns post-link outputs.
DenseMatrix predict(const MlpModel& model, const DenseMatrix& batch);

struct MlpGradients {
  std::vector<DenseMatrix> weight;
  std::vector<std::vector<double>> bias;

  static MlpGradients zeros_like(const MlpModel& model);
  double squared_norm() const;
  void scale(double factor);
};

// Backpropagates `output_grads`, the loss gradient with respect to the raw
// (pre-link) head values, through the network recorded on `tape`. The tape is
// consumed.
MlpGradients backward(const MlpModel& model, GradientTape& tape,
                      const DenseMatrix& output_grads);

// theta <- theta - learning_rate * grad. Throws TrainingError naming the flat
// parameter index of the first non-finite gradient; the model is untouched in
// that case.
void sgd_step(MlpModel& model, const MlpGradients& grads, double learning_rate);

// Visits parameters in flat order: layer by layer, weight (row-major) then bias.
template <typename Fn>
void for_each_parameter(MlpModel& model, Fn&& fn) {
  for (auto& layer : model.layers) {
    for (double& w : layer.weight.flat()) fn(w);
    for (double& b : layer.bias) fn(b);
  }
}

std::string mlp_to_json(const MlpModel& model);
MlpModel mlp_from_json(const std::string& text);

}  // namespace hsreg

#endif  // HSREG_MLP_HPP_
