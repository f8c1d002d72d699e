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

#include "hsreg/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "hsreg/error.hpp"
#include "json_io.hpp"

namespace hsreg {

double softplus(double z) {
  if (z > 0.0) return z + std::log1p(std::exp(-z));
  return std::log1p(std::exp(z));
}

double softplus_grad(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double inverse_softplus(double y) {
  if (!(y > 0.0)) throw DomainError("inverse_softplus: argument must be > 0");
  // log(exp(y) - 1) = y + log(1 - exp(-y))
  return y + std::log(-std::expm1(-y));
}

const char* to_string(Link link) {
  return link == Link::kIdentity ? "identity" : "softplus";
}

Link link_from_string(const std::string& name) {
  if (name == "identity") return Link::kIdentity;
  if (name == "softplus") return Link::kSoftplus;
  throw DataError("unknown link '" + name + "'");
}

double apply_link(Link link, double z) {
  return link == Link::kIdentity ? z : softplus(z);
}

std::size_t MlpModel::input_dim() const {
  return layers.empty() ? 0 : layers.front().fan_in();
}

std::size_t MlpModel::output_dim() const {
  return layers.empty() ? 0 : layers.back().fan_out();
}

std::size_t MlpModel::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers) n += l.weight.size() + l.bias.size();
  return n;
}

void MlpModel::validate() const {
  if (layers.empty()) throw ShapeError("MlpModel: no layers");
  if (head.outputs() != 1 && head.outputs() != 2) {
    throw ConfigError("head", "output count must be 1 or 2");
  }
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) {
    throw ConfigError("dropout_rate", "must lie in [0, 1)");
  }
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto& layer = layers[l];
    if (layer.bias.size() != layer.fan_out()) {
      throw ShapeError("layer " + std::to_string(l) + ": bias length mismatch");
    }
    if (l > 0 && layers[l - 1].fan_out() != layer.fan_in()) {
      throw ShapeError("layer " + std::to_string(l) + ": fan_in " +
                       std::to_string(layer.fan_in()) + " does not chain with previous fan_out " +
                       std::to_string(layers[l - 1].fan_out()));
    }
  }
  if (output_dim() != head.outputs()) {
    throw ShapeError("final layer width " + std::to_string(output_dim()) +
                     " != head outputs " + std::to_string(head.outputs()));
  }
}

MlpModel make_mlp(std::size_t input_dim, const std::vector<std::size_t>& hidden_widths,
                  HeadSpec head, double dropout_rate, std::uint64_t seed) {
  if (input_dim == 0) throw ConfigError("input_dim", "must be positive");
  MlpModel model;
  model.head = std::move(head);
  model.dropout_rate = dropout_rate;
  model.rng_seed = seed;

  std::vector<std::size_t> dims{input_dim};
  dims.insert(dims.end(), hidden_widths.begin(), hidden_widths.end());
  dims.push_back(model.head.outputs());

  std::mt19937_64 rng(seed);
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    if (dims[l + 1] == 0) throw ConfigError("hidden_width", "must be positive");
    DenseLayer layer{DenseMatrix(dims[l], dims[l + 1]), std::vector<double>(dims[l + 1], 0.0)};
    const double limit = std::sqrt(6.0 / static_cast<double>(dims[l] + dims[l + 1]));
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (double& w : layer.weight.flat()) w = dist(rng);
    model.layers.push_back(std::move(layer));
  }
  model.validate();
  return model;
}

struct TapeAccess {
  static DenseMatrix& input(GradientTape& t) { return t.input_; }
  static std::vector<DenseMatrix>& pre(GradientTape& t) { return t.pre_activations_; }
  static std::vector<DenseMatrix>& act(GradientTape& t) { return t.activations_; }
  static std::vector<DenseMatrix>& masks(GradientTape& t) { return t.masks_; }
  static DenseMatrix& raw(GradientTape& t) { return t.raw_outputs_; }
  static bool& consumed(GradientTape& t) { return t.consumed_; }
};

namespace {

// SplitMix64 finaliser; used to derive independent mask streams.
std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

DenseMatrix make_mask(std::size_t rows, std::size_t cols, double rate, std::uint64_t seed) {
  DenseMatrix mask(rows, cols);
  std::mt19937_64 rng(seed);
  const double keep = 1.0 - rate;
  const double scale = 1.0 / keep;
  for (double& m : mask.flat()) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    m = u < keep ? scale : 0.0;
  }
  return mask;
}

}  // namespace

ForwardResult forward(const MlpModel& model, const DenseMatrix& batch,
                      const ForwardOptions& options) {
  if (model.layers.empty()) throw ShapeError("forward: model has no layers");
  if (batch.cols() != model.input_dim()) {
    throw ShapeError("forward: batch has " + std::to_string(batch.cols()) +
                     " columns, model expects " + std::to_string(model.input_dim()));
  }
  ForwardResult result;
  GradientTape& tape = result.tape;
  TapeAccess::input(tape) = batch;
  const bool use_dropout = options.training && model.dropout_rate > 0.0;

  const DenseMatrix* current = &TapeAccess::input(tape);
  const std::size_t hidden = model.hidden_layer_count();
  for (std::size_t l = 0; l < hidden; ++l) {
    const auto& layer = model.layers[l];
    DenseMatrix z = matmul(*current, layer.weight);
    add_row_vector(z, layer.bias);
    DenseMatrix h = z;
    for (double& v : h.flat()) v = v > 0.0 ? v : 0.0;
    if (use_dropout) {
      DenseMatrix mask = make_mask(h.rows(), h.cols(), model.dropout_rate,
                                   mix64(options.mask_seed ^ mix64(l + 1)));
      auto hv = h.flat();
      auto mv = mask.flat();
      for (std::size_t i = 0; i < hv.size(); ++i) hv[i] *= mv[i];
      TapeAccess::masks(tape).push_back(std::move(mask));
    }
    TapeAccess::pre(tape).push_back(std::move(z));
    TapeAccess::act(tape).push_back(std::move(h));
    current = &TapeAccess::act(tape).back();
  }

  const auto& last = model.layers.back();
  DenseMatrix raw = matmul(*current, last.weight);
  add_row_vector(raw, last.bias);

  result.outputs = raw;
  for (std::size_t i = 0; i < raw.rows(); ++i) {
    for (std::size_t j = 0; j < raw.cols(); ++j) {
      result.outputs(i, j) = apply_link(model.head.links[j], raw(i, j));
    }
  }
  TapeAccess::raw(tape) = std::move(raw);
  return result;
}

DenseMatrix predict(const MlpModel& model, const DenseMatrix& batch) {
  return forward(model, batch, ForwardOptions{}).outputs;
}

MlpGradients MlpGradients::zeros_like(const MlpModel& model) {
  MlpGradients g;
  for (const auto& layer : model.layers) {
    g.weight.emplace_back(layer.fan_in(), layer.fan_out());
    g.bias.emplace_back(layer.fan_out(), 0.0);
  }
  return g;
}

double MlpGradients::squared_norm() const {
  double s = 0.0;
  for (const auto& w : weight)
    for (double v : w.flat()) s += v * v;
  for (const auto& b : bias)
    for (double v : b) s += v * v;
  return s;
}

void MlpGradients::scale(double factor) {
  for (auto& w : weight)
    for (double& v : w.flat()) v *= factor;
  for (auto& b : bias)
    for (double& v : b) v *= factor;
}

MlpGradients backward(const MlpModel& model, GradientTape& tape,
                      const DenseMatrix& output_grads) {
  if (tape.consumed()) throw UsageError("backward: gradient tape already consumed");
  const DenseMatrix& raw = TapeAccess::raw(tape);
  if (output_grads.rows() != raw.rows() || output_grads.cols() != raw.cols()) {
    throw ShapeError("backward: output_grads " + std::to_string(output_grads.rows()) + "x" +
                     std::to_string(output_grads.cols()) + " != outputs " +
                     std::to_string(raw.rows()) + "x" + std::to_string(raw.cols()));
  }
  const std::size_t hidden = model.hidden_layer_count();
  if (TapeAccess::act(tape).size() != hidden) {
    throw ShapeError("backward: tape was recorded with a different architecture");
  }

  MlpGradients grads;
  grads.weight.resize(model.layers.size());
  grads.bias.resize(model.layers.size());

  DenseMatrix delta = output_grads;
  for (std::size_t l = model.layers.size(); l-- > 0;) {
    const DenseMatrix& below = l == 0 ? TapeAccess::input(tape) : TapeAccess::act(tape)[l - 1];
    grads.weight[l] = matmul_tn(below, delta);
    grads.bias[l] = column_sums(delta);
    if (l == 0) break;

    // Propagate to the hidden activation below, then through dropout and ReLU.
    DenseMatrix upstream = matmul_nt(delta, model.layers[l].weight);
    const DenseMatrix& pre = TapeAccess::pre(tape)[l - 1];
    auto up = upstream.flat();
    auto pv = pre.flat();
    const bool has_mask = !TapeAccess::masks(tape).empty();
    for (std::size_t i = 0; i < up.size(); ++i) {
      double g = pv[i] > 0.0 ? up[i] : 0.0;
      if (has_mask) g *= TapeAccess::masks(tape)[l - 1].flat()[i];
      up[i] = g;
    }
    delta = std::move(upstream);
  }
  TapeAccess::consumed(tape) = true;
  return grads;
}

void sgd_step(MlpModel& model, const MlpGradients& grads, double learning_rate) {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw ConfigError("learning_rate", "must be a positive finite number");
  }
  if (grads.weight.size() != model.layers.size() || grads.bias.size() != model.layers.size()) {
    throw ShapeError("sgd_step: gradient layer count mismatch");
  }
  std::size_t index = 0;
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    const auto& layer = model.layers[l];
    if (grads.weight[l].rows() != layer.fan_in() || grads.weight[l].cols() != layer.fan_out() ||
        grads.bias[l].size() != layer.fan_out()) {
      throw ShapeError("sgd_step: gradient shape mismatch at layer " + std::to_string(l));
    }
    for (double g : grads.weight[l].flat()) {
      if (!std::isfinite(g)) throw TrainingError("non-finite gradient", index);
      ++index;
    }
    for (double g : grads.bias[l]) {
      if (!std::isfinite(g)) throw TrainingError("non-finite gradient", index);
      ++index;
    }
  }
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    auto w = model.layers[l].weight.flat();
    auto gw = grads.weight[l].flat();
    for (std::size_t i = 0; i < w.size(); ++i) w[i] -= learning_rate * gw[i];
    auto& b = model.layers[l].bias;
    for (std::size_t i = 0; i < b.size(); ++i) b[i] -= learning_rate * grads.bias[l][i];
  }
}

namespace {
constexpr const char* kMlpFormat = "hsreg.mlp";
constexpr int kMlpVersion = 1;
}  // namespace

nlohmann::json mlp_to_json_value(const MlpModel& model) {
  nlohmann::json doc;
  doc["format"] = kMlpFormat;
  doc["version"] = kMlpVersion;
  doc["hidden_activation"] = "relu";
  nlohmann::json links = nlohmann::json::array();
  for (Link l : model.head.links) links.push_back(to_string(l));
  doc["head"] = {{"links", links}};
  doc["dropout_rate"] = model.dropout_rate;
  doc["rng_seed"] = model.rng_seed;
  doc["schema_hash"] = model.schema_hash;
  nlohmann::json layers = nlohmann::json::array();
  for (const auto& layer : model.layers) {
    layers.push_back({{"fan_in", layer.fan_in()},
                      {"fan_out", layer.fan_out()},
                      {"weight", layer.weight.data()},
                      {"bias", layer.bias}});
  }
  doc["layers"] = std::move(layers);
  return doc;
}

MlpModel mlp_from_json_value(const nlohmann::json& doc) {
  return with_json_errors("mlp model", [&] {
    if (doc.at("format").get<std::string>() != kMlpFormat) {
      throw DataError("mlp model: unexpected format tag");
    }
    const int version = doc.at("version").get<int>();
    if (version != kMlpVersion) {
      throw DataError("mlp model: unsupported version " + std::to_string(version));
    }
    if (doc.at("hidden_activation").get<std::string>() != "relu") {
      throw DataError("mlp model: only relu hidden activations are supported");
    }
    MlpModel model;
    for (const auto& l : doc.at("head").at("links")) {
      model.head.links.push_back(link_from_string(l.get<std::string>()));
    }
    model.dropout_rate = doc.at("dropout_rate").get<double>();
    model.rng_seed = doc.at("rng_seed").get<std::uint64_t>();
    model.schema_hash = doc.at("schema_hash").get<std::string>();
    for (const auto& l : doc.at("layers")) {
      const auto fan_in = l.at("fan_in").get<std::size_t>();
      const auto fan_out = l.at("fan_out").get<std::size_t>();
      DenseLayer layer{DenseMatrix(fan_in, fan_out, l.at("weight").get<std::vector<double>>()),
                       l.at("bias").get<std::vector<double>>()};
      model.layers.push_back(std::move(layer));
    }
    model.validate();
    return model;
  });
}

std::string mlp_to_json(const MlpModel& model) { return mlp_to_json_value(model).dump(); }

MlpModel mlp_from_json(const std::string& text) {
  return with_json_errors("mlp model", [&] { return mlp_from_json_value(nlohmann::json::parse(text)); });
}

}  // namespace hsreg
