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

#ifndef HSREG_TRAIN_HPP_
#define HSREG_TRAIN_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hsreg/dense_matrix.hpp"
#include "hsreg/distributions.hpp"
#include "hsreg/features.hpp"
#include "hsreg/mlp.hpp"
#include "hsreg/records.hpp"

namespace hsreg {

inline constexpr std::size_t kWidthGrid[] = {128, 256, 384, 512};

struct TrainConfig {
  HeadKind head;
  std::size_t hidden_layers = 1;
  std::size_t hidden_width = 128;
  // Permits widths outside kWidthGrid (small test networks).
  bool allow_off_grid_width = false;
  double initial_lr = 0.1;
  std::size_t lr_halving_period = 50;
  std::size_t epochs = 200;
  std::size_t batch_size = 256;
  double dropout = 0.2;
  std::uint64_t seed = 1;
  // Rescales a minibatch gradient whose L2 norm exceeds this value.
  std::optional<double> max_grad_norm;

  // Throws ConfigError naming the offending field.
  void validate() const;

  // initial_lr * 0.5^floor(epoch / lr_halving_period), epoch counted from 0.
  double learning_rate(std::size_t epoch) const;

  std::string to_json() const;
  static TrainConfig from_json(const std::string& text);

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

// Encoded features and labels for one split.
struct Dataset {
  DenseMatrix x;
  std::vector<double> y;  // hours
  std::vector<std::int64_t> record_id;
  std::vector<std::string> procedure;
  std::vector<double> scheduled_hours;

  std::size_t size() const noexcept { return y.size(); }
};

Dataset make_dataset(const FeatureSchema& schema, std::span<const SurgeryRecord> records);

enum class ModelKind { kCurrentMethod, kProcedureMeans, kLinear, kMlp };

const char* to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& name);

struct EpochLog {
  std::size_t epoch = 0;
  double learning_rate = 0.0;
  double train_loss = 0.0;
  double valid_nll = 0.0;

  friend bool operator==(const EpochLog&, const EpochLog&) = default;
};

struct TrainedModel {
  ModelKind kind = ModelKind::kMlp;
  HeadKind head;
  std::optional<MlpModel> network;                   // linear and MLP models
  std::map<std::string, double> procedure_means;     // procedure-means model
  double global_mean = 0.0;                          // fallback for unseen procedures
  std::optional<double> constant_scale;              // homoscedastic models only
  std::optional<TrainConfig> config;
  std::vector<EpochLog> log;
  double initial_valid_nll = 0.0;
  double best_valid_nll = 0.0;
  std::size_t best_epoch = 0;  // number of completed epochs in the kept snapshot

  std::string name() const;

  // Point predictions (distribution mean), hours.
  std::vector<double> predict_mean(const Dataset& data) const;

  // Throws ConfigError for a homoscedastic model without a fitted scale.
  std::vector<PredictiveDistribution> predict(const Dataset& data) const;

  friend bool operator==(const TrainedModel&, const TrainedModel&) = default;
};

// Gaussian: sqrt(mean r^2); Laplace: mean |r|. Floored at kScaleFloor.
// Throws DomainError on empty input and ConfigError for the gamma family.
double fit_constant_scale(Family family, std::span<const double> residuals);

// Booked time as the point prediction, scale fitted on validation.
TrainedModel make_current_method(const Dataset& valid);

TrainedModel train_procedure_means(const Dataset& train, const Dataset& valid);

// Squared-loss linear model (MLP without hidden layers) trained by SGD.
// Uses the schedule, batch size, epochs and seed of `config`.
TrainedModel train_linear(const Dataset& train, const Dataset& valid, TrainConfig config);

TrainedModel train_mlp(const TrainConfig& config, const Dataset& train, const Dataset& valid);

// Mean NLL per case; homoscedastic models use their constant scale.
double mean_nll(const TrainedModel& model, const Dataset& data);

// Linear model coefficients sorted by decreasing magnitude.
std::vector<std::pair<std::string, double>> linear_coefficients(const TrainedModel& model,
                                                                const FeatureSchema& schema);

struct GridResult {
  TrainConfig config;
  double valid_nll = 0.0;
  std::size_t best_epoch = 0;
};

struct GridSearchResult {
  std::size_t best_index = 0;
  std::vector<GridResult> results;  // in grid order
  TrainedModel best_model;
};

// Every layer-count x width combination, all other settings from `base`.
std::vector<TrainConfig> default_grid(const TrainConfig& base);

// Trains every config (in parallel) and keeps the lowest validation NLL;
// ties go to the earlier config. Throws ConfigError on an empty grid.
GridSearchResult grid_search(std::span<const TrainConfig> grid, const Dataset& train,
                             const Dataset& valid);

// A trained model together with what is needed to apply it.
struct ModelBundle {
  TrainedModel model;
  FeatureSchema schema;
  std::uint64_t split_seed = 0;

  friend bool operator==(const ModelBundle&, const ModelBundle&) = default;
};

std::string bundle_to_json(const ModelBundle& bundle);
ModelBundle bundle_from_json(const std::string& text);

}  // namespace hsreg

#endif  // HSREG_TRAIN_HPP_
