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

#include "hsreg/train.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numeric>
#include <random>
#include <thread>

#include "hsreg/error.hpp"
#include "json_io.hpp"

namespace hsreg {

namespace {

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t mix(std::uint64_t a, std::uint64_t b) { return mix(a ^ mix(b)); }

// Rows per forward pass when predicting on a whole split.
constexpr std::size_t kPredictChunk = 4096;

DenseMatrix raw_outputs(const MlpModel& net, const DenseMatrix& x) {
  DenseMatrix out(x.rows(), net.output_dim());
  std::vector<std::size_t> idx;
  for (std::size_t start = 0; start < x.rows(); start += kPredictChunk) {
    const std::size_t end = std::min(x.rows(), start + kPredictChunk);
    idx.resize(end - start);
    std::iota(idx.begin(), idx.end(), start);
    const auto fr = forward(net, x.gather_rows(idx));
    const DenseMatrix& raw = fr.tape.raw_outputs();
    for (std::size_t r = 0; r < raw.rows(); ++r) {
      std::copy(raw.row(r).begin(), raw.row(r).end(), out.row(start + r).begin());
    }
  }
  return out;
}

HeadSpec head_spec(const HeadKind& head) {
  if (!head.heteroscedastic) return HeadSpec{{Link::kIdentity}};
  if (head.family == Family::kGamma) return HeadSpec{{Link::kSoftplus, Link::kSoftplus}};
  return HeadSpec{{Link::kIdentity, Link::kSoftplus}};
}

double median_of(std::vector<double> v) {
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double hi = v[mid];
  if (v.size() % 2 == 1) return hi;
  const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lo + hi);
}

// Starts the head at the unconditional label distribution.
void init_head_bias(MlpModel& net, const HeadKind& head, std::span<const double> y) {
  const double n = static_cast<double>(y.size());
  const double m = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double var = 0.0, mad = 0.0;
  for (double v : y) {
    var += (v - m) * (v - m);
    mad += std::abs(v - m);
  }
  var = std::max(var / n, kScaleFloor * kScaleFloor * 4.0);
  mad = std::max(mad / n, 2.0 * kScaleFloor);
  auto& bias = net.layers.back().bias;
  if (!head.heteroscedastic) {
    bias[0] = head.family == Family::kLaplace ? median_of({y.begin(), y.end()}) : m;
    return;
  }
  switch (head.family) {
    case Family::kGaussian:
      bias[0] = m;
      bias[1] = inverse_softplus(std::sqrt(var));
      break;
    case Family::kLaplace:
      bias[0] = median_of({y.begin(), y.end()});
      bias[1] = inverse_softplus(mad);
      break;
    case Family::kGamma:
      bias[0] = inverse_softplus(std::max(m * m / var, 2.0 * kScaleFloor));
      bias[1] = inverse_softplus(std::max(var / m, 2.0 * kScaleFloor));
      break;
  }
}

double network_nll(const MlpModel& net, const HeadKind& head, const Dataset& data,
                   double* fitted_scale) {
  const DenseMatrix raw = raw_outputs(net, data.x);
  double total = 0.0;
  if (head.heteroscedastic) {
    for (std::size_t i = 0; i < data.size(); ++i) {
      total += nll(distribution_from_raw(head.family, raw.row(i)), data.y[i]);
    }
  } else {
    std::vector<double> residuals(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) residuals[i] = data.y[i] - raw(i, 0);
    const double s = fit_constant_scale(head.family, residuals);
    if (fitted_scale) *fitted_scale = s;
    for (std::size_t i = 0; i < data.size(); ++i) {
      total += head.family == Family::kLaplace ? laplace_nll(data.y[i], raw(i, 0), s)
                                               : gaussian_nll(data.y[i], raw(i, 0), s);
    }
  }
  return total / static_cast<double>(data.size());
}

void check_datasets(const Dataset& train, const Dataset& valid) {
  if (train.size() == 0) throw DataError("training split is empty");
  if (valid.size() == 0) throw DataError("validation split is empty");
  if (train.x.rows() != train.size() || valid.x.rows() != valid.size()) {
    throw ShapeError("dataset feature rows do not match label count");
  }
  if (train.x.cols() != valid.x.cols()) {
    throw ShapeError("train and validation feature widths differ");
  }
}

TrainedModel fit_network(const TrainConfig& config, const std::vector<std::size_t>& widths,
                         ModelKind kind, const Dataset& train, const Dataset& valid) {
  check_datasets(train, valid);
  const HeadKind head = config.head;
  MlpModel net = make_mlp(train.x.cols(), widths, head_spec(head), config.dropout, config.seed);
  init_head_bias(net, head, train.y);

  TrainedModel result;
  result.kind = kind;
  result.head = head;
  result.config = config;
  result.initial_valid_nll = network_nll(net, head, valid, nullptr);
  result.best_valid_nll = result.initial_valid_nll;
  result.best_epoch = 0;
  MlpModel best = net;

  const std::size_t n = train.size();
  std::vector<std::size_t> order(n);
  std::vector<std::size_t> batch_idx;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    const double lr = config.learning_rate(epoch);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 shuffle_rng(mix(config.seed, 2 * epoch + 1));
    std::shuffle(order.begin(), order.end(), shuffle_rng);

    double loss_sum = 0.0;
    std::size_t batch_no = 0;
    for (std::size_t start = 0; start < n; start += config.batch_size, ++batch_no) {
      const std::size_t end = std::min(n, start + config.batch_size);
      batch_idx.assign(order.begin() + static_cast<std::ptrdiff_t>(start),
                       order.begin() + static_cast<std::ptrdiff_t>(end));
      const DenseMatrix xb = train.x.gather_rows(batch_idx);
      ForwardOptions opts;
      opts.training = true;
      opts.mask_seed = mix(mix(config.seed, 2 * epoch + 2), batch_no);
      auto fr = forward(net, xb, opts);
      const DenseMatrix& raw = fr.tape.raw_outputs();
      const double inv_b = 1.0 / static_cast<double>(batch_idx.size());
      DenseMatrix grads(raw.rows(), raw.cols());
      double batch_loss = 0.0;
      for (std::size_t r = 0; r < raw.rows(); ++r) {
        const NllEval ev = head_loss(head, train.y[batch_idx[r]], raw.row(r));
        batch_loss += ev.value;
        for (std::size_t c = 0; c < raw.cols(); ++c) grads(r, c) = ev.grad.d_raw[c] * inv_b;
      }
      if (!std::isfinite(batch_loss)) {
        throw TrainingError("non-finite loss at epoch " + std::to_string(epoch) + ", batch " +
                            std::to_string(batch_no) + "; try a lower initial_lr");
      }
      loss_sum += batch_loss;
      MlpGradients g = backward(net, fr.tape, grads);
      if (config.max_grad_norm) {
        const double norm = std::sqrt(g.squared_norm());
        if (norm > *config.max_grad_norm) g.scale(*config.max_grad_norm / norm);
      }
      sgd_step(net, g, lr);
    }

    const double valid_nll = network_nll(net, head, valid, nullptr);
    if (!std::isfinite(valid_nll)) {
      throw TrainingError("non-finite validation NLL after epoch " + std::to_string(epoch) +
                          "; try a lower initial_lr");
    }
    result.log.push_back({epoch, lr, loss_sum / static_cast<double>(n), valid_nll});
    if (valid_nll < result.best_valid_nll) {
      result.best_valid_nll = valid_nll;
      result.best_epoch = epoch + 1;
      best = net;
    }
  }

  if (!head.heteroscedastic) {
    double scale = 0.0;
    network_nll(best, head, valid, &scale);
    result.constant_scale = scale;
  }
  result.network = std::move(best);
  return result;
}

PredictiveDistribution homoscedastic_distribution(Family family, double mu, double scale) {
  return family == Family::kLaplace ? PredictiveDistribution::laplace(mu, scale)
                                    : PredictiveDistribution::gaussian(mu, scale);
}

}  // namespace

void TrainConfig::validate() const {
  if (head.family == Family::kGamma && !head.heteroscedastic) {
    throw ConfigError("heteroscedastic", "the gamma head has no homoscedastic variant");
  }
  if (hidden_layers < 1 || hidden_layers > 3) {
    throw ConfigError("hidden_layers", "must be 1, 2 or 3");
  }
  if (hidden_width == 0) throw ConfigError("hidden_width", "must be positive");
  if (!allow_off_grid_width &&
      std::find(std::begin(kWidthGrid), std::end(kWidthGrid), hidden_width) ==
          std::end(kWidthGrid)) {
    throw ConfigError("hidden_width", "must be one of 128, 256, 384, 512");
  }
  if (!(initial_lr > 0.0) || !std::isfinite(initial_lr)) {
    throw ConfigError("initial_lr", "must be positive");
  }
  if (lr_halving_period == 0) throw ConfigError("lr_halving_period", "must be positive");
  if (batch_size == 0) throw ConfigError("batch_size", "must be positive");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw ConfigError("dropout", "must lie in [0, 1)");
  if (max_grad_norm && !(*max_grad_norm > 0.0)) {
    throw ConfigError("max_grad_norm", "must be positive");
  }
}

double TrainConfig::learning_rate(std::size_t epoch) const {
  return initial_lr * std::pow(0.5, static_cast<double>(epoch / lr_halving_period));
}

namespace {

nlohmann::ordered_json config_to_value(const TrainConfig& c) {
  nlohmann::ordered_json j;
  j["head"] = to_string(c.head.family);
  j["heteroscedastic"] = c.head.heteroscedastic;
  j["hidden_layers"] = c.hidden_layers;
  j["hidden_width"] = c.hidden_width;
  j["allow_off_grid_width"] = c.allow_off_grid_width;
  j["initial_lr"] = c.initial_lr;
  j["lr_halving_period"] = c.lr_halving_period;
  j["epochs"] = c.epochs;
  j["batch_size"] = c.batch_size;
  j["dropout"] = c.dropout;
  j["seed"] = c.seed;
  j["max_grad_norm"] = c.max_grad_norm ? nlohmann::ordered_json(*c.max_grad_norm)
                                       : nlohmann::ordered_json(nullptr);
  return j;
}

// Reads the keys present in `j` over the defaults; unknown keys are errors.
TrainConfig config_from_value(const nlohmann::json& j, bool validate) {
  if (!j.is_object()) throw ConfigError("config", "expected a JSON object");
  TrainConfig c;
  for (const auto& [key, v] : j.items()) {
    try {
      if (key == "head") c.head.family = family_from_string(v.get<std::string>());
      else if (key == "heteroscedastic") c.head.heteroscedastic = v.get<bool>();
      else if (key == "hidden_layers") c.hidden_layers = v.get<std::size_t>();
      else if (key == "hidden_width") c.hidden_width = v.get<std::size_t>();
      else if (key == "allow_off_grid_width") c.allow_off_grid_width = v.get<bool>();
      else if (key == "initial_lr") c.initial_lr = v.get<double>();
      else if (key == "lr_halving_period") c.lr_halving_period = v.get<std::size_t>();
      else if (key == "epochs") c.epochs = v.get<std::size_t>();
      else if (key == "batch_size") c.batch_size = v.get<std::size_t>();
      else if (key == "dropout") c.dropout = v.get<double>();
      else if (key == "seed") c.seed = v.get<std::uint64_t>();
      else if (key == "max_grad_norm") {
        if (v.is_null()) c.max_grad_norm.reset();
        else c.max_grad_norm = v.get<double>();
      } else {
        throw ConfigError(key, "unknown setting");
      }
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(key, std::string("wrong type: ") + e.what());
    }
  }
  if (validate) c.validate();
  return c;
}

}  // namespace

std::string TrainConfig::to_json() const { return config_to_value(*this).dump(2); }

TrainConfig TrainConfig::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config", std::string("invalid JSON: ") + e.what());
  }
  return config_from_value(j, true);
}

Dataset make_dataset(const FeatureSchema& schema, std::span<const SurgeryRecord> records) {
  Dataset d;
  d.x = schema.encode_matrix(records);
  d.y = labels_hours(records);
  d.record_id.reserve(records.size());
  d.procedure.reserve(records.size());
  d.scheduled_hours.reserve(records.size());
  for (const auto& r : records) {
    d.record_id.push_back(r.record_id);
    d.procedure.push_back(r.procedure_id);
    d.scheduled_hours.push_back(r.scheduled_minutes / 60.0);
  }
  return d;
}

const char* to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::kCurrentMethod:
      return "current-method";
    case ModelKind::kProcedureMeans:
      return "procedure-means";
    case ModelKind::kLinear:
      return "linear";
    case ModelKind::kMlp:
      return "mlp";
  }
  return "?";
}

ModelKind model_kind_from_string(const std::string& name) {
  for (ModelKind k : {ModelKind::kCurrentMethod, ModelKind::kProcedureMeans, ModelKind::kLinear,
                      ModelKind::kMlp}) {
    if (name == to_string(k)) return k;
  }
  throw ConfigError("model", "unknown model kind '" + name + "'");
}

std::string TrainedModel::name() const {
  if (kind != ModelKind::kMlp) return to_string(kind);
  return std::string("mlp-") + head.name();
}

std::vector<double> TrainedModel::predict_mean(const Dataset& data) const {
  std::vector<double> out(data.size());
  switch (kind) {
    case ModelKind::kCurrentMethod:
      return data.scheduled_hours;
    case ModelKind::kProcedureMeans:
      for (std::size_t i = 0; i < data.size(); ++i) {
        auto it = procedure_means.find(data.procedure[i]);
        out[i] = it == procedure_means.end() ? global_mean : it->second;
      }
      return out;
    case ModelKind::kLinear:
    case ModelKind::kMlp: {
      if (!network) throw UsageError("model has no network parameters");
      const DenseMatrix raw = raw_outputs(*network, data.x);
      for (std::size_t i = 0; i < data.size(); ++i) {
        out[i] = head.heteroscedastic ? mean(distribution_from_raw(head.family, raw.row(i)))
                                      : raw(i, 0);
      }
      return out;
    }
  }
  return out;
}

std::vector<PredictiveDistribution> TrainedModel::predict(const Dataset& data) const {
  std::vector<PredictiveDistribution> out;
  out.reserve(data.size());
  if (kind == ModelKind::kMlp && head.heteroscedastic) {
    if (!network) throw UsageError("model has no network parameters");
    const DenseMatrix raw = raw_outputs(*network, data.x);
    for (std::size_t i = 0; i < data.size(); ++i) {
      out.push_back(distribution_from_raw(head.family, raw.row(i)));
    }
    return out;
  }
  if (!constant_scale) {
    throw ConfigError("constant_scale", "homoscedastic model has no fitted scale");
  }
  for (double mu : predict_mean(data)) {
    out.push_back(homoscedastic_distribution(head.family, mu, *constant_scale));
  }
  return out;
}

double fit_constant_scale(Family family, std::span<const double> residuals) {
  if (residuals.empty()) throw DomainError("fit_constant_scale: no residuals");
  double s = 0.0;
  switch (family) {
    case Family::kGaussian:
      for (double r : residuals) s += r * r;
      s = std::sqrt(s / static_cast<double>(residuals.size()));
      break;
    case Family::kLaplace:
      for (double r : residuals) s += std::abs(r);
      s /= static_cast<double>(residuals.size());
      break;
    case Family::kGamma:
      throw ConfigError("heteroscedastic", "the gamma head has no homoscedastic variant");
  }
  return std::max(s, kScaleFloor);
}

namespace {

void finish_point_model(TrainedModel& m, const Dataset& valid) {
  const std::vector<double> pred = m.predict_mean(valid);
  std::vector<double> residuals(valid.size());
  for (std::size_t i = 0; i < valid.size(); ++i) residuals[i] = valid.y[i] - pred[i];
  m.constant_scale = fit_constant_scale(Family::kGaussian, residuals);
  double total = 0.0;
  for (std::size_t i = 0; i < valid.size(); ++i) {
    total += gaussian_nll(valid.y[i], pred[i], *m.constant_scale);
  }
  m.best_valid_nll = m.initial_valid_nll = total / static_cast<double>(valid.size());
}

}  // namespace

TrainedModel make_current_method(const Dataset& valid) {
  if (valid.size() == 0) throw DataError("validation split is empty");
  TrainedModel m;
  m.kind = ModelKind::kCurrentMethod;
  m.head = HeadKind{Family::kGaussian, false};
  finish_point_model(m, valid);
  return m;
}

TrainedModel train_procedure_means(const Dataset& train, const Dataset& valid) {
  check_datasets(train, valid);
  std::map<std::string, std::pair<double, std::size_t>> sums;
  double total = 0.0;
  for (std::size_t i = 0; i < train.size(); ++i) {
    auto& [s, c] = sums[train.procedure[i]];
    s += train.y[i];
    ++c;
    total += train.y[i];
  }
  TrainedModel m;
  m.kind = ModelKind::kProcedureMeans;
  m.head = HeadKind{Family::kGaussian, false};
  for (const auto& [proc, sc] : sums) {
    m.procedure_means[proc] = sc.first / static_cast<double>(sc.second);
  }
  m.global_mean = total / static_cast<double>(train.size());
  finish_point_model(m, valid);
  return m;
}

TrainedModel train_linear(const Dataset& train, const Dataset& valid, TrainConfig config) {
  config.head = HeadKind{Family::kGaussian, false};
  config.hidden_layers = 0;
  config.dropout = 0.0;
  if (!(config.initial_lr > 0.0)) throw ConfigError("initial_lr", "must be positive");
  if (config.lr_halving_period == 0) throw ConfigError("lr_halving_period", "must be positive");
  if (config.batch_size == 0) throw ConfigError("batch_size", "must be positive");
  return fit_network(config, {}, ModelKind::kLinear, train, valid);
}

TrainedModel train_mlp(const TrainConfig& config, const Dataset& train, const Dataset& valid) {
  config.validate();
  return fit_network(config, std::vector<std::size_t>(config.hidden_layers, config.hidden_width),
                     ModelKind::kMlp, train, valid);
}

double mean_nll(const TrainedModel& model, const Dataset& data) {
  if (data.size() == 0) throw DataError("mean_nll: empty dataset");
  const auto dists = model.predict(data);
  double total = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) total += nll(dists[i], data.y[i]);
  return total / static_cast<double>(data.size());
}

std::vector<std::pair<std::string, double>> linear_coefficients(const TrainedModel& model,
                                                                const FeatureSchema& schema) {
  if (model.kind != ModelKind::kLinear || !model.network ||
      model.network->layers.size() != 1) {
    throw UsageError("linear_coefficients: not a linear model");
  }
  const auto names = schema.column_names();
  const DenseMatrix& w = model.network->layers[0].weight;
  if (names.size() != w.rows()) throw ShapeError("schema width does not match the model");
  std::vector<std::pair<std::string, double>> out;
  for (std::size_t i = 0; i < names.size(); ++i) out.emplace_back(names[i], w(i, 0));
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return std::abs(a.second) > std::abs(b.second);
  });
  return out;
}

std::vector<TrainConfig> default_grid(const TrainConfig& base) {
  std::vector<TrainConfig> grid;
  for (std::size_t layers = 1; layers <= 3; ++layers) {
    for (std::size_t width : kWidthGrid) {
      TrainConfig c = base;
      c.hidden_layers = layers;
      c.hidden_width = width;
      grid.push_back(c);
    }
  }
  return grid;
}

GridSearchResult grid_search(std::span<const TrainConfig> grid, const Dataset& train,
                             const Dataset& valid) {
  if (grid.empty()) throw ConfigError("grid", "must contain at least one config");
  for (const auto& c : grid) c.validate();

  const std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
  std::vector<TrainedModel> models(grid.size());
  for (std::size_t start = 0; start < grid.size(); start += workers) {
    const std::size_t end = std::min(grid.size(), start + workers);
    std::vector<std::future<TrainedModel>> wave;
    for (std::size_t i = start; i < end; ++i) {
      wave.push_back(std::async(std::launch::async,
                                [&, i] { return train_mlp(grid[i], train, valid); }));
    }
    for (std::size_t i = start; i < end; ++i) models[i] = wave[i - start].get();
  }

  GridSearchResult out;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    out.results.push_back({grid[i], models[i].best_valid_nll, models[i].best_epoch});
    if (models[i].best_valid_nll < models[out.best_index].best_valid_nll) out.best_index = i;
  }
  out.best_model = std::move(models[out.best_index]);
  return out;
}

namespace {
constexpr const char* kBundleFormat = "hsreg.bundle";
constexpr int kBundleVersion = 1;
}  // namespace

std::string bundle_to_json(const ModelBundle& bundle) {
  const TrainedModel& m = bundle.model;
  nlohmann::ordered_json j;
  j["format"] = kBundleFormat;
  j["version"] = kBundleVersion;
  j["kind"] = to_string(m.kind);
  j["head"] = {{"family", to_string(m.head.family)},
               {"heteroscedastic", m.head.heteroscedastic}};
  j["split_seed"] = bundle.split_seed;
  j["schema"] = schema_to_json_value(bundle.schema);
  j["network"] = m.network ? nlohmann::ordered_json(mlp_to_json_value(*m.network))
                           : nlohmann::ordered_json(nullptr);
  j["procedure_means"] = nlohmann::ordered_json::object();
  for (const auto& [proc, v] : m.procedure_means) j["procedure_means"][proc] = v;
  j["global_mean"] = m.global_mean;
  j["constant_scale"] = m.constant_scale ? nlohmann::ordered_json(*m.constant_scale)
                                         : nlohmann::ordered_json(nullptr);
  j["config"] = m.config ? config_to_value(*m.config) : nlohmann::ordered_json(nullptr);
  j["initial_valid_nll"] = m.initial_valid_nll;
  j["best_valid_nll"] = m.best_valid_nll;
  j["best_epoch"] = m.best_epoch;
  auto log = nlohmann::ordered_json::array();
  for (const auto& e : m.log) {
    log.push_back({e.epoch, e.learning_rate, e.train_loss, e.valid_nll});
  }
  j["log"] = std::move(log);
  return j.dump();
}

ModelBundle bundle_from_json(const std::string& text) {
  return with_json_errors("model bundle", [&] {
    const auto j = nlohmann::json::parse(text);
    if (j.at("format").get<std::string>() != kBundleFormat) {
      throw DataError("model bundle: unexpected format tag");
    }
    if (j.at("version").get<int>() != kBundleVersion) {
      throw DataError("model bundle: unsupported version");
    }
    ModelBundle b;
    TrainedModel& m = b.model;
    m.kind = model_kind_from_string(j.at("kind").get<std::string>());
    m.head.family = family_from_string(j.at("head").at("family").get<std::string>());
    m.head.heteroscedastic = j.at("head").at("heteroscedastic").get<bool>();
    b.split_seed = j.at("split_seed").get<std::uint64_t>();
    b.schema = schema_from_json_value(j.at("schema"));
    if (!j.at("network").is_null()) m.network = mlp_from_json_value(j.at("network"));
    for (const auto& [proc, v] : j.at("procedure_means").items()) {
      m.procedure_means[proc] = v.get<double>();
    }
    m.global_mean = j.at("global_mean").get<double>();
    if (!j.at("constant_scale").is_null()) m.constant_scale = j.at("constant_scale").get<double>();
    if (!j.at("config").is_null()) m.config = config_from_value(j.at("config"), false);
    m.initial_valid_nll = j.at("initial_valid_nll").get<double>();
    m.best_valid_nll = j.at("best_valid_nll").get<double>();
    m.best_epoch = j.at("best_epoch").get<std::size_t>();
    for (const auto& e : j.at("log")) {
      m.log.push_back({e.at(0).get<std::size_t>(), e.at(1).get<double>(), e.at(2).get<double>(),
                       e.at(3).get<double>()});
    }
    return b;
  });
}

}  // namespace hsreg
