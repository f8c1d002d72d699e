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

#include "hsreg/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <map>
#include <numeric>
#include <thread>

#include "hsreg/csv.hpp"
#include "hsreg/error.hpp"
#include "hsreg/records.hpp"
#include "hsreg/special_functions.hpp"
#include "json_io.hpp"

namespace hsreg {

PointPrediction point_prediction(const PredictiveDistribution& dist) {
  return {mean(dist), median(dist)};
}

namespace {

void check_lengths(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw ShapeError(std::string(what) + ": length mismatch (" + std::to_string(a) + " vs " +
                     std::to_string(b) + ")");
  }
  if (a == 0) throw DataError(std::string(what) + ": empty input");
}

std::vector<double> ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t) r[order[t]] = avg;
    i = j + 1;
  }
  return r;
}

double laplace_standard_quantile(double p) {
  return p < 0.5 ? std::log(2.0 * p) : -std::log(2.0 * (1.0 - p));
}

}  // namespace

Metrics metrics(std::span<const PredictiveDistribution> preds,
                std::span<const double> labels_hours) {
  check_lengths(preds.size(), labels_hours.size(), "metrics");
  double se = 0.0, ae = 0.0, total_nll = 0.0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const PointPrediction p = point_prediction(preds[i]);
    const double y = labels_hours[i];
    se += (60.0 * (p.for_rmse - y)) * (60.0 * (p.for_rmse - y));
    ae += 60.0 * std::abs(p.for_mae - y);
    total_nll += nll(preds[i], y);
  }
  const double n = static_cast<double>(preds.size());
  return {std::sqrt(se / n), ae / n, total_nll / n};
}

std::vector<CalibrationBin> calibration(std::span<const double> sigma_hat,
                                        std::span<const double> abs_error, double bin_width) {
  check_lengths(sigma_hat.size(), abs_error.size(), "calibration");
  if (!(bin_width > 0.0)) throw DomainError("calibration: bin width must be positive");
  std::map<long long, std::pair<double, std::size_t>> acc;
  for (std::size_t i = 0; i < sigma_hat.size(); ++i) {
    if (!std::isfinite(sigma_hat[i]) || sigma_hat[i] < 0.0) {
      throw DomainError("calibration: sigma_hat must be finite and non-negative");
    }
    auto& [sum, count] = acc[static_cast<long long>(std::floor(sigma_hat[i] / bin_width))];
    sum += abs_error[i];
    ++count;
  }
  std::vector<CalibrationBin> bins;
  for (const auto& [idx, sc] : acc) {
    bins.push_back({(static_cast<double>(idx) + 0.5) * bin_width,
                    sc.first / static_cast<double>(sc.second), sc.second});
  }
  return bins;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  check_lengths(x.size(), y.size(), "pearson");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

double spearman(std::span<const double> x, std::span<const double> y) {
  check_lengths(x.size(), y.size(), "spearman");
  const auto rx = ranks(x);
  const auto ry = ranks(y);
  return pearson(rx, ry);
}

double calibration_correlation(std::span<const CalibrationBin> bins) {
  std::vector<double> c, e;
  for (const auto& b : bins) {
    c.push_back(b.center);
    e.push_back(b.mean_abs_error);
  }
  return pearson(c, e);
}

std::vector<double> standardized_residuals(std::span<const PredictiveDistribution> preds,
                                           std::span<const double> labels_hours) {
  check_lengths(preds.size(), labels_hours.size(), "standardized_residuals");
  std::vector<double> out(preds.size());
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const double y = labels_hours[i];
    const auto& p = preds[i].params();
    if (const auto* g = std::get_if<GaussianParams>(&p)) {
      out[i] = (y - g->mu) / g->sigma;
    } else if (const auto* l = std::get_if<LaplaceParams>(&p)) {
      out[i] = (y - l->mu) / l->b;
    } else {
      const double u = std::clamp(cdf(preds[i], y), 1e-300, 1.0 - 1e-16);
      out[i] = normal_quantile(u);
    }
  }
  return out;
}

std::vector<QqPoint> qq_data(std::span<const double> residuals, Family family) {
  std::vector<double> sorted(residuals.begin(), residuals.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  std::vector<QqPoint> out;
  out.reserve(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double p = (static_cast<double>(i) + 0.5) / n;
    const double q = family == Family::kLaplace ? laplace_standard_quantile(p)
                                                : normal_quantile(p);
    out.push_back({q, sorted[i]});
  }
  return out;
}

const char* to_string(BookingStrategy strategy) {
  switch (strategy) {
    case BookingStrategy::kAdditive:
      return "additive";
    case BookingStrategy::kMultiplicative:
      return "multiplicative";
    case BookingStrategy::kPercentile:
      return "percentile";
  }
  return "?";
}

BookingStrategy booking_strategy_from_string(const std::string& name) {
  for (auto s : {BookingStrategy::kAdditive, BookingStrategy::kMultiplicative,
                 BookingStrategy::kPercentile}) {
    if (name == to_string(s)) return s;
  }
  throw ConfigError("booking", "unknown strategy '" + name + "'");
}

std::vector<double> default_knob_grid(BookingStrategy strategy) {
  std::vector<double> grid;
  switch (strategy) {
    case BookingStrategy::kPercentile:
      for (int i = 1; i <= 19; ++i) grid.push_back(i / 20.0);
      break;
    case BookingStrategy::kMultiplicative:
      for (int i = 12; i <= 36; ++i) grid.push_back(i / 20.0);
      break;
    case BookingStrategy::kAdditive:
      for (int m = -30; m <= 90; m += 5) grid.push_back(m);
      break;
  }
  return grid;
}

std::size_t BookingCurve::optimum(double c_over, double c_under) const {
  if (points.empty()) throw DataError("booking curve has no points");
  std::size_t best = 0;
  double best_cost = c_over * points[0].overbooked_minutes + c_under * points[0].underbooked_minutes;
  for (std::size_t i = 1; i < points.size(); ++i) {
    const double cost =
        c_over * points[i].overbooked_minutes + c_under * points[i].underbooked_minutes;
    if (cost < best_cost) {
      best_cost = cost;
      best = i;
    }
  }
  return best;
}

BookingInputs booking_inputs(const TrainedModel& model, const Dataset& data) {
  BookingInputs in;
  in.point_hours = model.predict_mean(data);
  if (model.head.heteroscedastic || model.constant_scale) in.distributions = model.predict(data);
  return in;
}

BookingCurve booking_curve(const BookingInputs& inputs, std::span<const double> labels_hours,
                           BookingStrategy strategy, std::span<const double> knobs) {
  check_lengths(inputs.point_hours.size(), labels_hours.size(), "booking_curve");
  if (strategy == BookingStrategy::kPercentile) {
    if (inputs.distributions.empty()) {
      throw ConfigError("booking", "the percentile strategy needs predictive distributions");
    }
    check_lengths(inputs.distributions.size(), labels_hours.size(), "booking_curve");
  }
  BookingCurve curve;
  curve.strategy = strategy;
  for (double k : knobs) {
    if (strategy == BookingStrategy::kPercentile && !(k > 0.0 && k < 1.0)) {
      throw ConfigError("knob", "percentile knobs must lie in (0, 1)");
    }
    BookingPoint pt;
    pt.knob = k;
    for (std::size_t i = 0; i < labels_hours.size(); ++i) {
      double booked = 0.0;
      switch (strategy) {
        case BookingStrategy::kAdditive:
          booked = inputs.point_hours[i] + k / 60.0;
          break;
        case BookingStrategy::kMultiplicative:
          booked = inputs.point_hours[i] * k;
          break;
        case BookingStrategy::kPercentile:
          booked = quantile(inputs.distributions[i], k);
          break;
      }
      const double y = labels_hours[i];
      pt.overbooked_minutes += std::max(0.0, booked - y) * 60.0;
      pt.underbooked_minutes += std::max(0.0, y - booked) * 60.0;
    }
    curve.points.push_back(pt);
  }
  return curve;
}

namespace {

Metrics model_metrics(const TrainedModel& model, const Dataset& data) {
  const auto preds = model.predict(data);
  return metrics(preds, data.y);
}

Dataset without_columns(const Dataset& d, std::span<const std::size_t> columns) {
  Dataset out = d;
  zero_columns(out.x, columns);
  return out;
}

}  // namespace

AblationResult ablation(const TrainConfig& config, const Dataset& train, const Dataset& valid,
                        const Dataset& test, std::span<const FeatureGroup> groups) {
  config.validate();
  const TrainedModel full = train_mlp(config, train, valid);
  AblationResult result;
  result.model = full.name();
  result.full = model_metrics(full, test);

  const std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
  std::vector<Metrics> ablated(groups.size());
  for (std::size_t start = 0; start < groups.size(); start += workers) {
    const std::size_t end = std::min(groups.size(), start + workers);
    std::vector<std::future<Metrics>> wave;
    for (std::size_t g = start; g < end; ++g) {
      wave.push_back(std::async(std::launch::async, [&, g] {
        const auto& cols = groups[g].columns;
        const Dataset tr = without_columns(train, cols);
        const Dataset va = without_columns(valid, cols);
        const Dataset te = without_columns(test, cols);
        return model_metrics(train_mlp(config, tr, va), te);
      }));
    }
    for (std::size_t g = start; g < end; ++g) ablated[g] = wave[g - start].get();
  }
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const Metrics& m = ablated[g];
    result.rows.push_back({groups[g].name, m, m.rmse_minutes - result.full.rmse_minutes,
                           m.mae_minutes - result.full.mae_minutes,
                           m.nll_nats - result.full.nll_nats});
  }
  return result;
}

ModelReport evaluate_model(const TrainedModel& model, const Dataset& test,
                           std::span<const BookingStrategy> strategies) {
  ModelReport r;
  r.name = model.name();
  const auto preds = model.predict(test);
  r.metrics = metrics(preds, test.y);

  std::vector<double> sigma(test.size()), abs_err(test.size());
  r.cases.reserve(test.size());
  for (std::size_t i = 0; i < test.size(); ++i) {
    const PointPrediction p = point_prediction(preds[i]);
    sigma[i] = stddev(preds[i]);
    abs_err[i] = std::abs(test.y[i] - p.for_rmse);
    r.cases.push_back({test.record_id.empty() ? 0 : test.record_id[i], test.y[i], p.for_rmse,
                       p.for_mae, sigma[i], nll(preds[i], test.y[i])});
  }
  r.calibration = calibration(sigma, abs_err);
  r.qq = qq_data(standardized_residuals(preds, test.y), model.head.family);

  BookingInputs in;
  in.point_hours = model.predict_mean(test);
  in.distributions = preds;
  for (BookingStrategy s : strategies) {
    r.booking.push_back(booking_curve(in, test.y, s, default_knob_grid(s)));
  }
  return r;
}

void EvalReport::set_baseline(const std::string& name) {
  auto it = std::find_if(models.begin(), models.end(),
                         [&](const ModelReport& m) { return m.name == name; });
  if (it == models.end()) throw UsageError("baseline model '" + name + "' is not in the report");
  baseline = name;
  const double base = it->metrics.nll_nats;
  for (auto& m : models) m.nll_delta_vs_baseline = nll_delta(m.metrics.nll_nats, base);
}

namespace {

nlohmann::ordered_json metrics_json(const Metrics& m) {
  return {{"rmse_minutes", m.rmse_minutes},
          {"mae_minutes", m.mae_minutes},
          {"nll_nats", m.nll_nats}};
}

}  // namespace

std::string EvalReport::to_json() const {
  nlohmann::ordered_json j;
  j["format"] = "hsreg.eval_report";
  j["version"] = 1;
  j["baseline"] = baseline;
  j["n_test"] = n_test;
  auto arr = nlohmann::ordered_json::array();
  for (const auto& m : models) {
    nlohmann::ordered_json mj;
    mj["name"] = m.name;
    mj["rmse_minutes"] = m.metrics.rmse_minutes;
    mj["mae_minutes"] = m.metrics.mae_minutes;
    mj["nll_nats"] = m.metrics.nll_nats;
    mj["nll_delta_vs_baseline"] = m.nll_delta_vs_baseline;
    auto cal = nlohmann::ordered_json::array();
    std::size_t total = 0;
    for (const auto& b : m.calibration) {
      cal.push_back({{"sigma_center_hours", b.center},
                     {"mean_abs_error_hours", b.mean_abs_error},
                     {"count", b.count}});
      total += b.count;
    }
    mj["calibration"] = std::move(cal);
    mj["calibration_count"] = total;
    auto qq = nlohmann::ordered_json::array();
    for (const auto& q : m.qq) qq.push_back({q.theoretical, q.observed});
    mj["qq"] = std::move(qq);
    auto booking = nlohmann::ordered_json::array();
    for (const auto& c : m.booking) {
      auto pts = nlohmann::ordered_json::array();
      for (const auto& p : c.points) {
        pts.push_back({p.knob, p.overbooked_minutes, p.underbooked_minutes});
      }
      booking.push_back({{"strategy", to_string(c.strategy)},
                         {"columns", {"knob", "overbooked_minutes", "underbooked_minutes"}},
                         {"points", std::move(pts)}});
    }
    mj["booking"] = std::move(booking);
    arr.push_back(std::move(mj));
  }
  j["models"] = std::move(arr);
  if (ablation) {
    nlohmann::ordered_json a;
    a["model"] = ablation->model;
    a["full"] = metrics_json(ablation->full);
    auto rows = nlohmann::ordered_json::array();
    for (const auto& r : ablation->rows) {
      rows.push_back({{"group", r.group},
                      {"metrics", metrics_json(r.metrics)},
                      {"delta_rmse_minutes", r.delta_rmse_minutes},
                      {"delta_mae_minutes", r.delta_mae_minutes},
                      {"delta_nll", r.delta_nll}});
    }
    a["groups"] = std::move(rows);
    j["ablation"] = std::move(a);
  } else {
    j["ablation"] = nullptr;
  }
  return j.dump(2) + "\n";
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  return out;
}

}  // namespace

void write_ablation_csv(const std::filesystem::path& path, const AblationResult& result) {
  auto out = open_out(path);
  write_csv_row(out, {"model", "group", "rmse_minutes", "mae_minutes", "nll_nats",
                      "delta_rmse_minutes", "delta_mae_minutes", "delta_nll"});
  write_csv_row(out, {result.model, "(none)", format_double(result.full.rmse_minutes),
                      format_double(result.full.mae_minutes), format_double(result.full.nll_nats),
                      "0", "0", "0"});
  for (const auto& r : result.rows) {
    write_csv_row(out, {result.model, r.group, format_double(r.metrics.rmse_minutes),
                        format_double(r.metrics.mae_minutes), format_double(r.metrics.nll_nats),
                        format_double(r.delta_rmse_minutes), format_double(r.delta_mae_minutes),
                        format_double(r.delta_nll)});
  }
}

void EvalReport::write_csvs(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  {
    auto out = open_out(dir / "calibration.csv");
    write_csv_row(out, {"model", "sigma_center_hours", "mean_abs_error_hours", "count"});
    for (const auto& m : models) {
      for (const auto& b : m.calibration) {
        write_csv_row(out, {m.name, format_double(b.center), format_double(b.mean_abs_error),
                            std::to_string(b.count)});
      }
    }
  }
  {
    auto out = open_out(dir / "qq.csv");
    write_csv_row(out, {"model", "theoretical", "observed"});
    for (const auto& m : models) {
      for (const auto& q : m.qq) {
        write_csv_row(out, {m.name, format_double(q.theoretical), format_double(q.observed)});
      }
    }
  }
  {
    auto out = open_out(dir / "booking_curve.csv");
    write_csv_row(out, {"model", "strategy", "knob", "overbooked_minutes", "underbooked_minutes"});
    for (const auto& m : models) {
      for (const auto& c : m.booking) {
        for (const auto& p : c.points) {
          write_csv_row(out, {m.name, to_string(c.strategy), format_double(p.knob),
                              format_double(p.overbooked_minutes),
                              format_double(p.underbooked_minutes)});
        }
      }
    }
  }
  {
    auto out = open_out(dir / "cases.csv");
    write_csv_row(out, {"model", "record_id", "label_hours", "mean_hours", "median_hours",
                        "sigma_hours", "nll"});
    for (const auto& m : models) {
      for (const auto& c : m.cases) {
        write_csv_row(out, {m.name, std::to_string(c.record_id), format_double(c.label_hours),
                            format_double(c.mean_hours), format_double(c.median_hours),
                            format_double(c.sigma_hours), format_double(c.nll)});
      }
    }
  }
  if (ablation) write_ablation_csv(dir / "ablation.csv", *ablation);
}

}  // namespace hsreg
