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

#ifndef HSREG_EVAL_HPP_
#define HSREG_EVAL_HPP_

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hsreg/distributions.hpp"
#include "hsreg/features.hpp"
#include "hsreg/train.hpp"

namespace hsreg {

struct PointPrediction {
  double for_rmse = 0.0;  // mean, hours
  double for_mae = 0.0;   // median, hours
};

PointPrediction point_prediction(const PredictiveDistribution& dist);

struct Metrics {
  double rmse_minutes = 0.0;
  double mae_minutes = 0.0;
  double nll_nats = 0.0;  // mean per case, density over hours
};

// Throws ShapeError on a length mismatch and DataError on empty input.
Metrics metrics(std::span<const PredictiveDistribution> preds, std::span<const double> labels_hours);

// Positive when the model improves on the baseline.
inline double nll_delta(double model_nll, double baseline_nll) { return baseline_nll - model_nll; }

inline constexpr double kCalibrationBinWidth = 0.05;

struct CalibrationBin {
  double center = 0.0;  // hours
  double mean_abs_error = 0.0;
  std::size_t count = 0;
};

// Bins cases by sigma_hat (hours) into [i*w, (i+1)*w); empty bins are omitted.
std::vector<CalibrationBin> calibration(std::span<const double> sigma_hat,
                                        std::span<const double> abs_error,
                                        double bin_width = kCalibrationBinWidth);

// Unweighted Pearson correlation of bin centre against bin mean |error|.
double calibration_correlation(std::span<const CalibrationBin> bins);

double pearson(std::span<const double> x, std::span<const double> y);
double spearman(std::span<const double> x, std::span<const double> y);

struct QqPoint {
  double theoretical = 0.0;
  double observed = 0.0;
};

// Residuals scaled into the family's standard form: (y - mu) / sigma for
// Gaussian, (y - mu) / b for Laplace, and the normal score of the PIT for gamma.
std::vector<double> standardized_residuals(std::span<const PredictiveDistribution> preds,
                                           std::span<const double> labels_hours);

// Sorted residuals against reference quantiles at (i - 0.5) / n. The
// reference is standard Laplace for the Laplace family, standard normal
// otherwise.
std::vector<QqPoint> qq_data(std::span<const double> residuals, Family family);

enum class BookingStrategy { kAdditive, kMultiplicative, kPercentile };

const char* to_string(BookingStrategy strategy);
BookingStrategy booking_strategy_from_string(const std::string& name);

// Additive knobs are minutes added to the point prediction; multiplicative
// knobs scale it; percentile knobs pick a quantile of the distribution.
std::vector<double> default_knob_grid(BookingStrategy strategy);

struct BookingPoint {
  double knob = 0.0;
  double overbooked_minutes = 0.0;
  double underbooked_minutes = 0.0;
};

struct BookingCurve {
  BookingStrategy strategy = BookingStrategy::kPercentile;
  std::vector<BookingPoint> points;

  // Index minimising c_over * over + c_under * under; ties go to the first.
  std::size_t optimum(double c_over, double c_under) const;
};

struct BookingInputs {
  std::vector<double> point_hours;
  // Required by the percentile strategy; may be empty otherwise.
  std::vector<PredictiveDistribution> distributions;
};

BookingInputs booking_inputs(const TrainedModel& model, const Dataset& data);

// Throws ConfigError for the percentile strategy without distributions.
BookingCurve booking_curve(const BookingInputs& inputs, std::span<const double> labels_hours,
                           BookingStrategy strategy, std::span<const double> knobs);

struct AblationRow {
  std::string group;
  Metrics metrics;
  double delta_rmse_minutes = 0.0;  // ablated minus full
  double delta_mae_minutes = 0.0;
  double delta_nll = 0.0;
};

struct AblationResult {
  std::string model;
  Metrics full;
  std::vector<AblationRow> rows;
};

// Retrains `config` once per group with that group's columns zeroed in every
// split, using the same seeds as the full model.
AblationResult ablation(const TrainConfig& config, const Dataset& train, const Dataset& valid,
                        const Dataset& test, std::span<const FeatureGroup> groups);

void write_ablation_csv(const std::filesystem::path& path, const AblationResult& result);

struct CaseError {
  std::int64_t record_id = 0;
  double label_hours = 0.0;
  double mean_hours = 0.0;
  double median_hours = 0.0;
  double sigma_hours = 0.0;
  double nll = 0.0;
};

struct ModelReport {
  std::string name;
  Metrics metrics;
  double nll_delta_vs_baseline = 0.0;
  std::vector<CalibrationBin> calibration;
  std::vector<QqPoint> qq;
  std::vector<BookingCurve> booking;
  std::vector<CaseError> cases;
};

ModelReport evaluate_model(const TrainedModel& model, const Dataset& test,
                           std::span<const BookingStrategy> strategies);

struct EvalReport {
  std::string baseline;
  std::size_t n_test = 0;
  std::vector<ModelReport> models;
  std::optional<AblationResult> ablation;

  // Fills nll_delta_vs_baseline of every model from the named baseline.
  void set_baseline(const std::string& name);

  // Summary, calibration, QQ and booking data; per-case errors are CSV only.
  std::string to_json() const;

  // calibration.csv, qq.csv, booking_curve.csv, cases.csv and, when present,
  // ablation.csv.
  void write_csvs(const std::filesystem::path& dir) const;
};

}  // namespace hsreg

#endif  // HSREG_EVAL_HPP_
