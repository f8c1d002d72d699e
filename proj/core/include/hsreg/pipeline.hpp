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

#ifndef HSREG_PIPELINE_HPP_
#define HSREG_PIPELINE_HPP_

#include <cstdint>
#include <exception>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hsreg/data.hpp"
#include "hsreg/eval.hpp"
#include "hsreg/train.hpp"

namespace hsreg {

inline constexpr const char* kToolVersion = "0.1.0";

struct RunManifest {
  std::string subcommand;
  std::string config_path;
  std::map<std::string, std::uint64_t> seeds;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::string tool_version = kToolVersion;
  std::string schema_hash;
  // Effective settings and counts, written verbatim as a JSON object.
  std::string details_json = "{}";

  std::string to_json() const;
  void write(const std::filesystem::path& dir) const;
};

// Filtered records split into train/valid/test.
struct PreparedCorpus {
  std::vector<SurgeryRecord> train;
  std::vector<SurgeryRecord> valid;
  std::vector<SurgeryRecord> test;
  std::map<std::string, std::size_t> dropped;
  std::size_t n_raw = 0;
};

// `path` may name the CSV or a directory holding surgeries.csv.
std::filesystem::path corpus_file(const std::filesystem::path& path);
PreparedCorpus prepare_corpus(const std::filesystem::path& path, std::uint64_t split_seed);

struct GenerateOptions {
  GeneratorConfig config;
  std::filesystem::path out;
  std::string config_path;
};

// Writes surgeries.csv, ground_truth.csv and manifest.json.
void run_generate(const GenerateOptions& options);

struct TrainOptions {
  std::filesystem::path corpus;
  std::filesystem::path out;
  ModelKind model = ModelKind::kMlp;
  TrainConfig config;
  std::uint64_t split_seed = 1;
  bool grid = false;
  std::string config_path;
};

// Writes model.json, training_log.csv, manifest.json and, with a grid,
// grid_results.csv. Returns the bundle.
ModelBundle run_train(const TrainOptions& options);

struct EvalOptions {
  std::filesystem::path corpus;
  std::vector<std::filesystem::path> models;
  std::filesystem::path out;
  std::vector<BookingStrategy> booking = {BookingStrategy::kPercentile};
  bool ablate = false;
  std::string config_path;
};

// Always includes the current method as the baseline row. Writes report.json,
// the CSVs of EvalReport::write_csvs and manifest.json.
EvalReport run_eval(const EvalOptions& options);

struct AblateOptions {
  std::filesystem::path corpus;
  std::filesystem::path out;
  TrainConfig config;
  std::uint64_t split_seed = 1;
  std::string config_path;
};

AblationResult run_ablate(const AblateOptions& options);

struct BookingOptions {
  std::filesystem::path corpus;
  std::vector<std::filesystem::path> models;
  std::filesystem::path out;
  BookingStrategy strategy = BookingStrategy::kPercentile;
  double cost_over = 1.0;
  double cost_under = 1.0;
  std::string config_path;
};

// Writes booking_curve.csv, booking.json (optimal knob per model) and manifest.json.
void run_booking(const BookingOptions& options);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

// 2 configuration, 3 data or schema, 4 training or numeric, 1 anything else.
int exit_code_for(const std::exception& e);

}  // namespace hsreg

#endif  // HSREG_PIPELINE_HPP_
