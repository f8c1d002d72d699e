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

#ifndef HSREG_DATA_HPP_
#define HSREG_DATA_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hsreg/records.hpp"

namespace hsreg {

// Retained duration range in minutes, both ends inclusive.
inline constexpr double kMinDurationMinutes = 5.0;
inline constexpr double kMaxDurationMinutes = 24.0 * 60.0;

// True gamma parameters behind a generated record.
struct GroundTruth {
  std::int64_t record_id = 0;
  double shape = 0.0;
  double scale_hours = 0.0;

  double mean_hours() const { return shape * scale_hours; }
  double sigma_hours() const;
};

struct Provenance {
  std::string source;  // file path or "generator"
  std::optional<std::uint64_t> seed;
  std::string config_json;
};

struct Corpus {
  std::vector<SurgeryRecord> records;
  std::vector<GroundTruth> truth;  // empty unless generated or loaded
  Provenance provenance;
};

enum class DropReason { kTooShort, kTooLong, kInvalid };
const char* to_string(DropReason reason);

struct DroppedRecord {
  SurgeryRecord record;
  DropReason reason;
};

struct FilterResult {
  std::vector<SurgeryRecord> kept;
  std::vector<DroppedRecord> dropped;

  std::map<std::string, std::size_t> tally() const;
};

// Keeps records with 5 <= duration_minutes <= 1440.
FilterResult filter_records(std::span<const SurgeryRecord> records);

// Index lists (ascending) into the filtered record list.
struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> valid;
  std::vector<std::size_t> test;
  std::uint64_t seed = 0;
};

inline constexpr double kTrainFraction = 0.80;
inline constexpr double kValidFraction = 0.08;

// Uniform random 80/8/12 assignment. Throws DataError below 10 records.
Split split(std::size_t n_records, std::uint64_t seed);

std::vector<SurgeryRecord> select(std::span<const SurgeryRecord> records,
                                  std::span<const std::size_t> indices);

struct GeneratorConfig {
  std::size_t n_records = 50000;
  std::size_t n_procedures = 60;
  std::size_t n_surgeons = 40;
  std::size_t n_locations = 10;
  std::uint64_t seed = 1;
  // Ratio of the largest to the smallest conditional standard deviation.
  double hetero_strength = 4.0;
  // Conditional standard deviation at the midpoint u = 0.5.
  double base_sigma_hours = 0.5;
  double min_procedure_hours = 0.5;
  double max_procedure_hours = 4.0;
  double surgeon_speed_sd = 0.15;
  // Scales the non-additive part of the log-mean.
  double nonlinearity = 1.0;
  double zipf_exponent = 1.0;
  double missing_rate = 0.05;
  // Fraction of records whose logged duration is corrupted to < 5 min or > 24 h.
  double clerical_error_rate = 0.01;
  // Historical cases averaged to produce the booked time of a procedure.
  std::size_t history_cases = 20;

  // Throws ConfigError naming the first invalid field.
  void validate() const;

  std::string to_json() const;
  static GeneratorConfig from_json(const std::string& text);
};

// Synthetic surgery log. Durations are Gamma(k(x), phi(x)) with the log mean
// driven by procedure/surgeon latents and patient/context effects, and the
// conditional sigma = base_sigma * strength^(u(x) - 0.5), u in [0, 1].
Corpus generate(const GeneratorConfig& config);

void write_corpus_csv(const std::filesystem::path& path, std::span<const SurgeryRecord> records);
std::vector<SurgeryRecord> read_corpus_csv(const std::filesystem::path& path);

void write_ground_truth_csv(const std::filesystem::path& path, std::span<const GroundTruth> truth);
std::vector<GroundTruth> read_ground_truth_csv(const std::filesystem::path& path);

// Looks up ground truth for each record by id; throws DataError if any is absent.
std::vector<GroundTruth> truth_for(std::span<const SurgeryRecord> records,
                                   std::span<const GroundTruth> truth);

}  // namespace hsreg

#endif  // HSREG_DATA_HPP_
