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

#ifndef HSREG_FEATURES_HPP_
#define HSREG_FEATURES_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hsreg/dense_matrix.hpp"
#include "hsreg/records.hpp"

namespace hsreg {

enum class FieldKind { kNumericZscored, kBinary, kCategoricalOneHot, kBinnedCategorical };

const char* to_string(FieldKind kind);

// Declarative description of one raw field and its encoding. Fitted statistics
// (mean/std, vocabulary) are filled in by fit_schema.
struct FieldSpec {
  std::string name;   // raw field name, see raw_field()
  std::string group;  // ablation group
  FieldKind kind = FieldKind::kNumericZscored;
  bool has_missing_indicator = false;

  // Binned fields: ascending interior cut points; n cuts give n + 1 bins, the
  // outer two unbounded. With left_open bins are (lo, hi], otherwise [lo, hi).
  std::vector<double> bin_edges;
  bool left_open = false;
  std::vector<std::string> bin_labels;

  // Categorical fields: sorted vocabulary; the unknown slot follows it.
  std::vector<std::string> vocabulary;

  double mean = 0.0;
  double std = 1.0;

  // Encoded width of the value block, excluding the missing indicator.
  std::size_t value_width() const;
  std::size_t width() const { return value_width() + (has_missing_indicator ? 1 : 0); }

  friend bool operator==(const FieldSpec&, const FieldSpec&) = default;
};

// The surgery-log field layout: age in ten-year left-open bins, hour of day in
// eight 3-hour bins, z-scored weight/height with missing indicators, one-hot
// categoricals with an unknown slot, and 14 binary comorbidities.
std::vector<FieldSpec> default_field_specs();

struct FitOptions {
  // Categories seen fewer times than this in training map to the unknown slot.
  std::size_t min_category_count = 1;
};

struct EncodedExample {
  std::int64_t record_id = 0;
  std::vector<double> features;
  double label_hours = 0.0;
};

struct FeatureGroup {
  std::string name;
  std::vector<std::size_t> columns;
};

// A fitted, immutable feature encoding.
class FeatureSchema {
 public:
  FeatureSchema() = default;
  FeatureSchema(std::vector<FieldSpec> fields, FitOptions options);

  const std::vector<FieldSpec>& fields() const noexcept { return fields_; }
  const FitOptions& options() const noexcept { return options_; }
  std::size_t width() const noexcept { return width_; }
  // Column offset of each field's block.
  const std::vector<std::size_t>& offsets() const noexcept { return offsets_; }
  std::vector<std::string> column_names() const;

  // Writes the encoding of `record` into `out` (size width()).
  void encode_into(const SurgeryRecord& record, std::span<double> out) const;
  EncodedExample encode(const SurgeryRecord& record) const;
  DenseMatrix encode_matrix(std::span<const SurgeryRecord> records) const;

  // Partition of the columns into named groups, in field order.
  std::vector<FeatureGroup> feature_groups() const;

  // FNV-1a over the canonical JSON form.
  std::string hash() const;

  std::string to_json() const;
  static FeatureSchema from_json(const std::string& text);

  friend bool operator==(const FeatureSchema& a, const FeatureSchema& b) {
    return a.fields_ == b.fields_ && a.options_.min_category_count == b.options_.min_category_count;
  }

 private:
  std::vector<FieldSpec> fields_;
  FitOptions options_;
  std::vector<std::size_t> offsets_;
  std::size_t width_ = 0;
};

// Fits z-score statistics (ignoring missing values, population std) and
// category vocabularies on training records only.
FeatureSchema fit_schema(std::span<const SurgeryRecord> train_records,
                         const FitOptions& options = {},
                         std::vector<FieldSpec> fields = default_field_specs());

// Labels in hours.
std::vector<double> labels_hours(std::span<const SurgeryRecord> records);

// Zeroes the given columns in place.
void zero_columns(DenseMatrix& x, std::span<const std::size_t> columns);

}  // namespace hsreg

#endif  // HSREG_FEATURES_HPP_
