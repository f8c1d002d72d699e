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

#include "hsreg/features.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

#include "hsreg/error.hpp"
#include "json_io.hpp"

namespace hsreg {

namespace {

constexpr const char* kSchemaFormat = "hsreg.feature_schema";
constexpr int kSchemaVersion = 1;
constexpr const char* kUnknown = "<unknown>";

FieldSpec numeric(std::string name, std::string group) {
  FieldSpec f;
  f.name = std::move(name);
  f.group = std::move(group);
  f.kind = FieldKind::kNumericZscored;
  f.has_missing_indicator = true;
  return f;
}

FieldSpec binary(std::string name, std::string group) {
  FieldSpec f;
  f.name = std::move(name);
  f.group = std::move(group);
  f.kind = FieldKind::kBinary;
  return f;
}

FieldSpec categorical(std::string name) {
  FieldSpec f;
  f.group = name;
  f.name = std::move(name);
  f.kind = FieldKind::kCategoricalOneHot;
  return f;
}

std::size_t bin_index(const FieldSpec& f, double v) {
  if (f.left_open) {
    return static_cast<std::size_t>(
        std::lower_bound(f.bin_edges.begin(), f.bin_edges.end(), v) - f.bin_edges.begin());
  }
  return static_cast<std::size_t>(
      std::upper_bound(f.bin_edges.begin(), f.bin_edges.end(), v) - f.bin_edges.begin());
}

FieldKind kind_from_string(const std::string& s) {
  if (s == "numeric-zscored") return FieldKind::kNumericZscored;
  if (s == "binary") return FieldKind::kBinary;
  if (s == "categorical-onehot") return FieldKind::kCategoricalOneHot;
  if (s == "binned-categorical") return FieldKind::kBinnedCategorical;
  throw DataError("feature schema: unknown field kind '" + s + "'");
}

}  // namespace

const char* to_string(FieldKind kind) {
  switch (kind) {
    case FieldKind::kNumericZscored:
      return "numeric-zscored";
    case FieldKind::kBinary:
      return "binary";
    case FieldKind::kCategoricalOneHot:
      return "categorical-onehot";
    case FieldKind::kBinnedCategorical:
      return "binned-categorical";
  }
  return "?";
}

std::size_t FieldSpec::value_width() const {
  switch (kind) {
    case FieldKind::kNumericZscored:
    case FieldKind::kBinary:
      return 1;
    case FieldKind::kCategoricalOneHot:
      return vocabulary.size() + 1;
    case FieldKind::kBinnedCategorical:
      return bin_edges.size() + 1;
  }
  return 0;
}

std::vector<FieldSpec> default_field_specs() {
  std::vector<FieldSpec> fields;

  FieldSpec age;
  age.name = "age";
  age.group = "age";
  age.kind = FieldKind::kBinnedCategorical;
  age.left_open = true;
  age.bin_edges = {10, 20, 30, 40, 50, 60, 70, 80};
  age.bin_labels = {"(0,10]",  "(10,20]", "(20,30]", "(30,40]", "(40,50]",
                    "(50,60]", "(60,70]", "(70,80]", "(80,)"};
  fields.push_back(age);

  fields.push_back(binary("sex", "sex"));
  fields.push_back(numeric("weight", "weight"));
  fields.push_back(numeric("height", "height"));

  FieldSpec hour;
  hour.name = "hour";
  hour.group = "hour";
  hour.kind = FieldKind::kBinnedCategorical;
  hour.has_missing_indicator = true;
  hour.bin_edges = {3, 6, 9, 12, 15, 18, 21};
  hour.bin_labels = {"0:00-3:00",   "3:00-6:00",   "6:00-9:00",   "9:00-12:00",
                     "12:00-15:00", "15:00-18:00", "18:00-21:00", "21:00-24:00"};
  fields.push_back(hour);

  for (const char* name :
       {"day", "month", "location", "class", "asa", "anesthesia", "surgeon", "procedure"}) {
    fields.push_back(categorical(name));
  }
  for (auto name : comorbidity_names()) {
    fields.push_back(binary(std::string(name), "comorbidities"));
  }
  return fields;
}

FeatureSchema::FeatureSchema(std::vector<FieldSpec> fields, FitOptions options)
    : fields_(std::move(fields)), options_(options) {
  for (const auto& f : fields_) {
    if (f.kind == FieldKind::kBinnedCategorical) {
      if (!std::is_sorted(f.bin_edges.begin(), f.bin_edges.end())) {
        throw SchemaError("field '" + f.name + "': bin edges must be ascending");
      }
      if (!f.bin_labels.empty() && f.bin_labels.size() != f.bin_edges.size() + 1) {
        throw SchemaError("field '" + f.name + "': bin label count mismatch");
      }
    }
    if (f.kind == FieldKind::kNumericZscored && !(f.std > 0.0)) {
      throw SchemaError("field '" + f.name + "': std must be positive");
    }
    offsets_.push_back(width_);
    width_ += f.width();
  }
}

std::vector<std::string> FeatureSchema::column_names() const {
  std::vector<std::string> names;
  names.reserve(width_);
  for (const auto& f : fields_) {
    switch (f.kind) {
      case FieldKind::kNumericZscored:
      case FieldKind::kBinary:
        names.push_back(f.name);
        break;
      case FieldKind::kCategoricalOneHot:
        for (const auto& v : f.vocabulary) names.push_back(f.name + "=" + v);
        names.push_back(f.name + "=" + kUnknown);
        break;
      case FieldKind::kBinnedCategorical:
        for (std::size_t b = 0; b < f.value_width(); ++b) {
          names.push_back(f.name + "=" +
                          (f.bin_labels.empty() ? std::to_string(b) : f.bin_labels[b]));
        }
        break;
    }
    if (f.has_missing_indicator) names.push_back(f.name + "_missing");
  }
  return names;
}

void FeatureSchema::encode_into(const SurgeryRecord& record, std::span<double> out) const {
  if (out.size() != width_) throw ShapeError("encode_into: output span has wrong width");
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t i = 0; i < fields_.size(); ++i) {
    const FieldSpec& f = fields_[i];
    double* block = out.data() + offsets_[i];
    const RawValue value = raw_field(record, f.name);
    const bool missing = std::holds_alternative<std::monostate>(value);
    if (missing && f.has_missing_indicator) block[f.value_width()] = 1.0;
    switch (f.kind) {
      case FieldKind::kNumericZscored:
        if (!missing) block[0] = (std::get<double>(value) - f.mean) / f.std;
        break;
      case FieldKind::kBinary:
        if (!missing) block[0] = std::get<double>(value) != 0.0 ? 1.0 : 0.0;
        break;
      case FieldKind::kBinnedCategorical:
        if (!missing) block[bin_index(f, std::get<double>(value))] = 1.0;
        break;
      case FieldKind::kCategoricalOneHot: {
        std::size_t slot = f.vocabulary.size();
        if (!missing) {
          const auto& s = std::get<std::string>(value);
          auto it = std::lower_bound(f.vocabulary.begin(), f.vocabulary.end(), s);
          if (it != f.vocabulary.end() && *it == s) {
            slot = static_cast<std::size_t>(it - f.vocabulary.begin());
          }
        }
        block[slot] = 1.0;
        break;
      }
    }
  }
}

EncodedExample FeatureSchema::encode(const SurgeryRecord& record) const {
  EncodedExample ex;
  ex.record_id = record.record_id;
  ex.features.resize(width_);
  encode_into(record, ex.features);
  ex.label_hours = record.label_hours();
  return ex;
}

DenseMatrix FeatureSchema::encode_matrix(std::span<const SurgeryRecord> records) const {
  DenseMatrix x(records.size(), width_);
  for (std::size_t i = 0; i < records.size(); ++i) encode_into(records[i], x.row(i));
  return x;
}

std::vector<FeatureGroup> FeatureSchema::feature_groups() const {
  std::vector<FeatureGroup> groups;
  for (std::size_t i = 0; i < fields_.size(); ++i) {
    const FieldSpec& f = fields_[i];
    auto it = std::find_if(groups.begin(), groups.end(),
                           [&](const FeatureGroup& g) { return g.name == f.group; });
    if (it == groups.end()) {
      groups.push_back(FeatureGroup{f.group, {}});
      it = groups.end() - 1;
    }
    for (std::size_t c = 0; c < f.width(); ++c) it->columns.push_back(offsets_[i] + c);
  }
  return groups;
}

std::string FeatureSchema::hash() const {
  const std::string text = to_json();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

nlohmann::json schema_to_json_value(const FeatureSchema& schema) {
  nlohmann::json doc;
  doc["format"] = kSchemaFormat;
  doc["version"] = kSchemaVersion;
  doc["min_category_count"] = schema.options().min_category_count;
  doc["width"] = schema.width();
  nlohmann::json fields = nlohmann::json::array();
  for (const auto& f : schema.fields()) {
    nlohmann::json j = {{"name", f.name},
                        {"group", f.group},
                        {"kind", to_string(f.kind)},
                        {"has_missing_indicator", f.has_missing_indicator}};
    switch (f.kind) {
      case FieldKind::kNumericZscored:
        j["mean"] = f.mean;
        j["std"] = f.std;
        break;
      case FieldKind::kBinnedCategorical:
        j["bin_edges"] = f.bin_edges;
        j["left_open"] = f.left_open;
        j["bin_labels"] = f.bin_labels;
        break;
      case FieldKind::kCategoricalOneHot:
        j["vocabulary"] = f.vocabulary;
        break;
      case FieldKind::kBinary:
        break;
    }
    fields.push_back(std::move(j));
  }
  doc["fields"] = std::move(fields);
  return doc;
}

FeatureSchema schema_from_json_value(const nlohmann::json& doc) {
  return with_json_errors("feature schema", [&] {
    if (doc.at("format").get<std::string>() != kSchemaFormat) {
      throw DataError("feature schema: unexpected format tag");
    }
    if (doc.at("version").get<int>() != kSchemaVersion) {
      throw DataError("feature schema: unsupported version");
    }
    FitOptions options;
    options.min_category_count = doc.at("min_category_count").get<std::size_t>();
    std::vector<FieldSpec> fields;
    for (const auto& j : doc.at("fields")) {
      FieldSpec f;
      f.name = j.at("name").get<std::string>();
      f.group = j.at("group").get<std::string>();
      f.kind = kind_from_string(j.at("kind").get<std::string>());
      f.has_missing_indicator = j.at("has_missing_indicator").get<bool>();
      if (f.kind == FieldKind::kNumericZscored) {
        f.mean = j.at("mean").get<double>();
        f.std = j.at("std").get<double>();
      } else if (f.kind == FieldKind::kBinnedCategorical) {
        f.bin_edges = j.at("bin_edges").get<std::vector<double>>();
        f.left_open = j.at("left_open").get<bool>();
        f.bin_labels = j.at("bin_labels").get<std::vector<std::string>>();
      } else if (f.kind == FieldKind::kCategoricalOneHot) {
        f.vocabulary = j.at("vocabulary").get<std::vector<std::string>>();
      }
      fields.push_back(std::move(f));
    }
    FeatureSchema schema(std::move(fields), options);
    if (schema.width() != doc.at("width").get<std::size_t>()) {
      throw DataError("feature schema: width does not match field layout");
    }
    return schema;
  });
}

std::string FeatureSchema::to_json() const { return schema_to_json_value(*this).dump(); }

FeatureSchema FeatureSchema::from_json(const std::string& text) {
  return with_json_errors("feature schema",
                          [&] { return schema_from_json_value(nlohmann::json::parse(text)); });
}

FeatureSchema fit_schema(std::span<const SurgeryRecord> train_records, const FitOptions& options,
                         std::vector<FieldSpec> fields) {
  if (train_records.empty()) throw SchemaError("fit_schema: empty training set");
  if (options.min_category_count == 0) {
    throw ConfigError("min_category_count", "must be at least 1");
  }
  for (FieldSpec& f : fields) {
    if (f.kind == FieldKind::kNumericZscored) {
      double sum = 0.0;
      std::size_t n = 0;
      for (const auto& r : train_records) {
        const RawValue v = raw_field(r, f.name);
        if (const double* d = std::get_if<double>(&v)) {
          sum += *d;
          ++n;
        }
      }
      if (n == 0) throw SchemaError("field '" + f.name + "': no observed values");
      const double mean = sum / static_cast<double>(n);
      double ss = 0.0;
      for (const auto& r : train_records) {
        const RawValue v = raw_field(r, f.name);
        if (const double* d = std::get_if<double>(&v)) ss += (*d - mean) * (*d - mean);
      }
      const double sd = std::sqrt(ss / static_cast<double>(n));
      if (!(sd > 0.0)) throw SchemaError("field '" + f.name + "': zero variance");
      f.mean = mean;
      f.std = sd;
    } else if (f.kind == FieldKind::kCategoricalOneHot) {
      std::map<std::string, std::size_t> counts;
      for (const auto& r : train_records) {
        const RawValue v = raw_field(r, f.name);
        if (const auto* s = std::get_if<std::string>(&v)) ++counts[*s];
      }
      f.vocabulary.clear();
      for (const auto& [value, count] : counts) {
        if (count >= options.min_category_count) f.vocabulary.push_back(value);
      }
    }
  }
  return FeatureSchema(std::move(fields), options);
}

std::vector<double> labels_hours(std::span<const SurgeryRecord> records) {
  std::vector<double> y;
  y.reserve(records.size());
  for (const auto& r : records) y.push_back(r.label_hours());
  return y;
}

void zero_columns(DenseMatrix& x, std::span<const std::size_t> columns) {
  for (std::size_t c : columns) {
    if (c >= x.cols()) throw ShapeError("zero_columns: column out of range");
  }
  for (std::size_t i = 0; i < x.rows(); ++i) {
    auto row = x.row(i);
    for (std::size_t c : columns) row[c] = 0.0;
  }
}

}  // namespace hsreg
