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

#include "hsreg/records.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

#include "hsreg/error.hpp"

namespace hsreg {

namespace {

constexpr std::array<std::string_view, kComorbidityCount> kComorbidities = {
    "smoker", "afib",           "ckd",      "chf",    "cad",      "diabetes", "htn",
    "cirrhosis", "osa", "cardiac_device", "dialysis", "asthma", "dementia", "cognitive",
};

double parse_number(std::string_view text, const std::string& column) {
  double value = 0.0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || !std::isfinite(value)) {
    throw DataError("column '" + column + "': cannot parse number '" + std::string(text) + "'");
  }
  return value;
}

std::optional<double> parse_optional(std::string_view text, const std::string& column) {
  if (text.empty()) return std::nullopt;
  return parse_number(text, column);
}

bool parse_flag(std::string_view text, const std::string& column) {
  if (text == "1" || text == "true") return true;
  if (text == "0" || text == "false") return false;
  throw DataError("column '" + column + "': expected 0/1, got '" + std::string(text) + "'");
}

std::string optional_to_string(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string();
}

}  // namespace

const std::array<std::string_view, kComorbidityCount>& comorbidity_names() {
  return kComorbidities;
}

RawValue raw_field(const SurgeryRecord& r, std::string_view name) {
  auto opt = [](const std::optional<double>& v) -> RawValue {
    if (v) return *v;
    return std::monostate{};
  };
  auto cat = [](const std::string& s) -> RawValue {
    if (s.empty()) return std::monostate{};
    return s;
  };
  if (name == "age") return static_cast<double>(r.age_years);
  if (name == "sex") {
    if (r.sex.empty()) return std::monostate{};
    return r.sex == "M" ? 1.0 : 0.0;
  }
  if (name == "weight") return opt(r.weight_kg);
  if (name == "height") return opt(r.height_cm);
  if (name == "hour") return opt(r.hour_of_day);
  if (name == "day") return cat(r.day_of_week);
  if (name == "month") return std::to_string(r.month);
  if (name == "location") return cat(r.location);
  if (name == "class") return cat(r.patient_class);
  if (name == "asa") return cat(r.asa);
  if (name == "anesthesia") return cat(r.anesthesia);
  if (name == "surgeon") return cat(r.surgeon_id);
  if (name == "procedure") return cat(r.procedure_id);
  for (std::size_t i = 0; i < kComorbidities.size(); ++i) {
    if (name == kComorbidities[i]) return r.comorbidities[i] ? 1.0 : 0.0;
  }
  throw SchemaError("unknown raw field '" + std::string(name) + "'");
}

const std::vector<std::string>& surgery_csv_header() {
  static const std::vector<std::string> header = [] {
    std::vector<std::string> h = {"record_id", "age_years",  "sex",           "weight_kg",
                                  "height_cm", "hour_of_day", "day_of_week",  "month",
                                  "location",  "patient_class", "asa",         "anesthesia",
                                  "surgeon_id", "procedure_id"};
    for (auto name : kComorbidities) h.emplace_back(name);
    h.emplace_back("duration_minutes");
    h.emplace_back("scheduled_minutes");
    return h;
  }();
  return header;
}

std::vector<std::string> to_csv_row(const SurgeryRecord& r) {
  std::vector<std::string> row = {
      std::to_string(r.record_id),
      std::to_string(r.age_years),
      r.sex,
      optional_to_string(r.weight_kg),
      optional_to_string(r.height_cm),
      r.hour_of_day ? format_clock(*r.hour_of_day) : std::string(),
      r.day_of_week,
      std::to_string(r.month),
      r.location,
      r.patient_class,
      r.asa,
      r.anesthesia,
      r.surgeon_id,
      r.procedure_id,
  };
  for (bool flag : r.comorbidities) row.push_back(flag ? "1" : "0");
  row.push_back(format_double(r.duration_minutes));
  row.push_back(format_double(r.scheduled_minutes));
  return row;
}

SurgeryRecord from_csv_row(const std::vector<std::string>& header,
                           const std::vector<std::string>& row) {
  if (header.size() != row.size()) throw DataError("csv row width does not match header");
  SurgeryRecord r;
  bool seen_duration = false;
  for (std::size_t i = 0; i < header.size(); ++i) {
    const std::string& col = header[i];
    const std::string& v = row[i];
    if (col == "record_id") {
      r.record_id = static_cast<std::int64_t>(parse_number(v, col));
    } else if (col == "age_years") {
      r.age_years = static_cast<int>(parse_number(v, col));
    } else if (col == "sex") {
      r.sex = v;
    } else if (col == "weight_kg") {
      r.weight_kg = parse_optional(v, col);
    } else if (col == "height_cm") {
      r.height_cm = parse_optional(v, col);
    } else if (col == "hour_of_day") {
      if (!v.empty()) r.hour_of_day = parse_clock(v);
    } else if (col == "day_of_week") {
      r.day_of_week = v;
    } else if (col == "month") {
      r.month = static_cast<int>(parse_number(v, col));
    } else if (col == "location") {
      r.location = v;
    } else if (col == "patient_class") {
      r.patient_class = v;
    } else if (col == "asa") {
      r.asa = v;
    } else if (col == "anesthesia") {
      r.anesthesia = v;
    } else if (col == "surgeon_id") {
      r.surgeon_id = v;
    } else if (col == "procedure_id") {
      r.procedure_id = v;
    } else if (col == "duration_minutes") {
      r.duration_minutes = parse_number(v, col);
      seen_duration = true;
    } else if (col == "scheduled_minutes") {
      r.scheduled_minutes = parse_number(v, col);
    } else {
      bool matched = false;
      for (std::size_t c = 0; c < kComorbidities.size(); ++c) {
        if (col == kComorbidities[c]) {
          r.comorbidities[c] = parse_flag(v, col);
          matched = true;
        }
      }
      if (!matched) throw DataError("unexpected column '" + col + "'");
    }
  }
  if (!seen_duration) throw DataError("missing column 'duration_minutes'");
  return r;
}

std::string format_clock(double hours) {
  int minutes = static_cast<int>(std::lround(hours * 60.0));
  minutes = ((minutes % 1440) + 1440) % 1440;
  char buf[8];
  std::snprintf(buf, sizeof buf, "%02d:%02d", minutes / 60, minutes % 60);
  return buf;
}

double parse_clock(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    const double h = parse_number(text, "hour_of_day");
    if (h < 0.0 || h >= 24.0) throw DataError("hour_of_day out of range: " + std::string(text));
    return h;
  }
  const double h = parse_number(text.substr(0, colon), "hour_of_day");
  const double m = parse_number(text.substr(colon + 1), "hour_of_day");
  if (h < 0.0 || h >= 24.0 || m < 0.0 || m >= 60.0) {
    throw DataError("hour_of_day out of range: " + std::string(text));
  }
  return (h * 60.0 + m) / 60.0;
}

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  (void)ec;
  return std::string(buf, ptr);
}

}  // namespace hsreg
