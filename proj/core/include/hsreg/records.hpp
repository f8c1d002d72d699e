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

#ifndef HSREG_RECORDS_HPP_
#define HSREG_RECORDS_HPP_

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace hsreg {

inline constexpr std::size_t kComorbidityCount = 14;

// Column names of the binary comorbidity flags, in record order.
const std::array<std::string_view, kComorbidityCount>& comorbidity_names();

// One row of a surgery log. Optional fields may be missing in the source.
struct SurgeryRecord {
  std::int64_t record_id = 0;
  int age_years = 0;
  std::string sex;  // "F" or "M"
  std::optional<double> weight_kg;
  std::optional<double> height_cm;
  std::optional<double> hour_of_day;  // decimal hours in [0, 24)
  std::string day_of_week;            // "Mon" .. "Sun"
  int month = 1;                      // 1 .. 12
  std::string location;
  std::string patient_class;
  std::string asa;  // "I" .. "VI"
  std::string anesthesia;
  std::string surgeon_id;
  std::string procedure_id;
  std::array<bool, kComorbidityCount> comorbidities{};
  double duration_minutes = 0.0;   // realised
  double scheduled_minutes = 0.0;  // booked by the current method

  double label_hours() const { return duration_minutes / 60.0; }

  friend bool operator==(const SurgeryRecord&, const SurgeryRecord&) = default;
};

// Value of a named raw field, used by the feature schema. Missing values are
// std::monostate; numeric and binary fields are doubles; categoricals strings.
using RawValue = std::variant<std::monostate, double, std::string>;

// Field names: age, sex, weight, height, hour, day, month, location, class,
// asa, anesthesia, surgeon, procedure, and each comorbidity name.
RawValue raw_field(const SurgeryRecord& record, std::string_view name);

// CSV header used for surgery logs.
const std::vector<std::string>& surgery_csv_header();

std::vector<std::string> to_csv_row(const SurgeryRecord& record);
SurgeryRecord from_csv_row(const std::vector<std::string>& header,
                           const std::vector<std::string>& row);

// "HH:MM" <-> decimal hours.
std::string format_clock(double hours);
double parse_clock(std::string_view text);

// Shortest round-trip decimal representation.
std::string format_double(double value);

}  // namespace hsreg

#endif  // HSREG_RECORDS_HPP_
