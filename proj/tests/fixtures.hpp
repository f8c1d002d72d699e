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

#ifndef HSREG_TESTS_FIXTURES_HPP_
#define HSREG_TESTS_FIXTURES_HPP_

#include <filesystem>
#include <random>
#include <string>

#include "hsreg/records.hpp"

namespace fixtures {

// A complete record with every optional field present.
inline hsreg::SurgeryRecord make_record(std::int64_t id = 1) {
  hsreg::SurgeryRecord r;
  r.record_id = id;
  r.age_years = 55;
  r.sex = "F";
  r.weight_kg = 70.0;
  r.height_cm = 165.0;
  r.hour_of_day = 10.5;
  r.day_of_week = "Tue";
  r.month = 3;
  r.location = "OR-1";
  r.patient_class = "Inpatient";
  r.asa = "II";
  r.anesthesia = "General";
  r.surgeon_id = "S01";
  r.procedure_id = "P001";
  r.duration_minutes = 90.0;
  r.scheduled_minutes = 90.0;
  return r;
}

// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("hsreg-" + tag + "-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace fixtures

#endif  // HSREG_TESTS_FIXTURES_HPP_
