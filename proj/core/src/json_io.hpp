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

// Internal JSON adapters shared between translation units. Not installed.
#ifndef HSREG_SRC_JSON_IO_HPP_
#define HSREG_SRC_JSON_IO_HPP_

#include <string>

#include "json.hpp"

#include "hsreg/error.hpp"

namespace hsreg {

struct MlpModel;
class FeatureSchema;

nlohmann::json mlp_to_json_value(const MlpModel& model);
MlpModel mlp_from_json_value(const nlohmann::json& doc);

nlohmann::json schema_to_json_value(const FeatureSchema& schema);
FeatureSchema schema_from_json_value(const nlohmann::json& doc);

// Wraps nlohmann parse/type errors into DataError with context.
template <typename Fn>
auto with_json_errors(const std::string& what, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(what + ": " + e.what());
  }
}

}  // namespace hsreg

#endif  // HSREG_SRC_JSON_IO_HPP_
