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

#ifndef HSREG_CSV_HPP_
#define HSREG_CSV_HPP_

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace hsreg {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Index of a header column; throws DataError when absent.
  std::size_t column(const std::string& name) const;
};

// RFC 4180: fields containing comma, quote, CR or LF are quoted and embedded
// quotes doubled. Rows end with CRLF-free "\n".
std::string csv_escape(const std::string& field);
void write_csv_row(std::ostream& out, const std::vector<std::string>& fields);

// Parses RFC 4180 text. The first record is the header; every row must have
// the header's field count.
CsvTable parse_csv(std::istream& in);
CsvTable read_csv_file(const std::filesystem::path& path);

}  // namespace hsreg

#endif  // HSREG_CSV_HPP_
