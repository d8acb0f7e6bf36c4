/*
* Copyright (C) 2026 The tvepi Authors
*
* Licensed under the Apache License, Version 2.0 (the "License");
* you may not use this file except in compliance with the License.
* You may obtain a copy of the License at
*
*     http://www.apache.org/licenses/LICENSE-2.0
*
* Unless required by applicable law or agreed to in writing, software
* distributed under the License is distributed on an "AS IS" BASIS,
* WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
* See the License for the specific language governing permissions and
* limitations under the License.
*/
#ifndef TVEPI_CSV_H
#define TVEPI_CSV_H

#include <istream>
#include <string>
#include <string_view>
#include <vector>

namespace tvepi::csv
{

/// Shortest decimal representation that parses back to the same double.
std::string format_double(double value);

std::vector<std::string> split_line(std::string_view line, char sep = ',');

/// Parse a whole field as a double; throws ParseError otherwise.
double parse_double(std::string_view field);
long long parse_integer(std::string_view field);

/**
 * @brief Read a CSV table whose header must match `expected_header` exactly.
 * Blank lines are skipped, '\r' line endings are tolerated.
 * @return the data rows, each already split into fields.
 */
std::vector<std::vector<std::string>> read_table(std::istream& in, std::string_view expected_header);

} // namespace tvepi::csv

#endif // TVEPI_CSV_H
