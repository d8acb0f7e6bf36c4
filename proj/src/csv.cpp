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
#include "tvepi/csv.h"
#include "tvepi/errors.h"

#include <charconv>
#include <system_error>

namespace tvepi::csv
{

std::string format_double(double value)
{
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

std::vector<std::string> split_line(std::string_view line, char sep)
{
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        auto pos = line.find(sep, start);
        if (pos == std::string_view::npos) {
            fields.emplace_back(line.substr(start));
            break;
        }
        fields.emplace_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return fields;
}

double parse_double(std::string_view field)
{
    double value = 0.0;
    auto res = std::from_chars(field.data(), field.data() + field.size(), value);
    if (res.ec != std::errc() || res.ptr != field.data() + field.size() || field.empty()) {
        throw ParseError("not a number: '" + std::string(field) + "'");
    }
    return value;
}

long long parse_integer(std::string_view field)
{
    long long value = 0;
    auto res = std::from_chars(field.data(), field.data() + field.size(), value);
    if (res.ec != std::errc() || res.ptr != field.data() + field.size() || field.empty()) {
        throw ParseError("not an integer: '" + std::string(field) + "'");
    }
    return value;
}

std::vector<std::vector<std::string>> read_table(std::istream& in, std::string_view expected_header)
{
    std::string line;
    auto next_line = [&]() {
        while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r') {
                line.pop_back();
            }
            if (!line.empty()) {
                return true;
            }
        }
        return false;
    };
    if (!next_line()) {
        throw ParseError("empty CSV input, expected header '" + std::string(expected_header) + "'");
    }
    if (line != expected_header) {
        throw ParseError("unexpected CSV header '" + line + "', expected '" + std::string(expected_header) + "'");
    }
    auto ncols = split_line(expected_header).size();
    std::vector<std::vector<std::string>> rows;
    while (next_line()) {
        auto fields = split_line(line);
        if (fields.size() != ncols) {
            throw ParseError("row '" + line + "' has " + std::to_string(fields.size()) + " fields, expected " +
                             std::to_string(ncols));
        }
        rows.push_back(std::move(fields));
    }
    return rows;
}

} // namespace tvepi::csv
