// Copyright 2026 The amenet Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace amenet {

/// Ordered `key=value` pairs. Later assignments to a key replace earlier ones.
using KeyValues = std::map<std::string, std::string>;

/// Parses flat `key=value` text. Blank lines and lines starting with `#` are
/// ignored; surrounding whitespace is trimmed. Throws ParseError.
KeyValues parse_key_values(std::string_view text);

/// Parses a single `key=value` override such as a `--set` argument.
std::pair<std::string, std::string> parse_assignment(std::string_view text);

std::string format_key_values(const KeyValues& kv);

int parse_int(const std::string& key, const std::string& value);
double parse_number(const std::string& key, const std::string& value);
bool parse_bool(const std::string& key, const std::string& value);
/// Shortest text that parses back to the same double.
std::string format_number(double v);

std::vector<std::string> split_list(const std::string& value, char sep = ',');

}  // namespace amenet
