/*
 * Copyright 2026 The CRNN Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Plain "key=value" text blocks, one pair per line, '#' starts a comment.

#pragma once

#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace crnn {

// Keys keep first-seen order; duplicate keys and lines without '=' are
// errors naming the line number.
std::vector<std::pair<std::string, std::string>> parse_key_values(std::string_view text);

double parse_double(std::string_view key, std::string_view value);
unsigned long long parse_unsigned(std::string_view key, std::string_view value);

}  // namespace crnn
