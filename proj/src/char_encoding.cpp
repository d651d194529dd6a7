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

#include "crnn/char_encoding.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <regex>
#include <sstream>
#include <stdexcept>

namespace crnn {

namespace detail {
extern const std::string_view kBundledStopwords;
}

namespace {
constexpr std::string_view kLetters = "abcdefghijklmnopqrstuvwxyz";
constexpr std::string_view kDigits = "0123456789";
// Punctuation and whitespace, in index order.
constexpr std::string_view kSymbols = "-,;.!?:'\"/\\|_@#$%^&*~`+=<>()[]{}\n\t";

char lower(char c) {
  return static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
}
}  // namespace

Alphabet::Alphabet() {
  symbols_.reserve(kSize);
  symbols_.append(kLetters).append(kDigits).append(kSymbols);
  if (symbols_.size() != kSize) throw std::logic_error("alphabet must hold 70 symbols");
  index_.fill(-1);
  for (std::size_t i = 0; i < symbols_.size(); ++i) {
    auto& slot = index_[static_cast<unsigned char>(symbols_[i])];
    if (slot != -1) throw std::logic_error("duplicate alphabet symbol");
    slot = static_cast<std::int16_t>(i);
  }
}

std::optional<std::size_t> Alphabet::position(char c) const {
  const auto i = index_[static_cast<unsigned char>(c)];
  if (i < 0) return std::nullopt;
  return static_cast<std::size_t>(i);
}

const Alphabet& build_alphabet() {
  static const Alphabet alphabet;
  return alphabet;
}

CharMatrix::CharMatrix(std::vector<std::int32_t> indices, std::size_t original_length)
    : indices_(std::move(indices)), original_length_(original_length) {
  for (auto i : indices_) {
    if (i != kEmpty && (i < 0 || i >= static_cast<std::int32_t>(Alphabet::kSize))) {
      throw std::out_of_range("CharMatrix column index out of range");
    }
  }
}

std::vector<double> CharMatrix::dense() const {
  std::vector<double> out(rows() * cols(), 0.0);
  for (std::size_t r = 0; r < rows(); ++r) {
    if (indices_[r] != kEmpty) out[r * cols() + static_cast<std::size_t>(indices_[r])] = 1.0;
  }
  return out;
}

CharMatrix encode(std::string_view text, std::size_t n, const Alphabet& alphabet) {
  if (n == 0) throw std::invalid_argument("encode: sequence length must be positive");
  std::vector<std::int32_t> indices(n, CharMatrix::kEmpty);
  const std::size_t used = std::min(n, text.size());
  for (std::size_t i = 0; i < used; ++i) {
    if (auto p = alphabet.position(lower(text[i]))) indices[i] = static_cast<std::int32_t>(*p);
  }
  return CharMatrix(std::move(indices), used);
}

std::string decode(const CharMatrix& matrix, char placeholder, const Alphabet& alphabet) {
  const std::size_t len = std::min(matrix.original_length(), matrix.rows());
  std::string out(len, placeholder);
  for (std::size_t i = 0; i < len; ++i) {
    const auto idx = matrix.indices()[i];
    if (idx != CharMatrix::kEmpty) out[i] = alphabet.symbol(static_cast<std::size_t>(idx));
  }
  return out;
}

// ---- stopwords ------------------------------------------------------------

StopwordList StopwordList::parse(std::string_view text) {
  std::unordered_set<std::string> words;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto last = line.find_last_not_of(" \t\r");
    words.insert(to_lower_ascii(line.substr(first, last - first + 1)));
  }
  return StopwordList(std::move(words));
}

StopwordList StopwordList::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open stopword file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

const StopwordList& StopwordList::bundled() {
  static const StopwordList list = parse(detail::kBundledStopwords);
  return list;
}

// ---- preprocessing --------------------------------------------------------

std::string to_lower_ascii(std::string_view text) {
  std::string out(text);
  for (auto& c : out) c = lower(c);
  return out;
}

std::vector<std::string> split_whitespace(std::string_view text) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    const std::size_t start = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i > start) tokens.emplace_back(text.substr(start, i - start));
  }
  return tokens;
}

namespace {
std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = text.find('\n', start);
    if (end == std::string_view::npos) {
      lines.emplace_back(text.substr(start));
      break;
    }
    lines.emplace_back(text.substr(start, end - start));
    start = end + 1;
  }
  return lines;
}

std::string rstrip(std::string s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
  return s;
}

bool is_blank(const std::string& s) { return rstrip(s).empty(); }
}  // namespace

std::string strip_metadata(std::string_view text) {
  static const std::regex header(R"(^[A-Za-z][A-Za-z0-9_-]*:( .*)?\r?$)");
  const auto lines = split_lines(text);

  std::size_t header_end = 0;
  while (header_end < lines.size() && !is_blank(lines[header_end])) ++header_end;

  std::vector<std::string> kept;
  bool removed_header = false;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string& line = lines[i];
    if (i < header_end && std::regex_match(line, header)) {
      removed_header = true;
      continue;
    }
    if (i == header_end && removed_header) continue;  // header separator
    if (rstrip(line) == "--") break;                  // signature block
    if (!line.empty() && line[0] == '>') continue;
    kept.push_back(line);
  }

  while (!kept.empty() && is_blank(kept.front())) kept.erase(kept.begin());
  while (!kept.empty() && is_blank(kept.back())) kept.pop_back();
  std::string out;
  for (std::size_t i = 0; i < kept.size(); ++i) {
    if (i) out += '\n';
    out += kept[i];
  }
  return out;
}

std::string remove_stopwords(std::string_view text, const StopwordList& stopwords) {
  std::string out;
  for (const auto& token : split_whitespace(text)) {
    if (stopwords.contains(to_lower_ascii(token))) continue;
    if (!out.empty()) out += ' ';
    out += token;
  }
  return out;
}

std::string preprocess(std::string_view text, const PreprocessOptions& options,
                       const StopwordList& stopwords) {
  std::string out(text);
  if (options.strip_metadata) out = strip_metadata(out);
  if (options.remove_stopwords) out = remove_stopwords(out, stopwords);
  return out;
}

}  // namespace crnn
