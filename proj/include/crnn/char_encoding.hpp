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

// Character quantization over a fixed 70-symbol alphabet and the text
// clean-up applied before features are extracted.

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace crnn {

class Alphabet {
 public:
  static constexpr std::size_t kSize = 70;

  // Letters at 0-25, digits at 26-35, then 34 symbols. The symbol row is the
  // 32 printable ASCII punctuation marks followed by newline and tab.
  Alphabet();

  std::optional<std::size_t> position(char c) const;
  char symbol(std::size_t position) const { return symbols_[position]; }
  std::string_view symbols() const { return symbols_; }
  std::size_t size() const { return symbols_.size(); }

 private:
  std::string symbols_;
  std::array<std::int16_t, 256> index_{};
};

const Alphabet& build_alphabet();

// One-hot quantized text: n rows by 70 columns, stored as one column index
// per row (or kEmpty for an all-zero row).
class CharMatrix {
 public:
  static constexpr std::int32_t kEmpty = -1;

  CharMatrix() = default;
  CharMatrix(std::vector<std::int32_t> indices, std::size_t original_length);

  std::size_t rows() const { return indices_.size(); }
  static constexpr std::size_t cols() { return Alphabet::kSize; }
  // Text characters encoded before padding, at most rows().
  std::size_t original_length() const { return original_length_; }
  std::span<const std::int32_t> indices() const { return indices_; }

  double at(std::size_t row, std::size_t col) const {
    return indices_[row] == static_cast<std::int32_t>(col) ? 1.0 : 0.0;
  }
  // Row-major n x 70 matrix of zeros and ones.
  std::vector<double> dense() const;

 private:
  std::vector<std::int32_t> indices_;
  std::size_t original_length_ = 0;
};

// Lowercases, keeps the first n bytes, zero-pads on the right. Bytes outside
// the alphabet (space, uppercase-folded misses, non-ASCII) become zero rows.
CharMatrix encode(std::string_view text, std::size_t n,
                  const Alphabet& alphabet = build_alphabet());

// Inverse of encode over the first min(original_length, rows) positions;
// zero rows come back as `placeholder`.
std::string decode(const CharMatrix& matrix, char placeholder = ' ',
                   const Alphabet& alphabet = build_alphabet());

class StopwordList {
 public:
  StopwordList() = default;
  explicit StopwordList(std::unordered_set<std::string> words) : words_(std::move(words)) {}

  // One token per line; blank lines and '#' comments ignored.
  static StopwordList parse(std::string_view text);
  static StopwordList load(const std::string& path);
  static const StopwordList& bundled();

  bool contains(std::string_view lowercase_token) const {
    return words_.count(std::string(lowercase_token)) > 0;
  }
  std::size_t size() const { return words_.size(); }

 private:
  std::unordered_set<std::string> words_;
};

struct PreprocessOptions {
  bool strip_metadata = false;
  bool remove_stopwords = false;
};

// Drops leading "Key: value" header lines (and the blank line after them),
// '>'-quoted lines, and everything from a "--" signature line onward.
std::string strip_metadata(std::string_view text);
// Removes whitespace-delimited tokens found (case-insensitively) in the list.
std::string remove_stopwords(std::string_view text,
                             const StopwordList& stopwords = StopwordList::bundled());
std::string preprocess(std::string_view text, const PreprocessOptions& options,
                       const StopwordList& stopwords = StopwordList::bundled());

std::string to_lower_ascii(std::string_view text);
std::vector<std::string> split_whitespace(std::string_view text);

}  // namespace crnn
