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

// Labeled text corpora: TSV ingestion, native-format converters, summary
// statistics, frequency/length filtering and seeded train/test splits.

#pragma once

#include "crnn/char_encoding.hpp"

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace crnn {

class CorpusError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class LabeledCorpus {
 public:
  std::string name;

  // Appends a record, assigning the next class id to unseen labels.
  void add(const std::string& label, std::string text);
  // Appends a record whose label already exists in the index.
  void add_with_id(std::size_t class_id, std::string text);

  std::size_t size() const { return texts_.size(); }
  bool empty() const { return texts_.empty(); }
  std::size_t num_classes() const { return labels_.size(); }

  const std::string& text(std::size_t i) const { return texts_[i]; }
  std::string& text(std::size_t i) { return texts_[i]; }
  std::size_t class_id(std::size_t i) const { return class_ids_[i]; }
  const std::string& label(std::size_t i) const { return labels_[class_ids_[i]]; }
  const std::vector<std::string>& label_names() const { return labels_; }

  // Empty corpus sharing this corpus's label index.
  LabeledCorpus empty_like() const;

 private:
  std::vector<std::string> labels_;
  std::map<std::string, std::size_t> label_ids_;
  std::vector<std::size_t> class_ids_;
  std::vector<std::string> texts_;
};

// `label<TAB>text` per line; blank lines skipped.
LabeledCorpus parse_tsv(std::istream& in, const std::string& name);
LabeledCorpus load_corpus(const std::string& path);
// Tabs and newlines inside texts are written as spaces.
void write_tsv(const LabeledCorpus& corpus, std::ostream& out);
void save_corpus(const LabeledCorpus& corpus, const std::string& path);

struct CorpusStats {
  std::string name;
  std::size_t size = 0;
  std::size_t vocabulary = 0;
  std::size_t total_words = 0;
  double mst = 0.0;  // mean sentence length in tokens
  std::size_t classes = 0;
};

struct StatsOptions {
  bool remove_stopwords = false;
};

// Lowercase + whitespace tokenization.
CorpusStats stats(const LabeledCorpus& corpus, const StatsOptions& options = {});
std::string stats_csv_header();
std::string stats_csv_row(const CorpusStats& s);
std::string stats_table(const std::vector<CorpusStats>& rows);

enum class TextPath {
  kBagOfWords,  // drop rare tokens and truncate
  kCharacter,   // truncate only
};

struct FilterOptions {
  std::size_t min_freq = 10;
  std::size_t max_len = 500;
  TextPath path = TextPath::kBagOfWords;
};

// Truncates each record to max_len tokens, then (bag-of-words path) removes
// tokens whose frequency in the truncated corpus is below min_freq.
LabeledCorpus filter(const LabeledCorpus& corpus, const FilterOptions& options);

struct SplitPlan {
  std::size_t train_count = 0;
  std::size_t test_count = 0;
  std::size_t batch_size = 1;
  std::uint64_t seed = 0;
};

// Named plans: qc, brown, twenty, google.
SplitPlan standard_split(const std::string& corpus_name, std::uint64_t seed = 0);

// Seeded shuffle, then the first train_count records train and the next
// test_count test. Both halves share the source label index.
std::pair<LabeledCorpus, LabeledCorpus> split(const LabeledCorpus& corpus, const SplitPlan& plan);

// ---- converters -----------------------------------------------------------

// Question classification files: "COARSE:fine question words ..." per line.
LabeledCorpus convert_qc(const std::vector<std::string>& paths);
// Tagged Brown corpus directory (files ca01..cr09 of word/tag tokens, one
// sentence per line); the label is the category of the file's letter.
LabeledCorpus convert_brown(const std::string& directory);
// One subdirectory per newsgroup, one message per file; metadata stripped.
LabeledCorpus convert_newsgroups(const std::string& directory);

// Synthetic stand-in shaped like the news excerpt corpus: 55 classes, 2066
// records, about 24 tokens per record. Not real text.
LabeledCorpus synthetic_news(std::uint64_t seed);

// Two classes separated by disjoint character motifs embedded in filler.
LabeledCorpus synthetic_motifs(std::size_t records, std::uint64_t seed);

}  // namespace crnn
