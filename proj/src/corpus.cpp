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

#include "crnn/corpus.hpp"

#include "crnn/rng.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace crnn {

namespace fs = std::filesystem;

// ---- LabeledCorpus --------------------------------------------------------

void LabeledCorpus::add(const std::string& label, std::string text) {
  if (label.empty()) throw CorpusError("empty label");
  auto [it, inserted] = label_ids_.emplace(label, labels_.size());
  if (inserted) labels_.push_back(label);
  class_ids_.push_back(it->second);
  texts_.push_back(std::move(text));
}

void LabeledCorpus::add_with_id(std::size_t class_id, std::string text) {
  if (class_id >= labels_.size()) throw CorpusError("class id outside the label index");
  class_ids_.push_back(class_id);
  texts_.push_back(std::move(text));
}

LabeledCorpus LabeledCorpus::empty_like() const {
  LabeledCorpus c;
  c.name = name;
  c.labels_ = labels_;
  c.label_ids_ = label_ids_;
  return c;
}

// ---- TSV ------------------------------------------------------------------

LabeledCorpus parse_tsv(std::istream& in, const std::string& name) {
  LabeledCorpus corpus;
  corpus.name = name;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw CorpusError(name + ":" + std::to_string(number) + ": missing tab between label and text");
    }
    const std::string label = line.substr(0, tab);
    if (label.empty()) throw CorpusError(name + ":" + std::to_string(number) + ": empty label");
    corpus.add(label, line.substr(tab + 1));
  }
  if (corpus.empty()) throw CorpusError(name + ": corpus has no records");
  return corpus;
}

LabeledCorpus load_corpus(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CorpusError("cannot open corpus: " + path);
  return parse_tsv(in, fs::path(path).stem().string());
}

namespace {
std::string flatten(const std::string& text) {
  std::string out = text;
  for (auto& c : out)
    if (c == '\t' || c == '\n' || c == '\r') c = ' ';
  return out;
}
}  // namespace

void write_tsv(const LabeledCorpus& corpus, std::ostream& out) {
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    out << flatten(corpus.label(i)) << '\t' << flatten(corpus.text(i)) << '\n';
  }
}

void save_corpus(const LabeledCorpus& corpus, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CorpusError("cannot write corpus: " + path);
  write_tsv(corpus, out);
}

// ---- stats ----------------------------------------------------------------

namespace {
std::vector<std::string> tokens_of(const std::string& text, const StatsOptions& options) {
  auto tokens = split_whitespace(to_lower_ascii(text));
  if (options.remove_stopwords) {
    const auto& sw = StopwordList::bundled();
    std::erase_if(tokens, [&](const std::string& t) { return sw.contains(t); });
  }
  return tokens;
}
}  // namespace

CorpusStats stats(const LabeledCorpus& corpus, const StatsOptions& options) {
  if (corpus.empty()) throw CorpusError("stats: empty corpus");
  CorpusStats s;
  s.name = corpus.name;
  s.size = corpus.size();
  std::unordered_set<std::string> vocab;
  std::set<std::size_t> classes;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto tokens = tokens_of(corpus.text(i), options);
    s.total_words += tokens.size();
    vocab.insert(tokens.begin(), tokens.end());
    classes.insert(corpus.class_id(i));
  }
  s.vocabulary = vocab.size();
  s.classes = classes.size();
  s.mst = static_cast<double>(s.total_words) / static_cast<double>(s.size);
  return s;
}

std::string stats_csv_header() { return "name,size,vocabulary,total_words,mst,classes"; }

std::string stats_csv_row(const CorpusStats& s) {
  std::ostringstream os;
  os << s.name << ',' << s.size << ',' << s.vocabulary << ',' << s.total_words << ','
     << std::fixed << std::setprecision(2) << s.mst << ',' << s.classes;
  return os.str();
}

std::string stats_table(const std::vector<CorpusStats>& rows) {
  std::ostringstream os;
  os << std::left << std::setw(16) << "name" << std::right << std::setw(10) << "size"
     << std::setw(12) << "vocabulary" << std::setw(13) << "total_words" << std::setw(8) << "mst"
     << std::setw(9) << "classes" << '\n';
  for (const auto& s : rows) {
    os << std::left << std::setw(16) << s.name << std::right << std::setw(10) << s.size
       << std::setw(12) << s.vocabulary << std::setw(13) << s.total_words << std::setw(8)
       << std::fixed << std::setprecision(2) << s.mst << std::setw(9) << s.classes << '\n';
  }
  return os.str();
}

// ---- filter ---------------------------------------------------------------

namespace {
// Prefix of `text` holding its first `max_tokens` whitespace tokens, with
// the original spacing preserved.
std::string truncate_tokens(const std::string& text, std::size_t max_tokens) {
  std::size_t count = 0;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i == text.size()) break;
    if (count == max_tokens) return text.substr(0, i);
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    ++count;
  }
  return text;
}
}  // namespace

LabeledCorpus filter(const LabeledCorpus& corpus, const FilterOptions& options) {
  LabeledCorpus out = corpus.empty_like();
  std::vector<std::string> texts;
  texts.reserve(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    texts.push_back(truncate_tokens(corpus.text(i), options.max_len));
  }
  if (options.path == TextPath::kCharacter || options.min_freq <= 1) {
    for (std::size_t i = 0; i < corpus.size(); ++i) out.add_with_id(corpus.class_id(i), texts[i]);
    return out;
  }
  std::unordered_map<std::string, std::size_t> freq;
  for (const auto& t : texts)
    for (const auto& tok : split_whitespace(to_lower_ascii(t))) ++freq[tok];
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    std::string kept;
    for (const auto& tok : split_whitespace(texts[i])) {
      if (freq[to_lower_ascii(tok)] < options.min_freq) continue;
      if (!kept.empty()) kept += ' ';
      kept += tok;
    }
    out.add_with_id(corpus.class_id(i), std::move(kept));
  }
  return out;
}

// ---- split ----------------------------------------------------------------

SplitPlan standard_split(const std::string& corpus_name, std::uint64_t seed) {
  const std::string n = to_lower_ascii(corpus_name);
  if (n == "qc") return {5000, 500, 250, seed};
  if (n == "brown") return {5000, 500, 250, seed};
  if (n == "twenty") return {1000, 100, 50, seed};
  if (n == "google") return {2000, 66, 50, seed};
  throw CorpusError("no standard split for corpus '" + corpus_name + "'");
}

std::pair<LabeledCorpus, LabeledCorpus> split(const LabeledCorpus& corpus, const SplitPlan& plan) {
  if (plan.train_count == 0 || plan.test_count == 0) {
    throw CorpusError("split: train and test counts must be positive");
  }
  if (plan.train_count + plan.test_count > corpus.size()) {
    throw CorpusError("split: " + std::to_string(plan.train_count) + " + " +
                      std::to_string(plan.test_count) + " records requested from a corpus of " +
                      std::to_string(corpus.size()));
  }
  std::vector<std::size_t> order(corpus.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng = Rng(plan.seed).split("split");
  rng.shuffle(order);

  LabeledCorpus train = corpus.empty_like();
  LabeledCorpus test = corpus.empty_like();
  train.name = corpus.name + ".train";
  test.name = corpus.name + ".test";
  for (std::size_t i = 0; i < plan.train_count; ++i) {
    train.add_with_id(corpus.class_id(order[i]), corpus.text(order[i]));
  }
  for (std::size_t i = plan.train_count; i < plan.train_count + plan.test_count; ++i) {
    test.add_with_id(corpus.class_id(order[i]), corpus.text(order[i]));
  }
  return {std::move(train), std::move(test)};
}

// ---- converters -----------------------------------------------------------

LabeledCorpus convert_qc(const std::vector<std::string>& paths) {
  LabeledCorpus corpus;
  corpus.name = "qc";
  for (const auto& path : paths) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CorpusError("cannot open question file: " + path);
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
      ++number;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.find_first_not_of(" \t") == std::string::npos) continue;
      const auto space = line.find(' ');
      const auto colon = line.find(':');
      if (space == std::string::npos || colon == std::string::npos || colon > space) {
        throw CorpusError(path + ":" + std::to_string(number) + ": expected 'COARSE:fine text'");
      }
      corpus.add(line.substr(0, space), line.substr(space + 1));
    }
  }
  if (corpus.empty()) throw CorpusError("question files hold no records");
  return corpus;
}

namespace {
const std::map<char, std::string>& brown_categories() {
  static const std::map<char, std::string> m{
      {'a', "news"},       {'b', "editorial"},      {'c', "reviews"},   {'d', "religion"},
      {'e', "hobbies"},    {'f', "lore"},           {'g', "belles_lettres"},
      {'h', "government"}, {'j', "learned"},        {'k', "fiction"},   {'l', "mystery"},
      {'m', "science_fiction"},                     {'n', "adventure"}, {'p', "romance"},
      {'r', "humor"}};
  return m;
}

std::vector<fs::path> sorted_entries(const fs::path& dir, bool directories) {
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (directories ? e.is_directory() : e.is_regular_file()) out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}
}  // namespace

LabeledCorpus convert_brown(const std::string& directory) {
  if (!fs::is_directory(directory)) throw CorpusError("not a directory: " + directory);
  LabeledCorpus corpus;
  corpus.name = "brown";
  for (const auto& file : sorted_entries(directory, false)) {
    const std::string stem = file.filename().string();
    if (stem.size() != 4 || stem[0] != 'c' || !std::isdigit(static_cast<unsigned char>(stem[2])) ||
        !std::isdigit(static_cast<unsigned char>(stem[3]))) {
      continue;
    }
    const auto cat = brown_categories().find(stem[1]);
    if (cat == brown_categories().end()) continue;
    std::ifstream in(file, std::ios::binary);
    std::string line;
    while (std::getline(in, line)) {
      std::string sentence;
      for (const auto& tok : split_whitespace(line)) {
        const auto slash = tok.rfind('/');
        const std::string word = slash == std::string::npos || slash == 0 ? tok : tok.substr(0, slash);
        if (!sentence.empty()) sentence += ' ';
        sentence += word;
      }
      if (!sentence.empty()) corpus.add(cat->second, std::move(sentence));
    }
  }
  if (corpus.empty()) throw CorpusError("no Brown corpus files found in " + directory);
  return corpus;
}

LabeledCorpus convert_newsgroups(const std::string& directory) {
  if (!fs::is_directory(directory)) throw CorpusError("not a directory: " + directory);
  LabeledCorpus corpus;
  corpus.name = "twenty";
  for (const auto& group : sorted_entries(directory, true)) {
    for (const auto& file : sorted_entries(group, false)) {
      std::ifstream in(file, std::ios::binary);
      std::stringstream ss;
      ss << in.rdbuf();
      std::string body = strip_metadata(ss.str());
      std::string flat;
      for (const auto& tok : split_whitespace(body)) {
        if (!flat.empty()) flat += ' ';
        flat += tok;
      }
      if (!flat.empty()) corpus.add(group.filename().string(), std::move(flat));
    }
  }
  if (corpus.empty()) throw CorpusError("no newsgroup messages found in " + directory);
  return corpus;
}

namespace {
std::string random_word(Rng& rng) {
  static constexpr std::string_view letters = "abcdefghijklmnopqrstuvwxyz";
  const std::size_t len = 3 + rng.index(7);
  std::string w;
  for (std::size_t i = 0; i < len; ++i) w += letters[rng.index(letters.size())];
  return w;
}
}  // namespace

LabeledCorpus synthetic_news(std::uint64_t seed) {
  constexpr std::size_t kClasses = 55;
  constexpr std::size_t kRecords = 2066;
  Rng rng = Rng(seed).split("synthetic-news");
  std::vector<std::string> common(200);
  for (auto& w : common) w = random_word(rng);
  std::vector<std::vector<std::string>> topical(kClasses, std::vector<std::string>(40));
  for (auto& words : topical)
    for (auto& w : words) w = random_word(rng);

  LabeledCorpus corpus;
  corpus.name = "google-synthetic";
  for (std::size_t c = 0; c < kClasses; ++c) corpus.add("topic" + std::to_string(c), "");
  LabeledCorpus out = corpus.empty_like();
  for (std::size_t i = 0; i < kRecords; ++i) {
    const std::size_t c = i % kClasses;
    const std::size_t len = 12 + rng.index(25);  // 12..36, mean 24
    std::string text;
    for (std::size_t t = 0; t < len; ++t) {
      const bool topic = rng.uniform(0.0, 1.0) < 0.6;
      const std::string& w = topic ? topical[c][rng.index(40)] : common[rng.index(common.size())];
      if (!text.empty()) text += ' ';
      text += w;
    }
    out.add_with_id(c, std::move(text));
  }
  return out;
}

LabeledCorpus synthetic_motifs(std::size_t records, std::uint64_t seed) {
  static constexpr std::string_view filler = "abcdefghijklmnop ";
  static constexpr std::string_view motifs[] = {"xyxy", "zwzw"};
  Rng rng = Rng(seed).split("synthetic-motifs");
  LabeledCorpus corpus;
  corpus.name = "motifs";
  corpus.add("left", "");
  corpus.add("right", "");
  LabeledCorpus out = corpus.empty_like();
  for (std::size_t i = 0; i < records; ++i) {
    const std::size_t c = i % 2;
    const std::size_t len = 16 + rng.index(12);
    std::string text;
    for (std::size_t k = 0; k < len; ++k) text += filler[rng.index(filler.size())];
    text.insert(rng.index(len + 1), motifs[c]);
    out.add_with_id(c, std::move(text));
  }
  return out;
}

}  // namespace crnn
