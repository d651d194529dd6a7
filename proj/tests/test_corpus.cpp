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

#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

using namespace crnn;
namespace fs = std::filesystem;

namespace {

LabeledCorpus from_tsv(const std::string& text, const std::string& name = "t") {
  std::istringstream in(text);
  return parse_tsv(in, name);
}

std::string error_of(const std::string& text) {
  try {
    from_tsv(text);
  } catch (const CorpusError& e) {
    return e.what();
  }
  return {};
}

LabeledCorpus numbered(std::size_t n, std::size_t classes) {
  LabeledCorpus c;
  c.name = "numbered";
  for (std::size_t i = 0; i < n; ++i) c.add("c" + std::to_string(i % classes), "record " + std::to_string(i));
  return c;
}

std::vector<std::string> texts_of(const LabeledCorpus& c) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < c.size(); ++i) out.push_back(c.text(i));
  return out;
}

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("crnn_corpus_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_file(const fs::path& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary);
  out << data;
}

}  // namespace

TEST_CASE("tsv parsing") {
  const auto c = from_tsv("A\thello\nB\tworld");
  CHECK(c.size() == 2);
  CHECK(c.num_classes() == 2);
  CHECK(c.label(0) == "A");
  CHECK(c.text(1) == "world");
  CHECK(c.name == "t");

  const auto d = from_tsv("y\tone\n\n  \nx\ttwo\r\ny\tthree\tfour\n");
  CHECK(d.size() == 3);
  CHECK(d.label_names() == std::vector<std::string>{"y", "x"});
  CHECK(d.class_id(2) == 0);
  CHECK(d.text(2) == "three\tfour");
}

TEST_CASE("tsv errors name the line") {
  CHECK(error_of("A\tok\nno tab here\n").find(":2:") != std::string::npos);
  CHECK(error_of("A\tok\n\n\tmissing label\n").find(":3:") != std::string::npos);
  CHECK(!error_of("\n\n").empty());
  CHECK_THROWS_AS(load_corpus("/nonexistent/corpus.tsv"), CorpusError);
}

TEST_CASE("tsv round trip through a file") {
  LabeledCorpus c;
  c.add("a", "line one");
  c.add("b", "tab\there and\nnewline");
  const auto path = (fs::temp_directory_path() / "crnn_roundtrip.tsv").string();
  save_corpus(c, path);
  const auto back = load_corpus(path);
  CHECK(back.name == "crnn_roundtrip");
  CHECK(back.size() == 2);
  CHECK(back.text(1) == "tab here and newline");
  CHECK(back.label(1) == "b");
  fs::remove(path);
}

TEST_CASE("empty labels are rejected") {
  LabeledCorpus c;
  CHECK_THROWS_AS(c.add("", "x"), CorpusError);
  CHECK_THROWS_AS(c.add_with_id(0, "x"), CorpusError);
}

TEST_CASE("stats of a single record") {
  const auto s = stats(from_tsv("L\ta b c"));
  CHECK(s.size == 1);
  CHECK(s.vocabulary == 3);
  CHECK(s.total_words == 3);
  CHECK(s.mst == 3.0);
  CHECK(s.classes == 1);
  CHECK_THROWS_AS(stats(LabeledCorpus{}), CorpusError);
}

TEST_CASE("stats lowercase, count and are order independent") {
  const auto c = from_tsv("A\tThe cat  sat\nB\tthe DOG\nA\tcat\n");
  const auto s = stats(c);
  CHECK(s.vocabulary == 4);
  CHECK(s.total_words == 6);
  CHECK(s.mst == doctest::Approx(2.0));
  CHECK(s.classes == 2);

  const auto r = stats(from_tsv("A\tcat\nB\tthe DOG\nA\tThe cat  sat\n"));
  CHECK(r.size == s.size);
  CHECK(r.vocabulary == s.vocabulary);
  CHECK(r.total_words == s.total_words);
  CHECK(r.mst == s.mst);
  CHECK(r.classes == s.classes);

  StatsOptions sw;
  sw.remove_stopwords = true;
  const auto t = stats(c, sw);
  CHECK(t.total_words == 4);
  CHECK(t.vocabulary == 3);

  CHECK(stats_csv_header() == "name,size,vocabulary,total_words,mst,classes");
  CHECK(stats_csv_row(s) == "t,3,4,6,2.00,2");
  const auto table = stats_table({s});
  CHECK(table.find("vocabulary") != std::string::npos);
  CHECK(table.find("2.00") != std::string::npos);
}

TEST_CASE("class ids stay below the class count") {
  const auto c = synthetic_news(3);
  const auto s = stats(c);
  for (std::size_t i = 0; i < c.size(); ++i) CHECK(c.class_id(i) < s.classes);
}

TEST_CASE("filter drops tokens below the frequency floor") {
  LabeledCorpus c;
  for (int i = 0; i < 9; ++i) c.add("a", "rare common");
  c.add("a", "common");
  const auto f = filter(c, {10, 500, TextPath::kBagOfWords});
  for (std::size_t i = 0; i < f.size(); ++i) CHECK(f.text(i) == "common");

  c.add("b", "Rare");
  const auto g = filter(c, {10, 500, TextPath::kBagOfWords});
  CHECK(g.text(0) == "rare common");
  CHECK(g.text(10) == "Rare");

  const auto chars = filter(c, {10, 500, TextPath::kCharacter});
  CHECK(chars.text(0) == "rare common");
}

TEST_CASE("filter truncates long records") {
  std::string text;
  for (int i = 0; i < 600; ++i) text += "w" + std::to_string(i % 3) + ' ';
  LabeledCorpus c;
  c.add("a", text);
  for (auto path : {TextPath::kBagOfWords, TextPath::kCharacter}) {
    const auto f = filter(c, {0, 500, path});
    CHECK(split_whitespace(f.text(0)).size() == 500);
  }
  const auto g = filter(c, {10, 500, TextPath::kBagOfWords});
  CHECK(split_whitespace(g.text(0)).size() == 500);
}

TEST_CASE("filter identity and idempotence") {
  const auto c = synthetic_news(1);
  const auto id = filter(c, {0, std::numeric_limits<std::size_t>::max(), TextPath::kBagOfWords});
  CHECK(texts_of(id) == texts_of(c));
  for (std::size_t i = 0; i < c.size(); ++i) CHECK(id.class_id(i) == c.class_id(i));

  for (auto path : {TextPath::kBagOfWords, TextPath::kCharacter}) {
    const FilterOptions o{10, 20, path};
    const auto once = filter(c, o);
    const auto twice = filter(once, o);
    CHECK(texts_of(once) == texts_of(twice));
  }
}

TEST_CASE("split is seeded, disjoint and shares the label index") {
  const auto c = numbered(100, 4);
  const SplitPlan plan{60, 40, 10, 9};
  const auto [train, test] = split(c, plan);
  CHECK(train.size() == 60);
  CHECK(test.size() == 40);
  CHECK(train.label_names() == c.label_names());
  CHECK(test.label_names() == c.label_names());
  std::set<std::string> all;
  for (const auto& t : texts_of(train)) all.insert(t);
  for (const auto& t : texts_of(test)) all.insert(t);
  CHECK(all.size() == 100);
  for (std::size_t i = 0; i < train.size(); ++i) {
    const std::size_t n = std::stoul(train.text(i).substr(7));
    CHECK(train.class_id(i) == n % 4);
  }

  const auto [train2, test2] = split(c, plan);
  CHECK(texts_of(train2) == texts_of(train));
  CHECK(texts_of(test2) == texts_of(test));

  const auto [train3, test3] = split(c, SplitPlan{60, 40, 10, 10});
  CHECK(texts_of(train3) != texts_of(train));
}

TEST_CASE("split rejects impossible plans") {
  const auto c = numbered(10, 2);
  CHECK_THROWS_AS(split(c, {8, 3, 1, 0}), CorpusError);
  CHECK_THROWS_AS(split(c, {0, 3, 1, 0}), CorpusError);
  CHECK_THROWS_AS(split(c, {3, 0, 1, 0}), CorpusError);
  CHECK_NOTHROW(split(c, {7, 3, 1, 0}));
}

TEST_CASE("standard splits") {
  const auto qc = standard_split("qc");
  CHECK(qc.train_count == 5000);
  CHECK(qc.test_count == 500);
  CHECK(qc.batch_size == 250);
  const auto twenty = standard_split("Twenty", 4);
  CHECK(twenty.train_count == 1000);
  CHECK(twenty.test_count == 100);
  CHECK(twenty.batch_size == 50);
  CHECK(twenty.seed == 4);
  CHECK(standard_split("brown").train_count == 5000);
  CHECK(standard_split("google").batch_size == 50);
  CHECK_THROWS_AS(standard_split("imdb"), CorpusError);
}

TEST_CASE("question classification converter") {
  const auto dir = scratch_dir("qc");
  write_file(dir / "train.label", "DESC:manner How did serfdom develop ?\nENTY:cremat What films featured Popeye ?\n");
  write_file(dir / "test.label", "DESC:manner How far is it ?\r\n\n");
  const auto c = convert_qc({(dir / "train.label").string(), (dir / "test.label").string()});
  CHECK(c.size() == 3);
  CHECK(c.num_classes() == 2);
  CHECK(c.label(2) == "DESC:manner");
  CHECK(c.text(0) == "How did serfdom develop ?");
  write_file(dir / "bad.label", "no label here\n");
  CHECK_THROWS_AS(convert_qc({(dir / "bad.label").string()}), CorpusError);
  CHECK_THROWS_AS(convert_qc({(dir / "missing").string()}), CorpusError);
  fs::remove_all(dir);
}

TEST_CASE("Brown converter") {
  const auto dir = scratch_dir("brown");
  write_file(dir / "ca01", "\n\tThe/at Fulton/np-tl County/nn-tl said/vbd ./.\n\n\tIt/pps ended/vbd ./.\n");
  write_file(dir / "cr09", "\tFunny/jj thing/nn ./.\n");
  write_file(dir / "README", "not a corpus file\n");
  write_file(dir / "cats.txt", "ca01 news\n");
  const auto c = convert_brown(dir.string());
  CHECK(c.size() == 3);
  CHECK(c.text(0) == "The Fulton County said .");
  CHECK(c.label(0) == "news");
  CHECK(c.label(2) == "humor");
  CHECK_THROWS_AS(convert_brown((dir / "nope").string()), CorpusError);
  fs::remove_all(dir);
}

TEST_CASE("newsgroup converter strips metadata") {
  const auto dir = scratch_dir("news");
  fs::create_directories(dir / "sci.space");
  fs::create_directories(dir / "rec.autos");
  write_file(dir / "sci.space" / "1",
             "From: someone@example.com\nSubject: orbit\n\nThe launch\nwent well.\n> quoted\n--\nsig\n");
  write_file(dir / "rec.autos" / "7", "Subject: cars\n\nFast   car\n");
  const auto c = convert_newsgroups(dir.string());
  REQUIRE(c.size() == 2);
  CHECK(c.label(0) == "rec.autos");
  CHECK(c.text(0) == "Fast car");
  CHECK(c.text(1) == "The launch went well.");
  fs::remove_all(dir);
}

TEST_CASE("synthetic generators") {
  const auto news = synthetic_news(0);
  const auto s = stats(news);
  CHECK(s.size == 2066);
  CHECK(s.classes == 55);
  CHECK(s.mst == doctest::Approx(24.0).epsilon(0.05));
  CHECK(texts_of(synthetic_news(0)) == texts_of(news));

  const auto m = synthetic_motifs(20, 3);
  CHECK(m.size() == 20);
  CHECK(m.num_classes() == 2);
  for (std::size_t i = 0; i < m.size(); ++i) {
    const bool left = m.text(i).find("xyxy") != std::string::npos;
    const bool right = m.text(i).find("zwzw") != std::string::npos;
    CHECK(left == (m.class_id(i) == 0));
    CHECK(right == (m.class_id(i) == 1));
  }
}
