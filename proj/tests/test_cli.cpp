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

#include "crnn/checkpoint.hpp"
#include "crnn/cli.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace crnn;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "crnn");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Run r;
  r.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("crnn_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_file(const fs::path& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary);
  out << data;
}

std::vector<std::string> small_model() {
  return {"--filters", "8", "--hidden", "8", "--window", "5", "--length", "40"};
}

std::vector<std::string> concat(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

}  // namespace

TEST_CASE("run config keys, overrides and errors") {
  const fs::path dir = scratch("config");
  write_file(dir / "run.cfg", "# comment\nhidden = 64\nfilters=64\ncell=mgu\nseed=5\n");
  const auto run = resolve_run_config((dir / "run.cfg").string(), {{"hidden", "32"}, {"alpha", "0.25"}});
  CHECK(run.model.filters == 64);
  CHECK(run.model.hidden == 32);
  CHECK(run.model.cell == CellKind::kMgu);
  CHECK(run.model.alpha == 0.25);
  CHECK(run.model.seed == 5);
  CHECK(run.train.seed == 5);
  CHECK(run.split.seed == 5);
  CHECK(run.given.count("cell") == 1);
  CHECK(run.given.count("steps") == 0);

  const auto text = run.to_text();
  for (const auto& key : RunConfig::keys()) CHECK(text.find(key + "=") != std::string::npos);
  RunConfig again;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    const auto eq = line.find('=');
    again.set(line.substr(0, eq), line.substr(eq + 1));
  }
  CHECK(again.to_text() == text);

  write_file(dir / "bad.cfg", "hiden=3\n");
  CHECK_THROWS_AS(resolve_run_config((dir / "bad.cfg").string(), {}), ConfigError);
  CHECK_THROWS_AS(resolve_run_config("", {{"steps", "many"}}), ConfigError);
  CHECK_THROWS_AS(resolve_run_config("", {{"cell", "rnn"}}), ConfigError);
  CHECK_THROWS_AS(resolve_run_config((dir / "missing.cfg").string(), {}), ConfigError);
  fs::remove_all(dir);
}

TEST_CASE("binding a run to a corpus") {
  LabeledCorpus small = synthetic_motifs(50, 1);
  RunConfig run = resolve_run_config("", {});
  bind_to_corpus(run, small);
  CHECK(run.model.num_classes == 2);
  CHECK(run.split.train_count == 45);
  CHECK(run.split.test_count == 5);

  LabeledCorpus qc;
  qc.name = "qc";
  for (int i = 0; i < 5600; ++i) qc.add("c" + std::to_string(i % 50), "q");
  RunConfig q = resolve_run_config("", {});
  bind_to_corpus(q, qc);
  CHECK(q.split.train_count == 5000);
  CHECK(q.split.test_count == 500);
  CHECK(q.train.batch_size == 250);
  RunConfig q2 = resolve_run_config("", {{"batch_size", "16"}});
  bind_to_corpus(q2, qc);
  CHECK(q2.train.batch_size == 16);

  RunConfig wrong = resolve_run_config("", {{"classes", "3"}});
  CHECK_THROWS_AS(bind_to_corpus(wrong, small), ConfigError);
}

TEST_CASE("usage errors exit 2") {
  CHECK(cli({}).code == kExitUsage);
  CHECK(cli({"frobnicate"}).code == kExitUsage);
  CHECK(cli({"stats"}).code == kExitUsage);
  CHECK(cli({"stats", "/nonexistent.tsv"}).code == kExitUsage);
  CHECK(cli({"gradcheck", "--no-such-flag"}).code == kExitUsage);
  CHECK(cli({"gradcheck", "--cells", "rnn"}).code == kExitUsage);
  CHECK(cli({"--help"}).code == kExitOk);
}

TEST_CASE("convert, stats, train and eval round trip") {
  const fs::path dir = scratch("flow");
  const std::string corpus = (dir / "motifs.tsv").string();
  REQUIRE(cli({"convert", "motifs", "--out", corpus, "--records", "40", "--seed", "3"}).code == kExitOk);

  const auto st = cli({"stats", corpus, "--format", "csv"});
  CHECK(st.code == kExitOk);
  CHECK(st.out.find("name,size,vocabulary,total_words,mst,classes") != std::string::npos);
  CHECK(st.out.find("motifs,40,") != std::string::npos);

  const auto tr = cli(concat({"train", corpus, "--out-dir", (dir / "run").string(), "--steps", "20",
                              "--batch-size", "8", "--eval-every", "10"},
                             small_model()));
  REQUIRE(tr.code == kExitOk);
  CHECK(tr.out.rfind("# ", 0) == 0);
  CHECK(tr.out.find("# steps=20") != std::string::npos);
  CHECK(fs::exists(dir / "run" / "model.ckpt"));
  std::ifstream trace(dir / "run" / "trace.csv");
  std::string header;
  std::getline(trace, header);
  CHECK(header == "step,loss,test_f1");
  std::size_t rows = 0;
  for (std::string line; std::getline(trace, line);) ++rows;
  CHECK(rows == 20);

  const auto ckpt = (dir / "run" / "model.ckpt").string();
  const auto ev = cli({"eval", ckpt, corpus});
  CHECK(ev.code == kExitOk);
  CHECK(ev.out.find("class,precision,recall,f1") != std::string::npos);
  CHECK(ev.out.find("\nmacro,") != std::string::npos);

  SUBCASE("corrupt checkpoint") {
    write_file(dir / "broken.ckpt", "not a checkpoint");
    const auto r = cli({"eval", (dir / "broken.ckpt").string(), corpus});
    CHECK(r.code == kExitUsage);
    CHECK(!r.err.empty());
  }
  SUBCASE("more corpus classes than the model") {
    write_file(dir / "three.tsv", "left\tab\nright\tcd\nmiddle\tef\n");
    const auto r = cli({"eval", ckpt, (dir / "three.tsv").string()});
    CHECK(r.code == kExitUsage);
    CHECK(r.err.find('3') != std::string::npos);
    CHECK(r.err.find('2') != std::string::npos);
  }
  SUBCASE("label subset is remapped by name") {
    write_file(dir / "right.tsv", "right\tzwzw abc\n");
    CHECK(cli({"eval", ckpt, (dir / "right.tsv").string()}).code == kExitOk);
  }
  SUBCASE("invalid model settings") {
    CHECK(cli(concat({"train", corpus, "--alpha", "1.5"}, small_model())).code == kExitUsage);
    CHECK(cli({"train", corpus, "--filters", "8", "--hidden", "16"}).code == kExitUsage);
    CHECK(cli(concat({"train", corpus, "--steps", "0"}, small_model())).code == kExitUsage);
  }
  fs::remove_all(dir);
}

TEST_CASE("sweep and bench commands") {
  const fs::path dir = scratch("sweep");
  const std::string corpus = (dir / "motifs.tsv").string();
  REQUIRE(cli({"convert", "motifs", "--out", corpus, "--records", "30"}).code == kExitOk);
  const auto sw = cli(concat({"sweep", corpus, "--alphas", "0.3,0.7", "--steps", "5", "--format", "csv"},
                             small_model()));
  CHECK(sw.code == kExitOk);
  CHECK(sw.out.find("0.3") != std::string::npos);
  CHECK(sw.out.find("0.7") != std::string::npos);
  CHECK(cli(concat({"sweep", corpus, "--alphas", "2"}, small_model())).code == kExitUsage);

  const auto bn = cli(concat({"bench", corpus, "--cells", "mgu,gru", "--timed-steps", "30", "--warmup",
                              "1", "--format", "csv", "--batch-size", "4"},
                             small_model()));
  CHECK(bn.code == kExitOk);
  CHECK(bn.out.find("cell,mean_ms,median_ms,std_ms,steps") != std::string::npos);
  CHECK(cli(concat({"bench", corpus, "--timed-steps", "10"}, small_model())).code == kExitUsage);
  fs::remove_all(dir);
}

TEST_CASE("gradcheck exit codes") {
  const auto ok = cli({"gradcheck", "--cells", "mgu", "--seeds", "1"});
  CHECK(ok.code == kExitOk);
  CHECK(ok.out.find("gradcheck passed") != std::string::npos);
  const auto tight = cli({"gradcheck", "--cells", "mgu", "--seeds", "1", "--tol", "1e-9"});
  CHECK(tight.code == kExitCheckFailed);
  CHECK(tight.out.find("gradcheck FAILED") != std::string::npos);
}
