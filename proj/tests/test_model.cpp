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

#include "test_util.hpp"

#include "crnn/checkpoint.hpp"
#include "crnn/model.hpp"
#include "crnn/model_check.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>

using namespace crnn;

namespace {

CrnnConfig small(CellKind cell = CellKind::kGru, std::size_t classes = 3) {
  CrnnConfig c = small_check_config(cell);
  c.num_classes = classes;
  return c;
}

std::vector<CharMatrix> texts(const CrnnConfig& c, std::initializer_list<const char*> list) {
  std::vector<CharMatrix> out;
  for (const char* t : list) out.push_back(encode(t, c.length));
  return out;
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("crnn_test_" + name)).string();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::string& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary);
  out << data;
}

}  // namespace

TEST_CASE("config validation") {
  CrnnConfig c;
  CHECK_NOTHROW(c.validate());
  CHECK(c.filters == 400);
  CHECK(c.hidden == 400);
  CHECK(c.window == 20);
  CHECK(c.pool == 2);
  CHECK(c.length == 500);
  CHECK(c.alpha == 0.7);
  CHECK(c.cell == CellKind::kGru);
  CHECK(c.conv_frames() == 481);
  CHECK(c.pooled_frames() == 240);

  CrnnConfig bad = c;
  bad.hidden = 300;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = c;
  bad.length = 20;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = c;
  bad.num_classes = 1;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = c;
  bad.alpha = 1.5;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad.alpha = -0.1;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("full-size shape chain") {
  CrnnConfig c;
  c.num_classes = 5;
  const CrnnParams p = CrnnParams::init(c);
  Tape tape(Tape::Mode::kInference);
  const auto batch = texts(c, {"what is the capital of france?"});
  const ForwardResult r = forward(tape, c, p, batch);
  CHECK(r.features.shape() == Shape{1, 481, 400});
  CHECK(r.pooled.shape() == Shape{1, 240, 400});
  CHECK(r.cnn_vector.shape() == Shape{1, 400});
  CHECK(r.rnn_state.shape() == Shape{1, 400});
  CHECK(r.aggregated.shape() == Shape{1, 400});
  CHECK(r.logits.shape() == Shape{1, 5});
}

TEST_CASE("forward rejects inputs of the wrong length") {
  const CrnnConfig c = small();
  const CrnnParams p = CrnnParams::init(c);
  Tape tape;
  const std::vector<CharMatrix> wrong = {encode("abc", c.length + 1)};
  try {
    forward(tape, c, p, wrong);
    FAIL("expected ShapeError");
  } catch (const ShapeError& e) {
    CHECK(std::string(e.what()).find("input") != std::string::npos);
  }
}

TEST_CASE("aggregate examples") {
  Tape tape;
  const Tensor v = Tensor::constant(Shape{2}, {1, 0});
  const Tensor h = Tensor::constant(Shape{2}, {0, 1});
  const Tensor a = aggregate(tape, v, h, 0.9);
  CHECK(a.at(0) == doctest::Approx(0.9));
  CHECK(a.at(1) == doctest::Approx(0.1));
  const Tensor x = Tensor::constant(Shape{2}, {0.3, -2.0});
  const Tensor same = aggregate(tape, x, x, 0.5);
  CHECK(same.at(0) == 0.3);
  CHECK(same.at(1) == -2.0);
  const Tensor seven = aggregate(tape, Tensor::constant(Shape{1}, {2.0}), Tensor::constant(Shape{1}, {10.0}), 0.7);
  CHECK(seven.item() == doctest::Approx(0.7 * 2.0 + 0.3 * 10.0).epsilon(1e-15));
  CHECK_THROWS_AS(aggregate(tape, v, Tensor::zeros(Shape{3}), 0.5), ShapeError);
  CHECK_THROWS_AS(aggregate(tape, v, h, 1.1), std::invalid_argument);
}

TEST_CASE("alpha = 1 cuts the recurrent branch off") {
  CrnnConfig c = small(CellKind::kLstm);
  c.alpha = 1.0;
  CrnnParams p = CrnnParams::init(c);
  const std::vector<Sample> batch = {{encode("abc def", c.length), 1}, {encode("xyz", c.length), 2}};
  {
    Tape tape;
    tape.backward(loss(tape, c, p, batch));
  }
  for (const auto& b : named_parameters(p.cell, "cell")) {
    for (double g : b.tensor.grad()) CHECK(g == 0.0);
  }
  Tape t1(Tape::Mode::kInference);
  const auto inputs = texts(c, {"abc def", "xyz"});
  const auto before = crnn::testing::copy(forward(t1, c, p, inputs).logits.values());
  for (const auto& b : named_parameters(p.cell, "cell"))
    for (auto& v : Tensor(b.tensor).mutable_values()) v += 0.37;
  Tape t2(Tape::Mode::kInference);
  CHECK(crnn::testing::copy(forward(t2, c, p, inputs).logits.values()) == before);
}

TEST_CASE("alpha = 0 zeroes the pooling path contribution") {
  Tensor cnn = crnn::testing::random_param(Shape{2, 4}, 1);
  Tensor rnn = crnn::testing::random_param(Shape{2, 4}, 2);
  {
    Tape tape;
    tape.backward(crnn::testing::project(tape, aggregate(tape, cnn, rnn, 0.0)));
  }
  for (double g : cnn.grad()) CHECK(g == 0.0);
  cnn.zero_grad();
  rnn.zero_grad();
  const auto r = grad_check(
      [&](Tape& t) { return crnn::testing::project(t, aggregate(t, cnn, rnn, 0.0)); }, {{"cnn", cnn}, {"rnn", rnn}});
  CHECK(r.blocks[0].numeric == 0.0);
  CHECK(r.passed());

  CrnnConfig c = small();
  c.alpha = 0.0;
  CrnnParams p = CrnnParams::init(c);
  const std::vector<Sample> batch = {{encode("hello there", c.length), 0}};
  {
    Tape tape;
    tape.backward(loss(tape, c, p, batch));
  }
  double norm = 0.0;
  for (const auto& b : named_parameters(p.cell, "cell"))
    for (double g : b.tensor.grad()) norm += g * g;
  CHECK(norm > 0.0);
}

TEST_CASE("predict and argmax") {
  CHECK(argmax(std::vector<double>{2, 1, 0}) == 0);
  CHECK(argmax(std::vector<double>{1, 1, 1}) == 0);
  CHECK(argmax(std::vector<double>{0, 3, 3}) == 1);

  const CrnnConfig c = small();
  const CrnnParams p = CrnnParams::init(c);
  const auto inputs = texts(c, {"alpha", "beta gamma", "delta!"});
  const auto preds = predict(c, p, inputs);
  REQUIRE(preds.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    double sum = 0.0;
    for (double v : preds[i].probs) sum += v;
    CHECK(std::abs(sum - 1.0) < 1e-9);
    CHECK(preds[i].label == argmax(preds[i].probs));
    const Prediction single = predict(c, p, inputs[i]);
    CHECK(single.label == preds[i].label);
  }
}

TEST_CASE("argmax is invariant under logit shift and positive scaling") {
  Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    auto logits = rng.uniform_vector(6, -5, 5);
    const std::size_t best = argmax(softmax(logits, 6));
    const double shift = rng.uniform(-50, 50), temp = rng.uniform(0.05, 20);
    for (auto& v : logits) v = (v + shift) * temp;
    CHECK(argmax(softmax(logits, 6)) == best);
  }
}

TEST_CASE("loss examples") {
  const CrnnConfig c = small(CellKind::kMgu, 4);
  CrnnParams p = CrnnParams::init(c);
  const std::vector<Sample> batch = {{encode("first sample", c.length), 1},
                                     {encode("second one", c.length), 3}};
  Tape tape(Tape::Mode::kInference);
  const double both = loss(tape, c, p, batch).item();
  const double a = loss(tape, c, p, std::span(batch).subspan(0, 1)).item();
  const double b = loss(tape, c, p, std::span(batch).subspan(1, 1)).item();
  CHECK(std::abs(both - 0.5 * (a + b)) < 1e-12);
  // Small output weights keep an untrained model near uniform.
  CHECK(std::abs(both - std::log(4.0)) < 0.05 * std::log(4.0));

  for (auto& v : p.out_weights.mutable_values()) v = 0.0;
  auto bias = p.out_bias.mutable_values();
  bias[0] = 0.0;
  bias[1] = 800.0;
  bias[2] = 0.0;
  bias[3] = 0.0;
  CHECK(loss(tape, c, p, std::span(batch).subspan(0, 1)).item() == 0.0);

  const std::vector<Sample> bad = {{encode("x", c.length), 4}};
  CHECK_THROWS_AS(loss(tape, c, p, bad), std::out_of_range);
  CHECK_THROWS_AS(loss(tape, c, p, std::span<const Sample>()), std::invalid_argument);
}

TEST_CASE("initialization is seeded and bounded") {
  CrnnConfig c = small();
  const CrnnParams a = CrnnParams::init(c);
  const CrnnParams b = CrnnParams::init(c);
  c.seed = 1;
  const CrnnParams d = CrnnParams::init(c);
  const auto pa = a.named_parameters(), pb = b.named_parameters(), pd = d.named_parameters();
  REQUIRE(pa.size() == pb.size());
  bool differs = false;
  for (std::size_t i = 0; i < pa.size(); ++i) {
    CHECK(pa[i].name == pb[i].name);
    CHECK(crnn::testing::copy(pa[i].tensor.values()) == crnn::testing::copy(pb[i].tensor.values()));
    differs = differs || crnn::testing::copy(pa[i].tensor.values()) != crnn::testing::copy(pd[i].tensor.values());
  }
  CHECK(differs);
  CHECK(pa.front().name == "conv.kernel");
  CHECK(pa.back().name == "output.b");
  const double r = 0.1 / std::sqrt(static_cast<double>(c.hidden));
  for (double v : a.out_weights.values()) CHECK(std::abs(v) <= r);
  for (double v : a.out_bias.values()) CHECK(v == 0.0);
}

TEST_CASE("forward is deterministic") {
  const CrnnConfig c = small(CellKind::kLstm);
  const auto inputs = texts(c, {"same input", "twice"});
  auto run = [&] {
    const CrnnParams p = CrnnParams::init(c);
    Tape tape(Tape::Mode::kInference);
    return crnn::testing::copy(forward(tape, c, p, inputs).logits.values());
  };
  CHECK(run() == run());
}

TEST_CASE("whole-model gradients on a four-class toy model") {
  for (auto cell : {CellKind::kLstm, CellKind::kGru, CellKind::kMgu}) {
    CrnnConfig c = small(cell, 4);
    const auto report = check_model_gradients(c, 11);
    CHECK(report.max_rel_error() < 1e-4);
    CHECK(report.skipped() * 100 < report.elements());
  }
}

TEST_CASE("checkpoint round trip is bit exact") {
  CrnnConfig c = small(CellKind::kLstm);
  c.alpha = 0.3;
  c.seed = 42;
  const CrnnParams p = CrnnParams::init(c);
  const std::string path = temp_path("roundtrip.ckpt");
  save_checkpoint(c, p, path, {"a", "b", "c=d"});
  const Checkpoint ck = load_checkpoint(path);
  CHECK(ck.config.alpha == 0.3);
  CHECK(ck.config.seed == 42);
  CHECK(ck.config.cell == CellKind::kLstm);
  CHECK(ck.labels == std::vector<std::string>{"a", "b", "c=d"});
  const auto orig = p.named_parameters(), back = ck.params.named_parameters();
  REQUIRE(orig.size() == back.size());
  for (std::size_t i = 0; i < orig.size(); ++i) {
    CHECK(orig[i].name == back[i].name);
    CHECK(crnn::testing::copy(orig[i].tensor.values()) == crnn::testing::copy(back[i].tensor.values()));
  }
  const std::string bytes = read_file(path);
  CHECK(bytes.substr(0, 5) == "CRNN1");
  std::remove(path.c_str());
}

TEST_CASE("checkpoint errors") {
  const CrnnConfig c = small(CellKind::kGru, 3);
  const CrnnParams p = CrnnParams::init(c);
  const std::string path = temp_path("errors.ckpt");
  save_checkpoint(c, p, path);
  const std::string good = read_file(path);

  CrnnConfig five = c;
  five.num_classes = 5;
  CHECK_THROWS_AS(load_checkpoint(path, five), CheckpointShapeError);

  const std::string cut = temp_path("cut.ckpt");
  write_file(cut, good.substr(0, good.size() - 9));
  CHECK_THROWS_AS(load_checkpoint(cut), CorruptCheckpointError);
  write_file(cut, good + "x");
  CHECK_THROWS_AS(load_checkpoint(cut), CorruptCheckpointError);
  std::string magic = good;
  magic[0] = 'X';
  write_file(cut, magic);
  CHECK_THROWS_AS(load_checkpoint(cut), CorruptCheckpointError);
  std::string version = good;
  version[5] = 2;
  write_file(cut, version);
  CHECK_THROWS_AS(load_checkpoint(cut), CheckpointVersionError);
  write_file(cut, "");
  CHECK_THROWS_AS(load_checkpoint(cut), CorruptCheckpointError);
  CHECK_THROWS_AS(load_checkpoint(temp_path("missing.ckpt")), CheckpointError);
  CHECK_THROWS_AS(save_checkpoint(c, p, path, {"only one"}), CheckpointError);
  std::remove(path.c_str());
  std::remove(cut.c_str());
}

TEST_CASE("config text round trip") {
  CrnnConfig c = small(CellKind::kMgu, 7);
  c.alpha = 0.1 + 0.2;
  c.seed = 123456789012345ULL;
  const CrnnConfig back = config_from_text(config_to_text(c));
  CHECK(back.alpha == c.alpha);
  CHECK(back.seed == c.seed);
  CHECK(back.num_classes == 7);
  CHECK(back.cell == CellKind::kMgu);
  CHECK_THROWS_AS(config_from_text("filters=8\nbogus=1\n"), ConfigError);
}
