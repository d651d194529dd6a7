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

#include "crnn/cnn_branch.hpp"

#include <doctest.h>

#include <cmath>

using namespace crnn;
using crnn::testing::project;
using crnn::testing::random_param;

namespace {

ConvParams toy_params(std::size_t filters, std::size_t window, std::size_t channels, std::uint64_t seed) {
  Rng rng(seed);
  ConvParams p = ConvParams::init(filters, window, channels, rng);
  // Nonzero biases keep the check honest about the bias path.
  for (auto& b : p.bias.mutable_values()) b = rng.uniform(-0.2, 0.2);
  return p;
}

}  // namespace

TEST_CASE("convolution matches direct summation on a two-symbol alphabet") {
  // Input over symbols {p, q}: "pqp" as a 3 x 2 one-hot matrix.
  const Tensor input = Tensor::constant(Shape{3, 2}, {1, 0, 0, 1, 1, 0});
  Rng rng(1);
  ConvParams p = ConvParams::init(1, 2, 2, rng);
  auto k = p.kernel.mutable_values();
  k[0] = 0.5;   // offset 0, symbol p
  k[1] = -1.0;  // offset 0, symbol q
  k[2] = 2.0;   // offset 1, symbol p
  k[3] = 3.0;   // offset 1, symbol q
  p.bias.mutable_values()[0] = 0.25;
  Tape tape;
  const Tensor out = conv1d_valid(tape, input, p);
  REQUIRE(out.shape() == Shape{2, 1});
  // frame 0: p then q -> 0.5 + 3.0 + 0.25; frame 1: q then p -> -1 + 2 + 0.25
  CHECK(out.at(0, 0) == doctest::Approx(3.75));
  CHECK(out.at(1, 0) == doctest::Approx(1.25));

  p.bias.mutable_values()[0] = -2.0;
  const Tensor clipped = conv1d_valid(tape, input, p);
  CHECK(clipped.at(0, 0) == doctest::Approx(1.5));
  CHECK(clipped.at(1, 0) == 0.0);
}

TEST_CASE("sparse and dense convolution paths agree") {
  const ConvParams p = toy_params(6, 4, 70, 2);
  const std::vector<CharMatrix> batch = {encode("hello, world 42!", 16), encode("Zz", 16)};
  Tape tape;
  const Tensor sparse = conv1d_valid(tape, batch, p);
  std::vector<double> dense;
  for (const auto& m : batch) {
    const auto d = m.dense();
    dense.insert(dense.end(), d.begin(), d.end());
  }
  const Tensor full = conv1d_valid(tape, Tensor::constant(Shape{2, 16, 70}, dense), p);
  REQUIRE(sparse.shape() == full.shape());
  for (std::size_t i = 0; i < sparse.numel(); ++i)
    CHECK(sparse.values()[i] == doctest::Approx(full.values()[i]).epsilon(1e-14));
}

TEST_CASE("convolution output shapes") {
  Rng rng(3);
  const ConvParams p = ConvParams::init(4, 20, 70, rng);
  Tape tape;
  const std::vector<CharMatrix> batch = {encode("abc", 500)};
  const Tensor out = conv1d_valid(tape, batch, p);
  CHECK(out.shape() == Shape{1, 481, 4});
  const std::vector<CharMatrix> too_short = {encode("abc", 10)};
  CHECK_THROWS_AS(conv1d_valid(tape, too_short, p), ShapeError);
}

TEST_CASE("zero weights and bias give an all-zero map") {
  Rng rng(4);
  ConvParams p = ConvParams::init(3, 2, 70, rng);
  for (auto& v : p.kernel.mutable_values()) v = 0.0;
  Tape tape;
  const std::vector<CharMatrix> batch = {encode("abc def", 8)};
  for (double v : conv1d_valid(tape, batch, p).values()) CHECK(v == 0.0);
}

TEST_CASE("initialization range") {
  Rng rng(5);
  const ConvParams p = ConvParams::init(400, 20, 70, rng);
  const double r = std::sqrt(6.0 / (20.0 * 70.0 + 400.0));
  double lo = 1.0, hi = -1.0;
  for (double v : p.kernel.values()) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  CHECK(lo >= -r);
  CHECK(hi <= r);
  CHECK(hi > 0.99 * r);
  for (double b : p.bias.values()) CHECK(b == 0.0);
  CHECK(p.kernel.numel() == 400u * 20u * 70u);
}

TEST_CASE("convolution is translation consistent") {
  const ConvParams p = toy_params(5, 3, 70, 6);
  Tape tape;
  const std::string pattern = "q7!";
  for (std::size_t shift = 0; shift < 6; ++shift) {
    const std::string base = std::string(4, ' ') + pattern + std::string(12, ' ');
    const std::string moved = std::string(4 + shift, ' ') + pattern + std::string(12 - shift, ' ');
    const std::vector<CharMatrix> a = {encode(base, 19)};
    const std::vector<CharMatrix> b = {encode(moved, 19)};
    const Tensor ya = conv1d_valid(tape, a, p);
    const Tensor yb = conv1d_valid(tape, b, p);
    const std::size_t frames = ya.shape()[1];
    for (std::size_t t = 0; t + shift < frames; ++t)
      for (std::size_t f = 0; f < 5; ++f) CHECK(yb.at(0, t + shift, f) == ya.at(0, t, f));
  }
}

TEST_CASE("max pooling examples") {
  Tape tape;
  const Tensor col = Tensor::constant(Shape{6, 1}, {3, 1, 4, 1, 5, 9});
  const Tensor pooled = maxpool_temporal(tape, col, 2);
  REQUIRE(pooled.shape() == Shape{3, 1});
  CHECK(pooled.at(0, 0) == 3);
  CHECK(pooled.at(1, 0) == 4);
  CHECK(pooled.at(2, 0) == 9);

  const Tensor same = maxpool_temporal(tape, col, 1);
  for (std::size_t i = 0; i < 6; ++i) CHECK(same.values()[i] == col.values()[i]);

  CHECK(maxpool_temporal(tape, Tensor::zeros(Shape{480, 2}), 2).shape() == Shape{240, 2});
  CHECK(maxpool_temporal(tape, Tensor::zeros(Shape{481, 2}), 2).shape() == Shape{240, 2});
  CHECK_THROWS_AS(maxpool_temporal(tape, col, 0), std::invalid_argument);
  CHECK_THROWS_AS(maxpool_temporal(tape, col, 7), ShapeError);
}

TEST_CASE("max pooling dominates mean pooling") {
  const Tensor x = random_param(Shape{2, 9, 3}, 7);
  Tape tape;
  const Tensor mx = maxpool_temporal(tape, x, 3);
  for (std::size_t b = 0; b < 2; ++b)
    for (std::size_t p = 0; p < 3; ++p)
      for (std::size_t f = 0; f < 3; ++f) {
        double mean = 0.0;
        for (std::size_t w = 0; w < 3; ++w) mean += x.at(b, p * 3 + w, f) / 3.0;
        CHECK(mx.at(b, p, f) >= mean);
      }
}

TEST_CASE("max over time examples") {
  Tape tape;
  const Tensor two = Tensor::constant(Shape{2, 2}, {1, 8, 5, 2});
  const Tensor m = max_over_time(tape, two);
  CHECK(m.at(0) == 5);
  CHECK(m.at(1) == 8);
  const Tensor one = Tensor::constant(Shape{1, 3}, {4, -1, 2});
  const Tensor s = max_over_time(tape, one);
  CHECK(s.at(0) == 4);
  CHECK(s.at(1) == -1);
  CHECK(s.at(2) == 2);
  CHECK(max_over_time(tape, Tensor::zeros(Shape{2, 5, 3})).shape() == Shape{2, 3});
}

TEST_CASE("max over time gradient reaches only argmax frames") {
  Tensor x = random_param(Shape{5, 3}, 8);
  {
    Tape tape;
    tape.backward(project(tape, max_over_time(tape, x)));
  }
  for (std::size_t f = 0; f < 3; ++f) {
    std::size_t best = 0;
    for (std::size_t t = 1; t < 5; ++t)
      if (x.at(t, f) > x.at(best, f)) best = t;
    for (std::size_t t = 0; t < 5; ++t) CHECK((x.grad()[t * 3 + f] != 0.0) == (t == best));
  }
  x.zero_grad();
  CHECK(grad_check([&](Tape& t) { return project(t, max_over_time(t, x)); }, {{"x", x}}).passed());
}

TEST_CASE("branch gradients match finite differences") {
  const ConvParams p = toy_params(3, 3, 70, 9);
  const std::vector<CharMatrix> batch = {encode("abcabd", 8), encode("dcba", 8)};
  const auto r = grad_check(
      [&](Tape& t) {
        const Tensor map = conv1d_valid(t, batch, p);
        return project(t, max_over_time(t, maxpool_temporal(t, map, 2)));
      },
      {{"kernel", p.kernel}, {"bias", p.bias}});
  CHECK(r.passed());

  const ConvParams q = toy_params(2, 2, 3, 10);
  Tensor input = random_param(Shape{5, 3}, 11);
  const auto d = grad_check([&](Tape& t) { return project(t, conv1d_valid(t, input, q)); },
                            {{"input", input}, {"kernel", q.kernel}, {"bias", q.bias}});
  CHECK(d.passed());
}
