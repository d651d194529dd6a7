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

#include "crnn/model_check.hpp"

#include "crnn/rng.hpp"

#include <string>

namespace crnn {

ModelCheckPoint make_check_point(const CrnnConfig& config, std::uint64_t seed) {
  config.validate();
  ModelCheckPoint point{CrnnParams::init(config), {}};
  Rng rng = Rng(seed).split("grad-check");
  const std::string carry_bias = config.cell == CellKind::kGru ? "cell.update.b" : "cell.forget.b";
  const double carry_sign = config.cell == CellKind::kLstm ? 1.0 : -1.0;
  for (auto& block : point.params.named_parameters()) {
    for (auto& v : block.tensor.mutable_values()) {
      v = block.name == carry_bias ? carry_sign * rng.uniform(1.0, 2.0) : rng.uniform(-0.5, 0.5);
    }
  }
  const std::string letters = "abcdefgh";
  for (std::size_t c = 0; c < config.num_classes; ++c) {
    std::string text;
    for (std::size_t i = 0; i < config.length; ++i) text += letters[rng.index(letters.size())];
    point.batch.push_back({encode(text, config.length), c});
  }
  return point;
}

GradCheckReport check_model_gradients(const CrnnConfig& config, std::uint64_t seed,
                                      const GradCheckOptions& options) {
  ModelCheckPoint point = make_check_point(config, seed);
  return grad_check(
      [&](Tape& tape) { return loss(tape, config, point.params, point.batch); },
      point.params.named_parameters(), options);
}

CrnnConfig small_check_config(CellKind cell) {
  CrnnConfig c;
  c.filters = c.hidden = 8;
  c.window = 5;
  c.pool = 2;
  c.length = 40;
  c.num_classes = 3;
  c.cell = cell;
  return c;
}

}  // namespace crnn
