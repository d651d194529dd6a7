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

// Whole-model gradient check at a randomized, well-conditioned point.

#pragma once

#include "crnn/grad_check.hpp"
#include "crnn/model.hpp"

#include <cstdint>
#include <vector>

namespace crnn {

struct ModelCheckPoint {
  CrnnParams params;
  std::vector<Sample> batch;  // one full-length record per class
};

// Weights and biases uniform in [-0.5, 0.5], except the gate that carries the
// previous state (LSTM forget, GRU update, MGU forget) whose bias leans
// towards retention with magnitude in [1, 2]. Texts are drawn from eight
// letters and fill every position.
ModelCheckPoint make_check_point(const CrnnConfig& config, std::uint64_t seed);

GradCheckReport check_model_gradients(const CrnnConfig& config, std::uint64_t seed,
                                      const GradCheckOptions& options = {});

// n=40, window 5, F=H=8, pool 2, three classes.
CrnnConfig small_check_config(CellKind cell);

}  // namespace crnn
