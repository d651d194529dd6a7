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

// Central finite-difference verification of tape gradients.

#pragma once

#include "crnn/tensor.hpp"

#include <functional>
#include <string>
#include <vector>

namespace crnn {

struct ParamBlock {
  std::string name;
  Tensor tensor;
};

struct GradCheckOptions {
  double step = 1e-4;
  double tolerance = 1e-4;
  // Skip elements whose +-step evaluations cross a ReLU or max decision; the
  // central difference there does not estimate the derivative.
  bool skip_kinks = true;
};

struct BlockGradError {
  std::string name;
  std::size_t elements = 0;
  std::size_t skipped = 0;  // elements straddling a kink
  double max_rel_error = 0.0;
  std::size_t worst_index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
};

struct GradCheckReport {
  std::vector<BlockGradError> blocks;
  double tolerance = 0.0;

  double max_rel_error() const;
  std::size_t elements() const;
  std::size_t skipped() const;
  bool passed() const { return max_rel_error() < tolerance; }
};

// |a - n| / max(|a|, |n|, 1e-8)
double relative_error(double analytic, double numeric);

using LossFn = std::function<Tensor(Tape&)>;

// Runs `loss_fn` once on a recording tape for analytic gradients, then
// perturbs every element of every block by +-step. Parameter values are
// restored afterwards; parameter gradients are left zeroed.
GradCheckReport grad_check(const LossFn& loss_fn, std::vector<ParamBlock> params,
                           const GradCheckOptions& options = {});

}  // namespace crnn
