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

// Character-level convolution branch: valid temporal convolution with ReLU,
// non-overlapping temporal max-pooling and max-over-time reduction.

#pragma once

#include "crnn/char_encoding.hpp"
#include "crnn/rng.hpp"
#include "crnn/tensor.hpp"

#include <span>

namespace crnn {

struct ConvParams {
  Tensor kernel;  // [F x window x channels]
  Tensor bias;    // [F]

  std::size_t filters() const { return kernel.shape()[0]; }
  std::size_t window() const { return kernel.shape()[1]; }
  std::size_t channels() const { return kernel.shape()[2]; }

  // Uniform in [-r, r], r = sqrt(6 / (window * channels + filters)); zero bias.
  static ConvParams init(std::size_t filters, std::size_t window, std::size_t channels, Rng& rng);
};

// One-hot batch [B x n x 70] -> [B x (n - window + 1) x F], ReLU applied.
Tensor conv1d_valid(Tape& tape, std::span<const CharMatrix> batch, const ConvParams& params);

// Dense input [n x C] or [B x n x C] (C = params.channels()). Gradients flow
// into the input when it requires them.
Tensor conv1d_valid(Tape& tape, const Tensor& input, const ConvParams& params);

// [T x F] or [B x T x F] -> floor(T / window) frames; pooling stride equals
// the window and trailing frames that do not fill a window are dropped.
Tensor maxpool_temporal(Tape& tape, const Tensor& map, std::size_t window);

// [T x F] -> [F] or [B x T x F] -> [B x F].
Tensor max_over_time(Tape& tape, const Tensor& map);

}  // namespace crnn
