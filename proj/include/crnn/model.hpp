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

// Convolutional-recurrent classifier: shared character convolution feeding a
// pooled max-over-time branch and a recurrent branch, blended by a scalar
// weight and mapped to class logits.

#pragma once

#include "crnn/char_encoding.hpp"
#include "crnn/cnn_branch.hpp"
#include "crnn/recurrent_cells.hpp"
#include "crnn/tensor.hpp"

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace crnn {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct CrnnConfig {
  std::size_t filters = 400;
  std::size_t hidden = 400;
  std::size_t window = 20;
  std::size_t pool = 2;
  std::size_t length = 500;
  std::size_t num_classes = 2;
  double alpha = 0.7;  // weight of the convolution branch in the blend
  CellKind cell = CellKind::kGru;
  std::uint64_t seed = 0;

  void validate() const;

  std::size_t conv_frames() const { return length - window + 1; }
  std::size_t pooled_frames() const { return conv_frames() / pool; }
};

struct Sample {
  CharMatrix chars;
  std::size_t label = 0;
};

struct CrnnParams {
  ConvParams conv;
  CellParams cell;
  Tensor out_weights;  // [C x H]
  Tensor out_bias;     // [C]

  static CrnnParams init(const CrnnConfig& config);
  // Stable order; names are used by checkpoints and gradient reports.
  std::vector<ParamBlock> named_parameters() const;
  void zero_grad() const;
};

struct ForwardResult {
  Tensor features;    // [B x T x F], T = n - window + 1
  Tensor pooled;      // [B x floor(T / P) x F]
  Tensor cnn_vector;  // [B x F]
  Tensor rnn_state;   // [B x H]
  Tensor aggregated;  // [B x H]
  Tensor logits;      // [B x C]
};

// alpha * cnn + (1 - alpha) * rnn
Tensor aggregate(Tape& tape, const Tensor& cnn, const Tensor& rnn, double alpha);

ForwardResult forward(Tape& tape, const CrnnConfig& config, const CrnnParams& params,
                      std::span<const CharMatrix> batch);

struct Prediction {
  std::size_t label = 0;
  std::vector<double> probs;
};

// Argmax of the softmax; ties go to the lowest class index.
std::size_t argmax(std::span<const double> values);

std::vector<Prediction> predict(const CrnnConfig& config, const CrnnParams& params,
                                std::span<const CharMatrix> batch);
Prediction predict(const CrnnConfig& config, const CrnnParams& params, const CharMatrix& input);

// Mean softmax cross-entropy over the batch.
Tensor loss(Tape& tape, const CrnnConfig& config, const CrnnParams& params,
            std::span<const Sample> batch);

}  // namespace crnn
