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

#include "crnn/model.hpp"

#include <cmath>

namespace crnn {

void CrnnConfig::validate() const {
  if (filters == 0 || hidden == 0 || window == 0 || pool == 0) {
    throw ConfigError("filters, hidden, window and pool must be positive");
  }
  if (filters != hidden) {
    throw ConfigError("filters (" + std::to_string(filters) + ") must equal hidden (" +
                      std::to_string(hidden) + ") for the aggregation layer");
  }
  if (length <= window) {
    throw ConfigError("length (" + std::to_string(length) + ") must exceed window (" +
                      std::to_string(window) + ")");
  }
  if (conv_frames() < pool) {
    throw ConfigError("pool window larger than the convolution output");
  }
  if (num_classes < 2) throw ConfigError("need at least 2 classes");
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw ConfigError("alpha must lie in [0, 1], got " + std::to_string(alpha));
  }
}

CrnnParams CrnnParams::init(const CrnnConfig& config) {
  config.validate();
  Rng root(config.seed);
  Rng conv_rng = root.split("conv");
  Rng cell_rng = root.split("cell");
  Rng out_rng = root.split("output");

  CrnnParams p;
  p.conv = ConvParams::init(config.filters, config.window, Alphabet::kSize, conv_rng);
  p.cell = init_cell(config.cell, config.filters, config.hidden, cell_rng);
  // Small output weights keep the untrained prediction close to uniform.
  const double r = 0.1 / std::sqrt(static_cast<double>(config.hidden));
  p.out_weights = Tensor::parameter(Shape{config.num_classes, config.hidden},
                                    out_rng.uniform_vector(config.num_classes * config.hidden, -r, r));
  p.out_bias = Tensor::zeros(Shape{config.num_classes}, true);
  return p;
}

std::vector<ParamBlock> CrnnParams::named_parameters() const {
  std::vector<ParamBlock> out{{"conv.kernel", conv.kernel}, {"conv.bias", conv.bias}};
  for (auto& b : crnn::named_parameters(cell, "cell")) out.push_back(std::move(b));
  out.push_back({"output.W", out_weights});
  out.push_back({"output.b", out_bias});
  return out;
}

void CrnnParams::zero_grad() const {
  for (auto& b : named_parameters()) b.tensor.zero_grad();
}

Tensor aggregate(Tape& tape, const Tensor& cnn, const Tensor& rnn, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument("aggregate: alpha must lie in [0, 1]");
  }
  if (cnn.shape() != rnn.shape()) {
    throw ShapeError("aggregate: branch lengths differ " + cnn.shape().str() + " vs " +
                     rnn.shape().str());
  }
  return add(tape, scale(tape, cnn, alpha), scale(tape, rnn, 1.0 - alpha));
}

namespace {
template <typename Fn>
auto in_layer(const char* layer, Fn&& fn) {
  try {
    return fn();
  } catch (const ShapeError& e) {
    throw ShapeError(std::string(layer) + ": " + e.what());
  }
}
}  // namespace

ForwardResult forward(Tape& tape, const CrnnConfig& config, const CrnnParams& params,
                      std::span<const CharMatrix> batch) {
  for (const auto& m : batch) {
    if (m.rows() != config.length) {
      throw ShapeError("input: expected " + std::to_string(config.length) + " x 70, got " +
                       std::to_string(m.rows()) + " x 70");
    }
  }
  ForwardResult r;
  r.features = in_layer("convolution", [&] { return conv1d_valid(tape, batch, params.conv); });
  r.pooled = in_layer("pooling", [&] { return maxpool_temporal(tape, r.features, config.pool); });
  r.cnn_vector = in_layer("max-over-time", [&] { return max_over_time(tape, r.pooled); });
  r.rnn_state = in_layer("recurrent", [&] { return unroll(tape, params.cell, r.features).hidden; });
  r.aggregated =
      in_layer("aggregation", [&] { return aggregate(tape, r.cnn_vector, r.rnn_state, config.alpha); });
  r.logits = in_layer("output", [&] {
    const AffineTerm term[] = {{r.aggregated, params.out_weights}};
    return affine(tape, term, params.out_bias);
  });
  return r;
}

std::size_t argmax(std::span<const double> values) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] > values[best]) best = i;
  return best;
}

std::vector<Prediction> predict(const CrnnConfig& config, const CrnnParams& params,
                                std::span<const CharMatrix> batch) {
  Tape tape(Tape::Mode::kInference);
  const ForwardResult r = forward(tape, config, params, batch);
  const std::size_t C = config.num_classes;
  const auto probs = softmax(r.logits.values(), C);
  std::vector<Prediction> out(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    out[i].probs.assign(probs.begin() + static_cast<std::ptrdiff_t>(i * C),
                        probs.begin() + static_cast<std::ptrdiff_t>((i + 1) * C));
    // Argmax over logits rather than rounded probabilities.
    out[i].label = argmax(r.logits.values().subspan(i * C, C));
  }
  return out;
}

Prediction predict(const CrnnConfig& config, const CrnnParams& params, const CharMatrix& input) {
  return predict(config, params, std::span<const CharMatrix>(&input, 1)).front();
}

Tensor loss(Tape& tape, const CrnnConfig& config, const CrnnParams& params,
            std::span<const Sample> batch) {
  if (batch.empty()) throw std::invalid_argument("loss: empty batch");
  std::vector<CharMatrix> inputs;
  std::vector<std::size_t> labels;
  inputs.reserve(batch.size());
  for (const auto& s : batch) {
    if (s.label >= config.num_classes) {
      throw std::out_of_range("loss: label " + std::to_string(s.label) + " >= class count " +
                              std::to_string(config.num_classes));
    }
    inputs.push_back(s.chars);
    labels.push_back(s.label);
  }
  const ForwardResult r = forward(tape, config, params, inputs);
  return softmax_cross_entropy(tape, r.logits, labels).loss;
}

}  // namespace crnn
