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

#include "crnn/cnn_branch.hpp"

#include <cmath>
#include <string>

namespace crnn {

namespace {

// Input rows in compressed form: only non-zero entries are visited, which
// makes one-hot text cost O(window * F) per output frame.
struct SparseRows {
  std::size_t batch = 0;
  std::size_t length = 0;
  std::vector<std::size_t> row_start;  // batch * length + 1
  std::vector<std::size_t> col;
  std::vector<double> val;
};

std::vector<double> transpose_kernel(std::span<const double> k, std::size_t filters,
                                     std::size_t span) {
  // [F x span] -> [span x F]
  std::vector<double> kt(k.size());
  for (std::size_t f = 0; f < filters; ++f)
    for (std::size_t s = 0; s < span; ++s) kt[s * filters + f] = k[f * span + s];
  return kt;
}

Tensor conv_linear(Tape& tape, SparseRows rows, const ConvParams& params, const Tensor* dense) {
  const std::size_t F = params.filters();
  const std::size_t W = params.window();
  const std::size_t C = params.channels();
  if (params.bias.shape() != Shape{F}) {
    throw ShapeError("conv1d_valid: bias " + params.bias.shape().str() + " for " +
                     std::to_string(F) + " filters");
  }
  if (rows.length < W) {
    throw ShapeError("conv1d_valid: sequence length " + std::to_string(rows.length) +
                     " shorter than window " + std::to_string(W));
  }
  const std::size_t B = rows.batch;
  const std::size_t T = rows.length - W + 1;
  const auto kt = transpose_kernel(params.kernel.values(), F, W * C);
  const auto bias = params.bias.values();

  std::vector<double> out(B * T * F);
  for (std::size_t b = 0; b < B; ++b) {
    for (std::size_t t = 0; t < T; ++t) {
      double* o = out.data() + (b * T + t) * F;
      for (std::size_t f = 0; f < F; ++f) o[f] = bias[f];
      for (std::size_t j = 0; j < W; ++j) {
        const std::size_t r = b * rows.length + t + j;
        for (std::size_t e = rows.row_start[r]; e < rows.row_start[r + 1]; ++e) {
          const double v = rows.val[e];
          const double* k = kt.data() + (j * C + rows.col[e]) * F;
          for (std::size_t f = 0; f < F; ++f) o[f] += v * k[f];
        }
      }
    }
  }

  std::vector<Tensor> inputs{params.kernel, params.bias};
  if (dense) inputs.push_back(*dense);
  return tape.record(
      Shape{B, T, F}, std::move(out), std::move(inputs),
      [rows = std::move(rows), B, T, F, W, C](std::span<const double>, std::span<const double> g,
                                              std::span<Tensor> in) {
        if (in[0].requires_grad()) {
          std::vector<double> dkt(W * C * F, 0.0);
          for (std::size_t b = 0; b < B; ++b) {
            for (std::size_t t = 0; t < T; ++t) {
              const double* go = g.data() + (b * T + t) * F;
              for (std::size_t j = 0; j < W; ++j) {
                const std::size_t r = b * rows.length + t + j;
                for (std::size_t e = rows.row_start[r]; e < rows.row_start[r + 1]; ++e) {
                  const double v = rows.val[e];
                  double* d = dkt.data() + (j * C + rows.col[e]) * F;
                  for (std::size_t f = 0; f < F; ++f) d[f] += v * go[f];
                }
              }
            }
          }
          auto gk = in[0].grad_buffer();
          for (std::size_t f = 0; f < F; ++f)
            for (std::size_t s = 0; s < W * C; ++s) gk[f * W * C + s] += dkt[s * F + f];
        }
        if (in[1].requires_grad()) {
          auto gb = in[1].grad_buffer();
          for (std::size_t i = 0; i < B * T; ++i)
            for (std::size_t f = 0; f < F; ++f) gb[f] += g[i * F + f];
        }
        if (in.size() > 2 && in[2].requires_grad()) {
          auto gx = in[2].grad_buffer();
          const auto k = in[0].values();
          for (std::size_t b = 0; b < B; ++b) {
            for (std::size_t t = 0; t < T; ++t) {
              const double* go = g.data() + (b * T + t) * F;
              for (std::size_t f = 0; f < F; ++f) {
                if (go[f] == 0.0) continue;
                const double* kf = k.data() + f * W * C;
                double* dx = gx.data() + (b * rows.length + t) * C;
                for (std::size_t s = 0; s < W * C; ++s) dx[s] += go[f] * kf[s];
              }
            }
          }
        }
      });
}

void require_channels(const ConvParams& params, std::size_t channels) {
  if (params.channels() != channels) {
    throw ShapeError("conv1d_valid: input has " + std::to_string(channels) +
                     " channels, kernel expects " + std::to_string(params.channels()));
  }
}

}  // namespace

ConvParams ConvParams::init(std::size_t filters, std::size_t window, std::size_t channels,
                            Rng& rng) {
  const double r = std::sqrt(6.0 / static_cast<double>(window * channels + filters));
  ConvParams p;
  p.kernel = Tensor::parameter(Shape{filters, window, channels},
                               rng.uniform_vector(filters * window * channels, -r, r));
  p.bias = Tensor::zeros(Shape{filters}, true);
  return p;
}

Tensor conv1d_valid(Tape& tape, std::span<const CharMatrix> batch, const ConvParams& params) {
  if (batch.empty()) throw ShapeError("conv1d_valid: empty batch");
  require_channels(params, CharMatrix::cols());
  SparseRows rows;
  rows.batch = batch.size();
  rows.length = batch[0].rows();
  rows.row_start.reserve(rows.batch * rows.length + 1);
  rows.row_start.push_back(0);
  for (const auto& m : batch) {
    if (m.rows() != rows.length) {
      throw ShapeError("conv1d_valid: batch mixes sequence lengths " +
                       std::to_string(rows.length) + " and " + std::to_string(m.rows()));
    }
    for (auto idx : m.indices()) {
      if (idx != CharMatrix::kEmpty) {
        rows.col.push_back(static_cast<std::size_t>(idx));
        rows.val.push_back(1.0);
      }
      rows.row_start.push_back(rows.col.size());
    }
  }
  return relu(tape, conv_linear(tape, std::move(rows), params, nullptr));
}

Tensor conv1d_valid(Tape& tape, const Tensor& input, const ConvParams& params) {
  const Shape& s = input.shape();
  if (s.rank() != 2 && s.rank() != 3) {
    throw ShapeError("conv1d_valid: input must be [n x C] or [B x n x C], got " + s.str());
  }
  const bool batched = s.rank() == 3;
  const std::size_t C = s[s.rank() - 1];
  require_channels(params, C);
  SparseRows rows;
  rows.batch = batched ? s[0] : 1;
  rows.length = s[s.rank() - 2];
  rows.row_start.push_back(0);
  const auto v = input.values();
  for (std::size_t r = 0; r < rows.batch * rows.length; ++r) {
    for (std::size_t c = 0; c < C; ++c) {
      if (v[r * C + c] != 0.0) {
        rows.col.push_back(c);
        rows.val.push_back(v[r * C + c]);
      }
    }
    rows.row_start.push_back(rows.col.size());
  }
  const Tensor dense = batched ? input : input.reshaped(Shape{1, rows.length, C});
  Tensor out = relu(tape, conv_linear(tape, std::move(rows), params, &dense));
  if (batched) return out;
  return out.reshaped(Shape{out.shape()[1], out.shape()[2]});
}

Tensor maxpool_temporal(Tape& tape, const Tensor& map, std::size_t window) {
  if (window == 0) throw std::invalid_argument("maxpool_temporal: window must be positive");
  const Shape& s = map.shape();
  if (s.rank() != 2 && s.rank() != 3) {
    throw ShapeError("maxpool_temporal: expected [T x F] or [B x T x F], got " + s.str());
  }
  const bool batched = s.rank() == 3;
  const std::size_t B = batched ? s[0] : 1;
  const std::size_t T = s[s.rank() - 2];
  const std::size_t F = s[s.rank() - 1];
  if (T < window) {
    throw ShapeError("maxpool_temporal: " + std::to_string(T) + " frames shorter than window " +
                     std::to_string(window));
  }
  const std::size_t out_t = T / window;
  const auto v = map.values();
  std::vector<double> out(B * out_t * F);
  std::vector<std::size_t> argmax(out.size());
  for (std::size_t b = 0; b < B; ++b) {
    for (std::size_t p = 0; p < out_t; ++p) {
      for (std::size_t f = 0; f < F; ++f) {
        std::size_t best = (b * T + p * window) * F + f;
        for (std::size_t w = 1; w < window; ++w) {
          const std::size_t i = (b * T + p * window + w) * F + f;
          if (v[i] > v[best]) best = i;
        }
        const std::size_t o = (b * out_t + p) * F + f;
        out[o] = v[best];
        argmax[o] = best;
      }
    }
  }
  if (tape.tracking_branches())
    for (auto m : argmax) tape.note_branch(m);
  const Shape out_shape = batched ? Shape{B, out_t, F} : Shape{out_t, F};
  return tape.record(out_shape, std::move(out), {map},
                     [argmax = std::move(argmax)](std::span<const double>,
                                                  std::span<const double> g,
                                                  std::span<Tensor> in) {
                       auto gm = in[0].grad_buffer();
                       for (std::size_t o = 0; o < g.size(); ++o) gm[argmax[o]] += g[o];
                     });
}

Tensor max_over_time(Tape& tape, const Tensor& map) {
  const Shape& s = map.shape();
  if (s.rank() != 2 && s.rank() != 3) {
    throw ShapeError("max_over_time: expected [T x F] or [B x T x F], got " + s.str());
  }
  return reduce(tape, Reduction::kMax, map, s.rank() - 2);
}

}  // namespace crnn
