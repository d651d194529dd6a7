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

// Gated recurrent cells (peephole LSTM, GRU, minimal gated unit) behind one
// step/unroll interface. Inputs and states are row-batched: x is [B x D],
// every state vector is [B x H].

#pragma once

#include "crnn/grad_check.hpp"
#include "crnn/rng.hpp"
#include "crnn/tensor.hpp"

#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace crnn {

enum class CellKind { kLstm, kGru, kMgu };

std::string_view to_string(CellKind kind);
CellKind parse_cell_kind(std::string_view name);

// Pre-activation W x + U h + b for one gate.
struct GateWeights {
  Tensor input;      // W [H x D]
  Tensor recurrent;  // U [H x H]
  Tensor bias;       // b [H]
};

struct LstmParams {
  GateWeights input_gate;
  GateWeights forget_gate;
  GateWeights output_gate;
  GateWeights candidate;
  // Diagonal peephole weights, stored as length-H vectors.
  Tensor peephole_input;
  Tensor peephole_forget;
  Tensor peephole_output;
};

struct GruParams {
  GateWeights update_gate;
  GateWeights reset_gate;
  GateWeights candidate;
};

struct MguParams {
  GateWeights forget_gate;
  GateWeights candidate;
};

using CellParams = std::variant<LstmParams, GruParams, MguParams>;

struct CellState {
  Tensor hidden;  // h (the GRU's o)
  Tensor memory;  // LSTM only; undefined for GRU and MGU
};

CellKind kind_of(const CellParams& params);
std::size_t input_size(const CellParams& params);
std::size_t hidden_size(const CellParams& params);

// W, U uniform in [-1/sqrt(H), 1/sqrt(H)]; peepholes and biases zero.
CellParams init_cell(CellKind kind, std::size_t input_size, std::size_t hidden_size, Rng& rng);

// Blocks in a fixed order with names like "cell.update.W".
std::vector<ParamBlock> named_parameters(const CellParams& params,
                                         const std::string& prefix = "cell");

CellState zero_state(CellKind kind, std::size_t batch, std::size_t hidden_size);

CellState lstm_step(Tape& tape, const LstmParams& p, const Tensor& x, const CellState& s);
CellState gru_step(Tape& tape, const GruParams& p, const Tensor& x, const CellState& s);
CellState mgu_step(Tape& tape, const MguParams& p, const Tensor& x, const CellState& s);
CellState step(Tape& tape, const CellParams& p, const Tensor& x, const CellState& s);

// Folds the step function over the sequence from the zero state.
CellState unroll(Tape& tape, const CellParams& p, std::span<const Tensor> sequence);
// Same over a [B x T x D] tensor, timesteps along axis 1.
CellState unroll(Tape& tape, const CellParams& p, const Tensor& sequence);

// Trainable scalar count including biases (and LSTM peepholes).
std::size_t param_count(CellKind kind, std::size_t input_size, std::size_t hidden_size);

}  // namespace crnn
