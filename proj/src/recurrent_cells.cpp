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

#include "crnn/recurrent_cells.hpp"

#include "crnn/char_encoding.hpp"

#include <cmath>
#include <stdexcept>

namespace crnn {

std::string_view to_string(CellKind kind) {
  switch (kind) {
    case CellKind::kLstm: return "lstm";
    case CellKind::kGru: return "gru";
    case CellKind::kMgu: return "mgu";
  }
  return "?";
}

CellKind parse_cell_kind(std::string_view name) {
  const std::string lower = to_lower_ascii(name);
  if (lower == "lstm") return CellKind::kLstm;
  if (lower == "gru") return CellKind::kGru;
  if (lower == "mgu") return CellKind::kMgu;
  throw std::invalid_argument("unknown cell kind '" + std::string(name) +
                              "' (expected lstm, gru or mgu)");
}

CellKind kind_of(const CellParams& params) {
  switch (params.index()) {
    case 0: return CellKind::kLstm;
    case 1: return CellKind::kGru;
    default: return CellKind::kMgu;
  }
}

namespace {

const GateWeights& first_gate(const CellParams& params) {
  return std::visit(
      [](const auto& p) -> const GateWeights& {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, LstmParams>) return p.input_gate;
        else if constexpr (std::is_same_v<T, GruParams>) return p.update_gate;
        else return p.forget_gate;
      },
      params);
}

GateWeights init_gate(std::size_t d, std::size_t h, Rng& rng) {
  const double r = 1.0 / std::sqrt(static_cast<double>(h));
  GateWeights g;
  g.input = Tensor::parameter(Shape{h, d}, rng.uniform_vector(h * d, -r, r));
  g.recurrent = Tensor::parameter(Shape{h, h}, rng.uniform_vector(h * h, -r, r));
  g.bias = Tensor::zeros(Shape{h}, true);
  return g;
}

void push_gate(std::vector<ParamBlock>& out, const std::string& prefix, const GateWeights& g) {
  out.push_back({prefix + ".W", g.input});
  out.push_back({prefix + ".U", g.recurrent});
  out.push_back({prefix + ".b", g.bias});
}

Tensor pre_activation(Tape& tape, const GateWeights& g, const Tensor& x, const Tensor& h) {
  const AffineTerm terms[] = {{x, g.input}, {h, g.recurrent}};
  return affine(tape, terms, g.bias);
}

Tensor ones_like(const Tensor& t) {
  return Tensor::constant(t.shape(), std::vector<double>(t.numel(), 1.0));
}

// (1 - gate) * keep + gate * update
Tensor blend(Tape& tape, const Tensor& gate, const Tensor& keep, const Tensor& update) {
  const Tensor retain = sub(tape, ones_like(gate), gate);
  return add(tape, hadamard(tape, retain, keep), hadamard(tape, gate, update));
}

void check_inputs(const GateWeights& g, const Tensor& x, const CellState& s, const char* cell) {
  const std::size_t h = g.recurrent.shape()[0];
  const std::size_t d = g.input.shape()[1];
  if (x.shape().rank() != 2 || x.shape()[1] != d) {
    throw ShapeError(std::string(cell) + ": input " + x.shape().str() + " does not match input size " +
                     std::to_string(d));
  }
  if (!s.hidden.defined() || s.hidden.shape() != Shape{x.shape()[0], h}) {
    throw ShapeError(std::string(cell) + ": hidden state " +
                     (s.hidden.defined() ? s.hidden.shape().str() : std::string("<none>")) +
                     " does not match [" + std::to_string(x.shape()[0]) + "x" +
                     std::to_string(h) + "]");
  }
}

void check_unit_interval(const Tensor& t, const char* what) {
  for (double v : t.values()) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw NumericError(std::string(what) + " left [0, 1]: " + std::to_string(v));
    }
  }
}

}  // namespace

std::size_t input_size(const CellParams& params) { return first_gate(params).input.shape()[1]; }
std::size_t hidden_size(const CellParams& params) { return first_gate(params).input.shape()[0]; }

CellParams init_cell(CellKind kind, std::size_t d, std::size_t h, Rng& rng) {
  if (d == 0 || h == 0) throw std::invalid_argument("init_cell: sizes must be positive");
  switch (kind) {
    case CellKind::kLstm: {
      LstmParams p;
      p.input_gate = init_gate(d, h, rng);
      p.forget_gate = init_gate(d, h, rng);
      p.output_gate = init_gate(d, h, rng);
      p.candidate = init_gate(d, h, rng);
      p.peephole_input = Tensor::zeros(Shape{h}, true);
      p.peephole_forget = Tensor::zeros(Shape{h}, true);
      p.peephole_output = Tensor::zeros(Shape{h}, true);
      return p;
    }
    case CellKind::kGru: {
      GruParams p;
      p.update_gate = init_gate(d, h, rng);
      p.reset_gate = init_gate(d, h, rng);
      p.candidate = init_gate(d, h, rng);
      return p;
    }
    case CellKind::kMgu: {
      MguParams p;
      p.forget_gate = init_gate(d, h, rng);
      p.candidate = init_gate(d, h, rng);
      return p;
    }
  }
  throw std::invalid_argument("init_cell: bad kind");
}

std::vector<ParamBlock> named_parameters(const CellParams& params, const std::string& prefix) {
  std::vector<ParamBlock> out;
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, LstmParams>) {
          push_gate(out, prefix + ".input", p.input_gate);
          push_gate(out, prefix + ".forget", p.forget_gate);
          push_gate(out, prefix + ".output", p.output_gate);
          push_gate(out, prefix + ".candidate", p.candidate);
          out.push_back({prefix + ".input.V", p.peephole_input});
          out.push_back({prefix + ".forget.V", p.peephole_forget});
          out.push_back({prefix + ".output.V", p.peephole_output});
        } else if constexpr (std::is_same_v<T, GruParams>) {
          push_gate(out, prefix + ".update", p.update_gate);
          push_gate(out, prefix + ".reset", p.reset_gate);
          push_gate(out, prefix + ".candidate", p.candidate);
        } else {
          push_gate(out, prefix + ".forget", p.forget_gate);
          push_gate(out, prefix + ".candidate", p.candidate);
        }
      },
      params);
  return out;
}

CellState zero_state(CellKind kind, std::size_t batch, std::size_t h) {
  CellState s;
  s.hidden = Tensor::zeros(Shape{batch, h});
  if (kind == CellKind::kLstm) s.memory = Tensor::zeros(Shape{batch, h});
  return s;
}

CellState lstm_step(Tape& tape, const LstmParams& p, const Tensor& x, const CellState& s) {
  check_inputs(p.input_gate, x, s, "lstm_step");
  if (!s.memory.defined() || s.memory.shape() != s.hidden.shape()) {
    throw ShapeError("lstm_step: memory state missing or mis-shaped");
  }
  const Tensor& h = s.hidden;
  const Tensor& m = s.memory;

  const Tensor in_gate = sigmoid(
      tape, add(tape, pre_activation(tape, p.input_gate, x, h), hadamard_row(tape, m, p.peephole_input)));
  const Tensor forget = sigmoid(
      tape, add(tape, pre_activation(tape, p.forget_gate, x, h), hadamard_row(tape, m, p.peephole_forget)));
  const Tensor candidate = tanh(tape, pre_activation(tape, p.candidate, x, h));
  const Tensor memory =
      add(tape, hadamard(tape, forget, m), hadamard(tape, in_gate, candidate));
  // The output gate peeks at the updated memory.
  const Tensor out_gate = sigmoid(
      tape, add(tape, pre_activation(tape, p.output_gate, x, h),
                hadamard_row(tape, memory, p.peephole_output)));
  const Tensor hidden = hadamard(tape, out_gate, tanh(tape, memory));

  check_unit_interval(in_gate, "lstm input gate");
  check_unit_interval(forget, "lstm forget gate");
  check_unit_interval(out_gate, "lstm output gate");
  return {hidden, memory};
}

CellState gru_step(Tape& tape, const GruParams& p, const Tensor& x, const CellState& s) {
  check_inputs(p.update_gate, x, s, "gru_step");
  const Tensor& prev = s.hidden;
  const Tensor update = sigmoid(tape, pre_activation(tape, p.update_gate, x, prev));
  const Tensor reset = sigmoid(tape, pre_activation(tape, p.reset_gate, x, prev));
  const Tensor candidate =
      tanh(tape, pre_activation(tape, p.candidate, x, hadamard(tape, reset, prev)));
  check_unit_interval(update, "gru update gate");
  check_unit_interval(reset, "gru reset gate");
  return {blend(tape, update, prev, candidate), Tensor()};
}

CellState mgu_step(Tape& tape, const MguParams& p, const Tensor& x, const CellState& s) {
  check_inputs(p.forget_gate, x, s, "mgu_step");
  const Tensor& prev = s.hidden;
  const Tensor forget = sigmoid(tape, pre_activation(tape, p.forget_gate, x, prev));
  const Tensor candidate =
      tanh(tape, pre_activation(tape, p.candidate, x, hadamard(tape, forget, prev)));
  check_unit_interval(forget, "mgu forget gate");
  return {blend(tape, forget, prev, candidate), Tensor()};
}

CellState step(Tape& tape, const CellParams& p, const Tensor& x, const CellState& s) {
  return std::visit(
      [&](const auto& params) -> CellState {
        using T = std::decay_t<decltype(params)>;
        if constexpr (std::is_same_v<T, LstmParams>) return lstm_step(tape, params, x, s);
        else if constexpr (std::is_same_v<T, GruParams>) return gru_step(tape, params, x, s);
        else return mgu_step(tape, params, x, s);
      },
      p);
}

CellState unroll(Tape& tape, const CellParams& p, std::span<const Tensor> sequence) {
  if (sequence.empty()) throw std::invalid_argument("unroll: empty sequence");
  CellState s = zero_state(kind_of(p), sequence[0].shape()[0], hidden_size(p));
  for (const auto& x : sequence) s = step(tape, p, x, s);
  return s;
}

CellState unroll(Tape& tape, const CellParams& p, const Tensor& sequence) {
  if (sequence.shape().rank() != 3) {
    throw ShapeError("unroll: expected [B x T x D] sequence, got " + sequence.shape().str());
  }
  const std::size_t steps = sequence.shape()[1];
  CellState s = zero_state(kind_of(p), sequence.shape()[0], hidden_size(p));
  for (std::size_t t = 0; t < steps; ++t) s = step(tape, p, take(tape, sequence, 1, t), s);
  return s;
}

std::size_t param_count(CellKind kind, std::size_t d, std::size_t h) {
  const std::size_t gate = d * h + h * h + h;
  switch (kind) {
    case CellKind::kLstm: return 4 * gate + 3 * h;
    case CellKind::kGru: return 3 * gate;
    case CellKind::kMgu: return 2 * gate;
  }
  return 0;
}

}  // namespace crnn
