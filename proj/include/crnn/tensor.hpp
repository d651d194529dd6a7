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

// Dense double-precision tensors (rank 1 to 3) with a reverse-mode gradient
// tape. Every model equation is built from the operations declared here, so
// a single finite-difference harness covers the whole network.

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace crnn {

class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Shape {
 public:
  static constexpr std::size_t kMaxRank = 3;

  Shape() = default;
  Shape(std::initializer_list<std::size_t> dims);
  explicit Shape(std::span<const std::size_t> dims);

  std::size_t rank() const { return rank_; }
  std::size_t operator[](std::size_t axis) const { return dims_[axis]; }
  std::size_t numel() const;
  std::span<const std::size_t> dims() const { return {dims_.data(), rank_}; }
  std::string str() const;

  friend bool operator==(const Shape& a, const Shape& b) {
    return a.rank_ == b.rank_ && a.dims_ == b.dims_;
  }

 private:
  std::array<std::size_t, kMaxRank> dims_{};
  std::size_t rank_ = 0;
};

namespace detail {
struct Node;
}

// Handle to a tensor node. Copies share storage. Constants never receive
// gradients; parameters own a persistent gradient buffer that accumulates
// across backward passes until zero_grad() is called.
class Tensor {
 public:
  Tensor() = default;

  static Tensor constant(Shape shape, std::vector<double> values);
  static Tensor parameter(Shape shape, std::vector<double> values);
  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor scalar(double value) { return constant(Shape{1}, {value}); }

  bool defined() const { return node_ != nullptr; }
  const Shape& shape() const;
  std::size_t numel() const { return shape().numel(); }
  bool requires_grad() const;

  std::span<const double> values() const;
  // Mutable access for optimizers and perturbation-based checks. Must not be
  // called while a tape that references this tensor is awaiting backward.
  std::span<double> mutable_values();

  // Empty span until a gradient buffer exists.
  std::span<const double> grad() const;
  // Allocates a zeroed buffer on first use.
  std::span<double> grad_buffer();
  void zero_grad();

  double item() const;
  double at(std::size_t i) const;
  double at(std::size_t i, std::size_t j) const;
  double at(std::size_t i, std::size_t j, std::size_t k) const;

  // Same storage viewed under a new shape of equal element count. The view
  // shares gradients with the source.
  Tensor reshaped(Shape shape) const;

  const detail::Node* node() const { return node_.get(); }

 private:
  friend class Tape;
  explicit Tensor(std::shared_ptr<detail::Node> node) : node_(std::move(node)) {}
  std::shared_ptr<detail::Node> node_;
};

// Backward rule: reads the output gradient and accumulates into the grad
// buffers of inputs that require gradients.
using BackwardFn = std::function<void(std::span<const double> out_value,
                                      std::span<const double> out_grad,
                                      std::span<Tensor> inputs)>;

class Tape {
 public:
  enum class Mode { kRecord, kInference };

  explicit Tape(Mode mode = Mode::kRecord) : mode_(mode) {}
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  bool recording() const { return mode_ == Mode::kRecord; }

  // Piecewise ops (ReLU, max) fold their discrete choices into a running
  // signature while tracking is on. Two forward passes with equal signatures
  // took the same linear piece of every kink.
  void set_branch_tracking(bool on) { track_branches_ = on; }
  bool tracking_branches() const { return track_branches_; }
  void note_branch(std::uint64_t choice);
  std::uint64_t branch_signature() const { return signature_; }

  // Creates the output node of an operation. The backward rule is kept only
  // when recording and at least one input requires a gradient.
  Tensor record(Shape shape, std::vector<double> values,
                std::vector<Tensor> inputs, BackwardFn backward);

  // Seeds d(loss)/d(loss) = 1 and runs every recorded rule in reverse order.
  // Intermediate gradients are reset first; parameter gradients accumulate.
  void backward(const Tensor& loss);

  void clear();
  std::size_t size() const { return nodes_.size(); }

 private:
  Mode mode_;
  bool track_branches_ = false;
  std::uint64_t signature_ = 0;
  std::vector<std::shared_ptr<detail::Node>> nodes_;
};

// ---- linear algebra -------------------------------------------------------

// [m x k] . [k x p] -> [m x p]
Tensor matmul(Tape& tape, const Tensor& a, const Tensor& b);
// [m x k] . [p x k]^T -> [m x p]
Tensor matmul_nt(Tape& tape, const Tensor& a, const Tensor& b);

struct AffineTerm {
  Tensor input;   // [m x k]
  Tensor weight;  // [p x k]
};
// sum_i input_i . weight_i^T + bias, bias of length p added to every row.
Tensor affine(Tape& tape, std::span<const AffineTerm> terms, const Tensor& bias);

// ---- elementwise ----------------------------------------------------------

enum class Elementwise { kAdd, kSub, kHadamard };

Tensor elementwise(Tape& tape, Elementwise op, const Tensor& a, const Tensor& b);
inline Tensor add(Tape& t, const Tensor& a, const Tensor& b) {
  return elementwise(t, Elementwise::kAdd, a, b);
}
inline Tensor sub(Tape& t, const Tensor& a, const Tensor& b) {
  return elementwise(t, Elementwise::kSub, a, b);
}
inline Tensor hadamard(Tape& t, const Tensor& a, const Tensor& b) {
  return elementwise(t, Elementwise::kHadamard, a, b);
}
Tensor scale(Tape& tape, const Tensor& a, double factor);

// Explicit row-wise broadcasts of a length-n vector over the last axis.
Tensor add_row(Tape& tape, const Tensor& a, const Tensor& row);
Tensor hadamard_row(Tape& tape, const Tensor& a, const Tensor& row);

// ---- activations ----------------------------------------------------------

enum class Activation { kSigmoid, kTanh, kRelu };

Tensor activation(Tape& tape, Activation kind, const Tensor& a);
inline Tensor sigmoid(Tape& t, const Tensor& a) {
  return activation(t, Activation::kSigmoid, a);
}
inline Tensor tanh(Tape& t, const Tensor& a) {
  return activation(t, Activation::kTanh, a);
}
inline Tensor relu(Tape& t, const Tensor& a) {
  return activation(t, Activation::kRelu, a);
}

// ---- reductions and slicing -----------------------------------------------

enum class Reduction { kMax, kSum, kMean };

// Removes `axis`. Reducing a rank-1 tensor yields shape [1]. Max routes the
// gradient to the first maximal element of each slice.
Tensor reduce(Tape& tape, Reduction kind, const Tensor& a, std::size_t axis);
Tensor sum_all(Tape& tape, const Tensor& a);

// Selects index `index` along `axis`, removing that axis.
Tensor take(Tape& tape, const Tensor& a, std::size_t axis, std::size_t index);

// ---- loss -----------------------------------------------------------------

struct SoftmaxCrossEntropy {
  Tensor loss;                 // shape [1], mean over rows
  std::vector<double> probs;   // row-major, same layout as the logits
};

// logits [C] with one target, or [B x C] with B targets.
SoftmaxCrossEntropy softmax_cross_entropy(Tape& tape, const Tensor& logits,
                                          std::span<const std::size_t> targets);

// Numerically stable softmax over the last axis (no tape).
std::vector<double> softmax(std::span<const double> logits, std::size_t classes);

}  // namespace crnn
