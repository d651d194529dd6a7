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

#include "crnn/tensor.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace crnn {

namespace detail {

struct Storage {
  std::vector<double> value;
  std::vector<double> grad;
};

struct Node {
  Shape shape;
  std::shared_ptr<Storage> storage;
  bool requires_grad = false;
  bool leaf = true;
  std::vector<Tensor> inputs;
  BackwardFn backward;
};

}  // namespace detail

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const RowMatrix>;
using MutMap = Eigen::Map<RowMatrix>;

void check_finite(std::span<const double> values, const char* op) {
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw NumericError(std::string("non-finite value produced by ") + op);
    }
  }
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (!(a.shape() == b.shape())) {
    throw ShapeError(std::string(op) + ": shape mismatch " + a.shape().str() + " vs " +
                     b.shape().str());
  }
}

void require_rank(const Tensor& a, std::size_t rank, const char* op) {
  if (a.shape().rank() != rank) {
    throw ShapeError(std::string(op) + ": expected rank " + std::to_string(rank) + ", got " +
                     a.shape().str());
  }
}

std::size_t last_dim(const Shape& s) { return s[s.rank() - 1]; }

}  // namespace

// ---- Shape ----------------------------------------------------------------

Shape::Shape(std::initializer_list<std::size_t> dims)
    : Shape(std::span<const std::size_t>(dims.begin(), dims.size())) {}

Shape::Shape(std::span<const std::size_t> dims) {
  if (dims.empty() || dims.size() > kMaxRank) {
    throw ShapeError("shape rank must be 1 to 3, got " + std::to_string(dims.size()));
  }
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (dims[i] == 0) {
      throw ShapeError("shape dimensions must be positive");
    }
    dims_[i] = dims[i];
  }
  rank_ = dims.size();
}

std::size_t Shape::numel() const {
  std::size_t n = rank_ == 0 ? 0 : 1;
  for (std::size_t i = 0; i < rank_; ++i) n *= dims_[i];
  return n;
}

std::string Shape::str() const {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < rank_; ++i) {
    if (i) os << 'x';
    os << dims_[i];
  }
  os << ']';
  return os.str();
}

// ---- Tensor ---------------------------------------------------------------

namespace {
std::shared_ptr<detail::Node> make_node(Shape shape, std::vector<double> values,
                                        bool requires_grad) {
  if (values.size() != shape.numel()) {
    throw ShapeError("value count " + std::to_string(values.size()) + " does not match shape " +
                     shape.str());
  }
  auto node = std::make_shared<detail::Node>();
  node->shape = shape;
  node->storage = std::make_shared<detail::Storage>();
  node->storage->value = std::move(values);
  node->requires_grad = requires_grad;
  if (requires_grad) node->storage->grad.assign(node->storage->value.size(), 0.0);
  return node;
}
}  // namespace

Tensor Tensor::constant(Shape shape, std::vector<double> values) {
  check_finite(values, "constant");
  return Tensor(make_node(shape, std::move(values), false));
}

Tensor Tensor::parameter(Shape shape, std::vector<double> values) {
  check_finite(values, "parameter");
  return Tensor(make_node(shape, std::move(values), true));
}

Tensor Tensor::zeros(Shape shape, bool requires_grad) {
  return Tensor(make_node(shape, std::vector<double>(shape.numel(), 0.0), requires_grad));
}

const Shape& Tensor::shape() const { return node_->shape; }
bool Tensor::requires_grad() const { return node_ && node_->requires_grad; }

std::span<const double> Tensor::values() const { return node_->storage->value; }
std::span<double> Tensor::mutable_values() { return node_->storage->value; }

std::span<const double> Tensor::grad() const { return node_->storage->grad; }

std::span<double> Tensor::grad_buffer() {
  auto& g = node_->storage->grad;
  if (g.empty()) g.assign(node_->storage->value.size(), 0.0);
  return g;
}

void Tensor::zero_grad() {
  auto& g = node_->storage->grad;
  std::fill(g.begin(), g.end(), 0.0);
}

double Tensor::item() const {
  if (numel() != 1) throw ShapeError("item() on non-scalar tensor " + shape().str());
  return values()[0];
}

double Tensor::at(std::size_t i) const { return values()[i]; }

double Tensor::at(std::size_t i, std::size_t j) const {
  return values()[i * shape()[1] + j];
}

double Tensor::at(std::size_t i, std::size_t j, std::size_t k) const {
  return values()[(i * shape()[1] + j) * shape()[2] + k];
}

Tensor Tensor::reshaped(Shape shape) const {
  if (shape.numel() != numel()) {
    throw ShapeError("cannot reshape " + this->shape().str() + " to " + shape.str());
  }
  auto node = std::make_shared<detail::Node>();
  node->shape = shape;
  node->storage = node_->storage;
  node->requires_grad = node_->requires_grad;
  node->leaf = node_->leaf;
  return Tensor(std::move(node));
}

// ---- Tape -----------------------------------------------------------------

Tensor Tape::record(Shape shape, std::vector<double> values, std::vector<Tensor> inputs,
                    BackwardFn backward) {
  const bool needs_grad =
      recording() && std::any_of(inputs.begin(), inputs.end(),
                                 [](const Tensor& t) { return t.requires_grad(); });
  check_finite(values, "tensor operation");
  auto node = make_node(shape, std::move(values), false);
  if (needs_grad) {
    node->requires_grad = true;
    node->leaf = false;
    node->inputs = std::move(inputs);
    node->backward = std::move(backward);
    nodes_.push_back(node);
  }
  return Tensor(std::move(node));
}

void Tape::backward(const Tensor& loss) {
  if (!loss.defined() || loss.numel() != 1) {
    throw ShapeError("backward requires a scalar loss");
  }
  if (!loss.requires_grad()) return;
  for (auto& node : nodes_) {
    auto& g = node->storage->grad;
    std::fill(g.begin(), g.end(), 0.0);
  }
  Tensor seed = loss;
  seed.grad_buffer()[0] += 1.0;
  for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) {
    detail::Node& node = **it;
    if (node.storage->grad.empty()) continue;
    node.backward(node.storage->value, node.storage->grad, node.inputs);
  }
}

void Tape::note_branch(std::uint64_t choice) {
  std::uint64_t z = signature_ ^ (choice + 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  signature_ = z ^ (z >> 31);
}

void Tape::clear() {
  nodes_.clear();
  signature_ = 0;
}

// ---- linear algebra -------------------------------------------------------

Tensor matmul(Tape& tape, const Tensor& a, const Tensor& b) {
  require_rank(a, 2, "matmul");
  require_rank(b, 2, "matmul");
  const std::size_t m = a.shape()[0], k = a.shape()[1], p = b.shape()[1];
  if (b.shape()[0] != k) {
    throw ShapeError("matmul: inner dimensions differ " + a.shape().str() + " . " +
                     b.shape().str());
  }
  std::vector<double> out(m * p);
  MutMap(out.data(), m, p).noalias() =
      ConstMap(a.values().data(), m, k) * ConstMap(b.values().data(), k, p);
  return tape.record(Shape{m, p}, std::move(out), {a, b},
                     [m, k, p](std::span<const double>, std::span<const double> g,
                               std::span<Tensor> in) {
                       ConstMap G(g.data(), m, p);
                       if (in[0].requires_grad()) {
                         MutMap(in[0].grad_buffer().data(), m, k).noalias() +=
                             G * ConstMap(in[1].values().data(), k, p).transpose();
                       }
                       if (in[1].requires_grad()) {
                         MutMap(in[1].grad_buffer().data(), k, p).noalias() +=
                             ConstMap(in[0].values().data(), m, k).transpose() * G;
                       }
                     });
}

Tensor matmul_nt(Tape& tape, const Tensor& a, const Tensor& b) {
  require_rank(a, 2, "matmul_nt");
  require_rank(b, 2, "matmul_nt");
  const std::size_t m = a.shape()[0], k = a.shape()[1], p = b.shape()[0];
  if (b.shape()[1] != k) {
    throw ShapeError("matmul_nt: inner dimensions differ " + a.shape().str() + " . " +
                     b.shape().str() + "^T");
  }
  std::vector<double> out(m * p);
  MutMap(out.data(), m, p).noalias() =
      ConstMap(a.values().data(), m, k) * ConstMap(b.values().data(), p, k).transpose();
  return tape.record(Shape{m, p}, std::move(out), {a, b},
                     [m, k, p](std::span<const double>, std::span<const double> g,
                               std::span<Tensor> in) {
                       ConstMap G(g.data(), m, p);
                       if (in[0].requires_grad()) {
                         MutMap(in[0].grad_buffer().data(), m, k).noalias() +=
                             G * ConstMap(in[1].values().data(), p, k);
                       }
                       if (in[1].requires_grad()) {
                         MutMap(in[1].grad_buffer().data(), p, k).noalias() +=
                             G.transpose() * ConstMap(in[0].values().data(), m, k);
                       }
                     });
}

Tensor affine(Tape& tape, std::span<const AffineTerm> terms, const Tensor& bias) {
  if (terms.empty()) throw ShapeError("affine: no terms");
  require_rank(bias, 1, "affine bias");
  const std::size_t m = terms[0].input.shape()[0];
  const std::size_t p = bias.shape()[0];
  std::vector<Tensor> inputs;
  std::vector<std::size_t> widths;
  for (const auto& term : terms) {
    require_rank(term.input, 2, "affine input");
    require_rank(term.weight, 2, "affine weight");
    if (term.input.shape()[0] != m || term.weight.shape()[0] != p ||
        term.weight.shape()[1] != term.input.shape()[1]) {
      throw ShapeError("affine: term " + term.input.shape().str() + " . " +
                       term.weight.shape().str() + "^T incompatible with bias " +
                       bias.shape().str() + " and " + std::to_string(m) + " rows");
    }
    inputs.push_back(term.input);
    inputs.push_back(term.weight);
    widths.push_back(term.input.shape()[1]);
  }
  inputs.push_back(bias);

  std::vector<double> out(m * p);
  MutMap O(out.data(), m, p);
  O.rowwise() = Eigen::Map<const Eigen::RowVectorXd>(bias.values().data(), p);
  for (std::size_t t = 0; t < terms.size(); ++t) {
    const std::size_t k = widths[t];
    O.noalias() += ConstMap(terms[t].input.values().data(), m, k) *
                   ConstMap(terms[t].weight.values().data(), p, k).transpose();
  }
  return tape.record(
      Shape{m, p}, std::move(out), std::move(inputs),
      [m, p, widths](std::span<const double>, std::span<const double> g, std::span<Tensor> in) {
        ConstMap G(g.data(), m, p);
        for (std::size_t t = 0; t < widths.size(); ++t) {
          const std::size_t k = widths[t];
          Tensor& x = in[2 * t];
          Tensor& w = in[2 * t + 1];
          if (x.requires_grad()) {
            MutMap(x.grad_buffer().data(), m, k).noalias() +=
                G * ConstMap(w.values().data(), p, k);
          }
          if (w.requires_grad()) {
            MutMap(w.grad_buffer().data(), p, k).noalias() +=
                G.transpose() * ConstMap(x.values().data(), m, k);
          }
        }
        Tensor& b = in.back();
        if (b.requires_grad()) {
          Eigen::Map<Eigen::RowVectorXd>(b.grad_buffer().data(), p) += G.colwise().sum();
        }
      });
}

// ---- elementwise ----------------------------------------------------------

Tensor elementwise(Tape& tape, Elementwise op, const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "elementwise");
  const auto av = a.values();
  const auto bv = b.values();
  std::vector<double> out(av.size());
  switch (op) {
    case Elementwise::kAdd:
      for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] + bv[i];
      break;
    case Elementwise::kSub:
      for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] - bv[i];
      break;
    case Elementwise::kHadamard:
      for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] * bv[i];
      break;
  }
  return tape.record(a.shape(), std::move(out), {a, b},
                     [op](std::span<const double>, std::span<const double> g,
                          std::span<Tensor> in) {
                       const std::size_t n = g.size();
                       if (in[0].requires_grad()) {
                         auto ga = in[0].grad_buffer();
                         if (op == Elementwise::kHadamard) {
                           const auto bv = in[1].values();
                           for (std::size_t i = 0; i < n; ++i) ga[i] += g[i] * bv[i];
                         } else {
                           for (std::size_t i = 0; i < n; ++i) ga[i] += g[i];
                         }
                       }
                       if (in[1].requires_grad()) {
                         auto gb = in[1].grad_buffer();
                         if (op == Elementwise::kHadamard) {
                           const auto av = in[0].values();
                           for (std::size_t i = 0; i < n; ++i) gb[i] += g[i] * av[i];
                         } else if (op == Elementwise::kSub) {
                           for (std::size_t i = 0; i < n; ++i) gb[i] -= g[i];
                         } else {
                           for (std::size_t i = 0; i < n; ++i) gb[i] += g[i];
                         }
                       }
                     });
}

Tensor scale(Tape& tape, const Tensor& a, double factor) {
  if (!std::isfinite(factor)) throw NumericError("scale: non-finite factor");
  const auto av = a.values();
  std::vector<double> out(av.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = factor * av[i];
  return tape.record(a.shape(), std::move(out), {a},
                     [factor](std::span<const double>, std::span<const double> g,
                              std::span<Tensor> in) {
                       auto ga = in[0].grad_buffer();
                       for (std::size_t i = 0; i < g.size(); ++i) ga[i] += factor * g[i];
                     });
}

namespace {
void require_row(const Tensor& a, const Tensor& row, const char* op) {
  require_rank(row, 1, op);
  if (last_dim(a.shape()) != row.shape()[0]) {
    throw ShapeError(std::string(op) + ": row " + row.shape().str() +
                     " does not match last axis of " + a.shape().str());
  }
}
}  // namespace

Tensor add_row(Tape& tape, const Tensor& a, const Tensor& row) {
  require_row(a, row, "add_row");
  const std::size_t n = row.numel();
  const auto av = a.values();
  const auto rv = row.values();
  std::vector<double> out(av.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] + rv[i % n];
  return tape.record(a.shape(), std::move(out), {a, row},
                     [n](std::span<const double>, std::span<const double> g,
                         std::span<Tensor> in) {
                       if (in[0].requires_grad()) {
                         auto ga = in[0].grad_buffer();
                         for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
                       }
                       if (in[1].requires_grad()) {
                         auto gr = in[1].grad_buffer();
                         for (std::size_t i = 0; i < g.size(); ++i) gr[i % n] += g[i];
                       }
                     });
}

Tensor hadamard_row(Tape& tape, const Tensor& a, const Tensor& row) {
  require_row(a, row, "hadamard_row");
  const std::size_t n = row.numel();
  const auto av = a.values();
  const auto rv = row.values();
  std::vector<double> out(av.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] * rv[i % n];
  return tape.record(a.shape(), std::move(out), {a, row},
                     [n](std::span<const double>, std::span<const double> g,
                         std::span<Tensor> in) {
                       if (in[0].requires_grad()) {
                         auto ga = in[0].grad_buffer();
                         const auto rv = in[1].values();
                         for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * rv[i % n];
                       }
                       if (in[1].requires_grad()) {
                         auto gr = in[1].grad_buffer();
                         const auto av = in[0].values();
                         for (std::size_t i = 0; i < g.size(); ++i) gr[i % n] += g[i] * av[i];
                       }
                     });
}

// ---- activations ----------------------------------------------------------

Tensor activation(Tape& tape, Activation kind, const Tensor& a) {
  const auto av = a.values();
  std::vector<double> out(av.size());
  switch (kind) {
    case Activation::kSigmoid:
      for (std::size_t i = 0; i < out.size(); ++i) {
        // Split on sign so exp never overflows.
        const double x = av[i];
        if (x >= 0) {
          out[i] = 1.0 / (1.0 + std::exp(-x));
        } else {
          const double e = std::exp(x);
          out[i] = e / (1.0 + e);
        }
      }
      break;
    case Activation::kTanh:
      for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::tanh(av[i]);
      break;
    case Activation::kRelu:
      for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] > 0 ? av[i] : 0.0;
      if (tape.tracking_branches()) {
        std::uint64_t word = 0;
        for (std::size_t i = 0; i < out.size(); ++i) {
          word = (word << 1) | (av[i] > 0 ? 1u : 0u);
          if (i % 64 == 63) tape.note_branch(word), word = 0;
        }
        tape.note_branch(word);
      }
      break;
  }
  return tape.record(a.shape(), std::move(out), {a},
                     [kind](std::span<const double> y, std::span<const double> g,
                            std::span<Tensor> in) {
                       auto ga = in[0].grad_buffer();
                       switch (kind) {
                         case Activation::kSigmoid:
                           for (std::size_t i = 0; i < g.size(); ++i)
                             ga[i] += g[i] * y[i] * (1.0 - y[i]);
                           break;
                         case Activation::kTanh:
                           for (std::size_t i = 0; i < g.size(); ++i)
                             ga[i] += g[i] * (1.0 - y[i] * y[i]);
                           break;
                         case Activation::kRelu: {
                           const auto x = in[0].values();
                           for (std::size_t i = 0; i < g.size(); ++i)
                             if (x[i] > 0) ga[i] += g[i];
                           break;
                         }
                       }
                     });
}

// ---- reductions and slicing -----------------------------------------------

namespace {
struct AxisSplit {
  std::size_t outer = 1, len = 1, inner = 1;
};

AxisSplit split_axis(const Shape& s, std::size_t axis) {
  AxisSplit r;
  for (std::size_t i = 0; i < axis; ++i) r.outer *= s[i];
  r.len = s[axis];
  for (std::size_t i = axis + 1; i < s.rank(); ++i) r.inner *= s[i];
  return r;
}

Shape drop_axis(const Shape& s, std::size_t axis) {
  if (s.rank() == 1) return Shape{1};
  std::vector<std::size_t> dims;
  for (std::size_t i = 0; i < s.rank(); ++i)
    if (i != axis) dims.push_back(s[i]);
  return Shape(std::span<const std::size_t>(dims));
}
}  // namespace

Tensor reduce(Tape& tape, Reduction kind, const Tensor& a, std::size_t axis) {
  if (axis >= a.shape().rank()) {
    throw ShapeError("reduce: axis " + std::to_string(axis) + " out of range for " +
                     a.shape().str());
  }
  const AxisSplit sp = split_axis(a.shape(), axis);
  const auto av = a.values();
  std::vector<double> out(sp.outer * sp.inner);
  std::vector<std::size_t> argmax;
  if (kind == Reduction::kMax) argmax.resize(out.size());
  for (std::size_t o = 0; o < sp.outer; ++o) {
    for (std::size_t i = 0; i < sp.inner; ++i) {
      const std::size_t base = o * sp.len * sp.inner + i;
      double acc = kind == Reduction::kMax ? av[base] : 0.0;
      std::size_t best = 0;
      for (std::size_t l = 0; l < sp.len; ++l) {
        const double v = av[base + l * sp.inner];
        if (kind == Reduction::kMax) {
          if (v > acc) {
            acc = v;
            best = l;
          }
        } else {
          acc += v;
        }
      }
      if (kind == Reduction::kMean) acc /= static_cast<double>(sp.len);
      out[o * sp.inner + i] = acc;
      if (kind == Reduction::kMax) argmax[o * sp.inner + i] = best;
    }
  }
  if (tape.tracking_branches())
    for (auto m : argmax) tape.note_branch(m);
  return tape.record(drop_axis(a.shape(), axis), std::move(out), {a},
                     [kind, sp, argmax = std::move(argmax)](std::span<const double>,
                                                            std::span<const double> g,
                                                            std::span<Tensor> in) {
                       auto ga = in[0].grad_buffer();
                       const double w = kind == Reduction::kMean
                                            ? 1.0 / static_cast<double>(sp.len)
                                            : 1.0;
                       for (std::size_t o = 0; o < sp.outer; ++o) {
                         for (std::size_t i = 0; i < sp.inner; ++i) {
                           const std::size_t r = o * sp.inner + i;
                           const std::size_t base = o * sp.len * sp.inner + i;
                           if (kind == Reduction::kMax) {
                             ga[base + argmax[r] * sp.inner] += g[r];
                           } else {
                             for (std::size_t l = 0; l < sp.len; ++l)
                               ga[base + l * sp.inner] += w * g[r];
                           }
                         }
                       }
                     });
}

Tensor sum_all(Tape& tape, const Tensor& a) {
  return reduce(tape, Reduction::kSum, a.reshaped(Shape{a.numel()}), 0);
}

Tensor take(Tape& tape, const Tensor& a, std::size_t axis, std::size_t index) {
  if (axis >= a.shape().rank() || index >= a.shape()[axis]) {
    throw ShapeError("take: index " + std::to_string(index) + " on axis " +
                     std::to_string(axis) + " out of range for " + a.shape().str());
  }
  const AxisSplit sp = split_axis(a.shape(), axis);
  const auto av = a.values();
  std::vector<double> out(sp.outer * sp.inner);
  for (std::size_t o = 0; o < sp.outer; ++o) {
    std::copy_n(av.begin() + static_cast<std::ptrdiff_t>((o * sp.len + index) * sp.inner),
                sp.inner, out.begin() + static_cast<std::ptrdiff_t>(o * sp.inner));
  }
  return tape.record(drop_axis(a.shape(), axis), std::move(out), {a},
                     [sp, index](std::span<const double>, std::span<const double> g,
                                 std::span<Tensor> in) {
                       auto ga = in[0].grad_buffer();
                       for (std::size_t o = 0; o < sp.outer; ++o) {
                         double* dst = ga.data() + (o * sp.len + index) * sp.inner;
                         const double* src = g.data() + o * sp.inner;
                         for (std::size_t i = 0; i < sp.inner; ++i) dst[i] += src[i];
                       }
                     });
}

// ---- loss -----------------------------------------------------------------

std::vector<double> softmax(std::span<const double> logits, std::size_t classes) {
  if (classes == 0 || logits.size() % classes != 0) {
    throw ShapeError("softmax: logits length not a multiple of class count");
  }
  std::vector<double> probs(logits.size());
  for (std::size_t r = 0; r < logits.size() / classes; ++r) {
    const double* z = logits.data() + r * classes;
    double* p = probs.data() + r * classes;
    const double mx = *std::max_element(z, z + classes);
    double total = 0.0;
    for (std::size_t c = 0; c < classes; ++c) {
      p[c] = std::exp(z[c] - mx);
      total += p[c];
    }
    for (std::size_t c = 0; c < classes; ++c) p[c] /= total;
  }
  return probs;
}

SoftmaxCrossEntropy softmax_cross_entropy(Tape& tape, const Tensor& logits,
                                          std::span<const std::size_t> targets) {
  const Shape& s = logits.shape();
  if (s.rank() > 2) throw ShapeError("softmax_cross_entropy: logits must be rank 1 or 2");
  const std::size_t rows = s.rank() == 2 ? s[0] : 1;
  const std::size_t classes = last_dim(s);
  if (classes < 2) throw ShapeError("softmax_cross_entropy: need at least 2 classes");
  if (targets.size() != rows) {
    throw ShapeError("softmax_cross_entropy: " + std::to_string(targets.size()) +
                     " targets for " + std::to_string(rows) + " rows");
  }
  const auto z = logits.values();
  double total = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    if (targets[r] >= classes) {
      throw std::out_of_range("softmax_cross_entropy: target " + std::to_string(targets[r]) +
                              " out of range for " + std::to_string(classes) + " classes");
    }
    const double* zr = z.data() + r * classes;
    const double mx = *std::max_element(zr, zr + classes);
    double sum = 0.0;
    for (std::size_t c = 0; c < classes; ++c) sum += std::exp(zr[c] - mx);
    total += mx + std::log(sum) - zr[targets[r]];
  }
  const double loss = total / static_cast<double>(rows);
  check_finite(std::span<const double>(&loss, 1), "softmax_cross_entropy");

  SoftmaxCrossEntropy result;
  result.probs = softmax(z, classes);
  std::vector<std::size_t> tg(targets.begin(), targets.end());
  result.loss = tape.record(
      Shape{1}, {loss}, {logits},
      [probs = result.probs, tg = std::move(tg), rows, classes](
          std::span<const double>, std::span<const double> g, std::span<Tensor> in) {
        auto gl = in[0].grad_buffer();
        const double w = g[0] / static_cast<double>(rows);
        for (std::size_t r = 0; r < rows; ++r) {
          for (std::size_t c = 0; c < classes; ++c) {
            const std::size_t i = r * classes + c;
            gl[i] += w * (probs[i] - (c == tg[r] ? 1.0 : 0.0));
          }
        }
      });
  return result;
}

}  // namespace crnn
