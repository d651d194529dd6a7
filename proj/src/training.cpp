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

#include "crnn/training.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

namespace crnn {

double adam_effective_rate(const AdamOptions& o, std::uint64_t t) {
  if (t == 0) throw std::invalid_argument("adam_effective_rate: t starts at 1");
  const double td = static_cast<double>(t);
  return o.lr * std::sqrt(1.0 - std::pow(o.beta2, td)) / (1.0 - std::pow(o.beta1, td));
}

AdamState::AdamState(AdamOptions options) : options_(options) {
  if (!(options_.beta1 >= 0.0 && options_.beta1 < 1.0 && options_.beta2 >= 0.0 &&
        options_.beta2 < 1.0)) {
    throw std::invalid_argument("Adam decay rates must lie in [0, 1)");
  }
  if (!(options_.lr > 0.0) || !(options_.epsilon > 0.0)) {
    throw std::invalid_argument("Adam learning rate and epsilon must be positive");
  }
}

void AdamState::step(std::span<ParamBlock> params) {
  if (m_.empty()) {
    for (const auto& p : params) {
      m_.emplace_back(p.tensor.numel(), 0.0);
      v_.emplace_back(p.tensor.numel(), 0.0);
    }
  }
  if (m_.size() != params.size()) throw std::invalid_argument("Adam: parameter set changed");
  for (std::size_t b = 0; b < params.size(); ++b) {
    if (params[b].tensor.numel() != m_[b].size()) {
      throw ShapeError("Adam: block " + params[b].name + " changed shape");
    }
    for (double g : params[b].tensor.grad()) {
      if (!std::isfinite(g)) throw NumericError("Adam: non-finite gradient in block " + params[b].name);
    }
  }

  ++t_;
  const double rate = adam_effective_rate(options_, t_);
  const double b1 = options_.beta1, b2 = options_.beta2;
  for (std::size_t b = 0; b < params.size(); ++b) {
    auto theta = params[b].tensor.mutable_values();
    const auto g = params[b].tensor.grad();
    auto& m = m_[b];
    auto& v = v_[b];
    if (g.empty()) {
      // No gradient buffer means a zero gradient.
      for (std::size_t i = 0; i < theta.size(); ++i) {
        m[i] *= b1;
        v[i] *= b2;
        theta[i] -= rate * m[i] / (std::sqrt(v[i]) + options_.epsilon);
      }
      continue;
    }
    for (std::size_t i = 0; i < theta.size(); ++i) {
      m[i] = b1 * m[i] + (1.0 - b1) * g[i];
      v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
      theta[i] -= rate * m[i] / (std::sqrt(v[i]) + options_.epsilon);
    }
  }
}

double global_grad_norm(std::span<const ParamBlock> params) {
  double sq = 0.0;
  for (const auto& p : params)
    for (double g : p.tensor.grad()) sq += g * g;
  return std::sqrt(sq);
}

double clip_global_norm(std::span<ParamBlock> params, double max_norm) {
  const double norm = global_grad_norm(params);
  if (norm > max_norm && norm > 0.0) {
    const double s = max_norm / norm;
    for (auto& p : params) {
      if (p.tensor.grad().empty()) continue;
      for (auto& g : p.tensor.grad_buffer()) g *= s;
    }
  }
  return norm;
}

void TrainPlan::validate() const {
  if (steps == 0) throw std::invalid_argument("training plan needs steps > 0");
  if (batch_size == 0) throw std::invalid_argument("training plan needs batch_size >= 1");
  if (!(clip > 0.0)) throw std::invalid_argument("gradient clip must be positive");
}

namespace {

class BatchStream {
 public:
  BatchStream(std::size_t n, Rng rng) : rng_(std::move(rng)), order_(n) {
    for (std::size_t i = 0; i < n; ++i) order_[i] = i;
    rng_.shuffle(order_);
  }
  std::vector<std::size_t> next(std::size_t batch) {
    std::vector<std::size_t> out;
    out.reserve(batch);
    while (out.size() < batch) {
      if (cursor_ == order_.size()) {
        rng_.shuffle(order_);
        cursor_ = 0;
      }
      out.push_back(order_[cursor_++]);
    }
    return out;
  }

 private:
  Rng rng_;
  std::vector<std::size_t> order_;
  std::size_t cursor_ = 0;
};

}  // namespace

TrainResult train(const CrnnConfig& config, const LabeledCorpus& train_set, const TrainPlan& plan,
                  const LabeledCorpus* test_set, const TraceCallback& on_step) {
  plan.validate();
  config.validate();
  if (train_set.empty()) throw CorpusError("train: empty corpus");
  for (std::size_t i = 0; i < train_set.size(); ++i) {
    if (train_set.class_id(i) >= config.num_classes) {
      throw std::out_of_range("train: label id " + std::to_string(train_set.class_id(i)) +
                              " >= class count " + std::to_string(config.num_classes));
    }
  }

  const std::vector<Sample> samples = encode_corpus(train_set, config.length);
  std::vector<Sample> test_samples;
  if (test_set) test_samples = encode_corpus(*test_set, config.length);

  TrainResult result{CrnnParams::init(config), {}};
  auto blocks = result.params.named_parameters();
  AdamState adam(plan.adam);
  BatchStream stream(samples.size(), Rng(plan.seed).split("batches"));

  std::vector<Sample> batch;
  for (std::size_t s = 1; s <= plan.steps; ++s) {
    batch.clear();
    for (auto i : stream.next(plan.batch_size)) batch.push_back(samples[i]);

    for (auto& b : blocks) b.tensor.zero_grad();
    TracePoint point;
    point.step = s;
    {
      Tape tape;
      const Tensor l = loss(tape, config, result.params, batch);
      point.loss = l.item();
      tape.backward(l);
    }
    clip_global_norm(blocks, plan.clip);
    adam.step(blocks);

    const bool eval_now =
        !test_samples.empty() && ((plan.eval_every > 0 && s % plan.eval_every == 0) || s == plan.steps);
    if (eval_now) point.test_f1 = evaluate(config, result.params, test_samples).macro_f1;
    result.trace.push_back(point);
    if (on_step) on_step(point);
  }
  return result;
}

std::string trace_csv_header() { return "step,loss,test_f1"; }

std::string trace_csv_row(const TracePoint& p) {
  std::ostringstream os;
  os << p.step << ',' << std::setprecision(17) << p.loss << ',';
  if (p.test_f1) os << std::setprecision(6) << *p.test_f1;
  return os.str();
}

std::vector<double> default_alpha_grid() {
  return {0.9, 0.8, 0.7, 0.6, 0.5, 0.4, 0.3, 0.2, 0.1};
}

std::vector<SweepRow> sweep_alpha(const CrnnConfig& config, const LabeledCorpus& train_set,
                                  const LabeledCorpus& test_set, const TrainPlan& plan,
                                  const std::vector<double>& alphas) {
  if (alphas.empty()) throw std::invalid_argument("sweep_alpha: no alpha values");
  for (double a : alphas) {
    if (!(a >= 0.0 && a <= 1.0)) throw ConfigError("sweep_alpha: alpha outside [0, 1]");
  }
  std::vector<SweepRow> rows;
  for (double a : alphas) {
    CrnnConfig c = config;
    c.alpha = a;
    TrainPlan p = plan;
    p.eval_every = 0;
    const TrainResult r = train(c, train_set, p);
    rows.push_back({a, evaluate(c, r.params, test_set)});
  }
  std::stable_sort(rows.begin(), rows.end(), [](const SweepRow& x, const SweepRow& y) {
    return x.report.macro_f1 > y.report.macro_f1;
  });
  return rows;
}

}  // namespace crnn
