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

// Adam optimisation, gradient clipping, the batch training loop and the
// aggregation-weight sweep.

#pragma once

#include "crnn/corpus.hpp"
#include "crnn/evaluation.hpp"
#include "crnn/model.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace crnn {

struct AdamOptions {
  double lr = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// lr * sqrt(1 - beta2^t) / (1 - beta1^t), t >= 1
double adam_effective_rate(const AdamOptions& options, std::uint64_t t);

class AdamState {
 public:
  explicit AdamState(AdamOptions options = {});

  // t <- t + 1, then for every block:
  //   m <- b1 m + (1 - b1) g;  v <- b2 v + (1 - b2) g^2
  //   theta <- theta - rate_t * m / (sqrt(v) + eps)
  // Gradients are validated before anything is modified.
  void step(std::span<ParamBlock> params);

  std::uint64_t t() const { return t_; }
  const AdamOptions& options() const { return options_; }
  const std::vector<std::vector<double>>& first_moment() const { return m_; }
  const std::vector<std::vector<double>>& second_moment() const { return v_; }

 private:
  AdamOptions options_;
  std::uint64_t t_ = 0;
  std::vector<std::vector<double>> m_;
  std::vector<std::vector<double>> v_;
};

double global_grad_norm(std::span<const ParamBlock> params);
// Scales all gradients so their joint L2 norm is at most max_norm; returns
// the norm before clipping.
double clip_global_norm(std::span<ParamBlock> params, double max_norm);

struct TrainPlan {
  std::size_t steps = 1000;
  std::size_t batch_size = 50;
  std::uint64_t seed = 0;
  std::size_t eval_every = 100;  // 0 disables periodic evaluation
  double clip = 5.0;
  AdamOptions adam;

  void validate() const;
};

struct TracePoint {
  std::size_t step = 0;
  double loss = 0.0;
  std::optional<double> test_f1;
};

struct TrainResult {
  CrnnParams params;
  std::vector<TracePoint> trace;
};

using TraceCallback = std::function<void(const TracePoint&)>;

// Seeded shuffle, batches cycled with a reshuffle after every full pass.
// Per step: zero grads, mean batch loss, backward, clip, Adam.
TrainResult train(const CrnnConfig& config, const LabeledCorpus& train_set, const TrainPlan& plan,
                  const LabeledCorpus* test_set = nullptr, const TraceCallback& on_step = {});

std::string trace_csv_header();
std::string trace_csv_row(const TracePoint& p);

struct SweepRow {
  double alpha = 0.0;
  MetricsReport report;
};

std::vector<double> default_alpha_grid();

// One model per alpha with a shared seed; rows sorted by macro F1,
// best first (ties keep grid order).
std::vector<SweepRow> sweep_alpha(const CrnnConfig& config, const LabeledCorpus& train_set,
                                  const LabeledCorpus& test_set, const TrainPlan& plan,
                                  const std::vector<double>& alphas);

}  // namespace crnn
