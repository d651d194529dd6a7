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

#include "crnn/grad_check.hpp"

#include <algorithm>
#include <cmath>

namespace crnn {

double GradCheckReport::max_rel_error() const {
  double worst = 0.0;
  for (const auto& b : blocks) worst = std::max(worst, b.max_rel_error);
  return worst;
}

std::size_t GradCheckReport::elements() const {
  std::size_t n = 0;
  for (const auto& b : blocks) n += b.elements;
  return n;
}

std::size_t GradCheckReport::skipped() const {
  std::size_t n = 0;
  for (const auto& b : blocks) n += b.skipped;
  return n;
}

double relative_error(double analytic, double numeric) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-8});
  return std::abs(analytic - numeric) / denom;
}

namespace {
struct Probe {
  double loss;
  std::uint64_t signature;
};

Probe evaluate(const LossFn& loss_fn) {
  Tape tape(Tape::Mode::kInference);
  tape.set_branch_tracking(true);
  const double v = loss_fn(tape).item();
  if (!std::isfinite(v)) throw NumericError("grad_check: non-finite loss");
  return {v, tape.branch_signature()};
}
}  // namespace

GradCheckReport grad_check(const LossFn& loss_fn, std::vector<ParamBlock> params,
                           const GradCheckOptions& options) {
  if (!(options.step > 0)) throw std::invalid_argument("grad_check: step must be positive");

  for (auto& p : params) p.tensor.zero_grad();
  std::vector<std::vector<double>> analytic;
  {
    Tape tape;
    Tensor loss = loss_fn(tape);
    if (!std::isfinite(loss.item())) throw NumericError("grad_check: non-finite loss");
    tape.backward(loss);
  }
  for (auto& p : params) {
    const auto g = p.tensor.grad();
    analytic.emplace_back(g.begin(), g.end());
    p.tensor.zero_grad();
  }

  const std::uint64_t center = evaluate(loss_fn).signature;

  GradCheckReport report;
  report.tolerance = options.tolerance;
  for (std::size_t b = 0; b < params.size(); ++b) {
    BlockGradError err;
    err.name = params[b].name;
    auto values = params[b].tensor.mutable_values();
    err.elements = values.size();
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double saved = values[i];
      values[i] = saved + options.step;
      const Probe up = evaluate(loss_fn);
      values[i] = saved - options.step;
      const Probe down = evaluate(loss_fn);
      values[i] = saved;
      if (options.skip_kinks && (up.signature != center || down.signature != center)) {
        ++err.skipped;
        continue;
      }
      const double numeric = (up.loss - down.loss) / (2.0 * options.step);
      const double rel = relative_error(analytic[b][i], numeric);
      if (rel > err.max_rel_error || i == err.skipped) {
        err.max_rel_error = rel;
        err.worst_index = i;
        err.analytic = analytic[b][i];
        err.numeric = numeric;
      }
    }
    report.blocks.push_back(err);
  }
  return report;
}

}  // namespace crnn
