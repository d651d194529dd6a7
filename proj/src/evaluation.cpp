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

#include "crnn/evaluation.hpp"

#include "crnn/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <sstream>
#include <unordered_map>

namespace crnn {

// ---- metrics --------------------------------------------------------------

void ConfusionCounts::add(std::size_t truth, std::size_t predicted) {
  if (truth >= classes() || predicted >= classes()) {
    throw std::out_of_range("confusion counts: class id out of range");
  }
  if (truth == predicted) {
    ++true_positive[truth];
  } else {
    ++false_negative[truth];
    ++false_positive[predicted];
  }
}

namespace {
double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}
}  // namespace

MetricsReport metrics_from_counts(const ConfusionCounts& counts) {
  MetricsReport r;
  for (std::size_t c = 0; c < counts.classes(); ++c) {
    const std::size_t tp = counts.true_positive[c];
    const std::size_t fp = counts.false_positive[c];
    const std::size_t fn = counts.false_negative[c];
    if (tp + fn == 0) continue;
    ClassMetrics m;
    m.class_id = c;
    m.precision = ratio(tp, tp + fp);
    m.recall = ratio(tp, tp + fn);
    m.f1 = m.precision + m.recall > 0
               ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
               : 0.0;
    r.per_class.push_back(m);
  }
  if (!r.per_class.empty()) {
    const double n = static_cast<double>(r.per_class.size());
    for (const auto& m : r.per_class) {
      r.macro_precision += m.precision;
      r.macro_recall += m.recall;
      r.macro_f1 += m.f1;
    }
    r.macro_precision /= n;
    r.macro_recall /= n;
    r.macro_f1 /= n;
  }
  return r;
}

MetricsReport metrics_from_predictions(std::size_t classes, std::span<const std::size_t> truth,
                                       std::span<const std::size_t> predicted) {
  if (truth.size() != predicted.size()) {
    throw std::invalid_argument("metrics: truth and prediction counts differ");
  }
  ConfusionCounts counts(classes);
  for (std::size_t i = 0; i < truth.size(); ++i) counts.add(truth[i], predicted[i]);
  return metrics_from_counts(counts);
}

std::string metrics_csv(const MetricsReport& report, const std::vector<std::string>& label_names) {
  std::ostringstream os;
  os << "class,precision,recall,f1\n" << std::fixed << std::setprecision(6);
  for (const auto& m : report.per_class) {
    const std::string name =
        m.class_id < label_names.size() ? label_names[m.class_id] : std::to_string(m.class_id);
    os << name << ',' << m.precision << ',' << m.recall << ',' << m.f1 << '\n';
  }
  os << "macro," << report.macro_precision << ',' << report.macro_recall << ','
     << report.macro_f1 << '\n';
  return os.str();
}

// ---- model evaluation -----------------------------------------------------

std::vector<Sample> encode_corpus(const LabeledCorpus& corpus, std::size_t length) {
  std::vector<Sample> out;
  out.reserve(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    out.push_back({encode(corpus.text(i), length), corpus.class_id(i)});
  }
  return out;
}

MetricsReport evaluate(const CrnnConfig& config, const CrnnParams& params,
                       std::span<const Sample> test) {
  if (test.empty()) throw std::invalid_argument("evaluate: empty test set");
  constexpr std::size_t kChunk = 64;
  std::vector<std::size_t> truth, predicted;
  std::vector<CharMatrix> chunk;
  for (std::size_t start = 0; start < test.size(); start += kChunk) {
    chunk.clear();
    const std::size_t end = std::min(test.size(), start + kChunk);
    for (std::size_t i = start; i < end; ++i) {
      if (test[i].label >= config.num_classes) {
        throw std::out_of_range("evaluate: label id " + std::to_string(test[i].label) +
                                " >= class count " + std::to_string(config.num_classes));
      }
      chunk.push_back(test[i].chars);
      truth.push_back(test[i].label);
    }
    for (const auto& p : predict(config, params, chunk)) predicted.push_back(p.label);
  }
  return metrics_from_predictions(config.num_classes, truth, predicted);
}

MetricsReport evaluate(const CrnnConfig& config, const CrnnParams& params,
                       const LabeledCorpus& test) {
  const auto samples = encode_corpus(test, config.length);
  return evaluate(config, params, samples);
}

// ---- KNN ------------------------------------------------------------------

namespace {

using SparseVector = std::vector<std::pair<std::size_t, double>>;  // sorted by term id

SparseVector vectorize(const std::string& text, const std::unordered_map<std::string, std::size_t>& vocab,
                       const std::vector<double>* idf) {
  std::unordered_map<std::size_t, double> tf;
  for (const auto& tok : split_whitespace(to_lower_ascii(text))) {
    auto it = vocab.find(tok);
    if (it != vocab.end()) tf[it->second] += 1.0;
  }
  SparseVector v(tf.begin(), tf.end());
  std::sort(v.begin(), v.end());
  if (idf) {
    for (auto& [term, w] : v) w *= (*idf)[term];
  }
  double norm = 0.0;
  for (const auto& e : v) norm += e.second * e.second;
  norm = std::sqrt(norm);
  if (norm == 0.0) return {};
  for (auto& e : v) e.second /= norm;
  return v;
}

double dot(const SparseVector& a, const SparseVector& b) {
  double s = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i].first == b[j].first) {
      s += a[i++].second * b[j++].second;
    } else if (a[i].first < b[j].first) {
      ++i;
    } else {
      ++j;
    }
  }
  return s;
}

}  // namespace

KnnResult knn_baseline(const LabeledCorpus& train, const LabeledCorpus& test, std::size_t k,
                       Representation representation) {
  if (train.empty()) throw CorpusError("knn_baseline: empty training set");
  if (k == 0) throw std::invalid_argument("knn_baseline: k must be at least 1");

  KnnResult result;
  result.k_used = std::min(k, train.size());
  result.k_clamped = result.k_used != k;
  if (result.k_clamped) {
    std::cerr << "warning: k=" << k << " exceeds training size; using k=" << result.k_used << '\n';
  }

  std::unordered_map<std::string, std::size_t> vocab;
  std::vector<std::size_t> df;
  for (std::size_t i = 0; i < train.size(); ++i) {
    auto tokens = split_whitespace(to_lower_ascii(train.text(i)));
    std::sort(tokens.begin(), tokens.end());
    tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
    for (const auto& tok : tokens) {
      auto [it, inserted] = vocab.emplace(tok, vocab.size());
      if (inserted) df.push_back(0);
      ++df[it->second];
    }
  }
  std::vector<double> idf;
  if (representation == Representation::kTfidf) {
    const double n = static_cast<double>(train.size());
    for (auto d : df) idf.push_back(std::log(n / static_cast<double>(d)));
  }
  const std::vector<double>* idf_ptr = representation == Representation::kTfidf ? &idf : nullptr;

  std::vector<SparseVector> train_vecs;
  train_vecs.reserve(train.size());
  for (std::size_t i = 0; i < train.size(); ++i) train_vecs.push_back(vectorize(train.text(i), vocab, idf_ptr));

  const std::size_t classes = std::max(train.num_classes(), test.num_classes());
  std::vector<std::size_t> truth;
  std::vector<std::pair<double, std::size_t>> sims(train.size());
  for (std::size_t q = 0; q < test.size(); ++q) {
    const SparseVector qv = vectorize(test.text(q), vocab, idf_ptr);
    for (std::size_t i = 0; i < train.size(); ++i) sims[i] = {dot(qv, train_vecs[i]), i};
    std::partial_sort(sims.begin(), sims.begin() + static_cast<std::ptrdiff_t>(result.k_used), sims.end(),
                      [](const auto& a, const auto& b) {
                        return a.first != b.first ? a.first > b.first : a.second < b.second;
                      });
    std::vector<std::size_t> votes(classes, 0);
    std::vector<double> weight(classes, 0.0);
    for (std::size_t j = 0; j < result.k_used; ++j) {
      const std::size_t c = train.class_id(sims[j].second);
      ++votes[c];
      weight[c] += sims[j].first;
    }
    std::size_t best = 0;
    for (std::size_t c = 1; c < classes; ++c) {
      if (votes[c] > votes[best] || (votes[c] == votes[best] && weight[c] > weight[best])) best = c;
    }
    result.predictions.push_back(best);
    truth.push_back(test.class_id(q));
  }
  result.report = metrics_from_predictions(classes, truth, result.predictions);
  return result;
}

// ---- benchmark ------------------------------------------------------------

namespace {
std::string fingerprint_of(const CrnnConfig& config, const std::vector<std::size_t>& stream,
                           const LabeledCorpus& corpus) {
  CrnnConfig c = config;
  c.cell = CellKind::kGru;
  std::uint64_t h = Rng::mix(0x5eed);
  auto fold = [&h](std::uint64_t v) { h = Rng::mix(h ^ v); };
  fold(std::hash<std::string>{}(std::to_string(c.filters) + "," + std::to_string(c.hidden) + "," +
                                std::to_string(c.window) + "," + std::to_string(c.pool) + "," +
                                std::to_string(c.length) + "," + std::to_string(c.num_classes) +
                                "," + std::to_string(c.alpha) + "," + std::to_string(c.seed)));
  for (auto i : stream) fold(std::hash<std::string>{}(corpus.text(i)) ^ (i << 1));
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}
}  // namespace

std::vector<BenchResult> bench_cells(const CrnnConfig& config, const LabeledCorpus& corpus,
                                     const std::vector<CellKind>& cells,
                                     const BenchOptions& options) {
  if (options.steps < 30) throw std::invalid_argument("bench_cells: need at least 30 timed steps");
  if (cells.empty()) throw std::invalid_argument("bench_cells: no cells selected");
  if (corpus.empty()) throw CorpusError("bench_cells: empty corpus");
  if (options.batch_size == 0) throw std::invalid_argument("bench_cells: batch size must be positive");

  const auto samples = encode_corpus(corpus, config.length);
  const std::size_t total = options.warmup + options.steps;

  // One batch-index stream, replayed for every cell.
  std::vector<std::vector<std::size_t>> batches(total);
  {
    Rng rng = Rng(options.seed).split("bench-batches");
    for (auto& b : batches)
      for (std::size_t i = 0; i < options.batch_size; ++i) b.push_back(rng.index(samples.size()));
  }

  struct Runner {
    CrnnConfig config;
    CrnnParams params;
    std::vector<ParamBlock> blocks;
    AdamState adam;
    std::vector<std::size_t> consumed;
    std::vector<double> times_ms;
  };
  std::vector<Runner> runners;
  for (auto kind : cells) {
    CrnnConfig c = config;
    c.cell = kind;
    c.validate();
    Runner r{c, CrnnParams::init(c), {}, AdamState(AdamOptions{options.lr}), {}, {}};
    r.blocks = r.params.named_parameters();
    runners.push_back(std::move(r));
  }

  std::vector<Sample> batch;
  for (std::size_t s = 0; s < total; ++s) {
    batch.clear();
    for (auto i : batches[s]) batch.push_back(samples[i]);
    for (auto& r : runners) {
      const auto start = std::chrono::steady_clock::now();
      for (auto& b : r.blocks) b.tensor.zero_grad();
      {
        Tape tape;
        const Tensor l = loss(tape, r.config, r.params, batch);
        tape.backward(l);
      }
      clip_global_norm(r.blocks, options.clip);
      r.adam.step(r.blocks);
      const auto stop = std::chrono::steady_clock::now();
      r.consumed.insert(r.consumed.end(), batches[s].begin(), batches[s].end());
      if (s >= options.warmup) {
        r.times_ms.push_back(std::chrono::duration<double, std::milli>(stop - start).count());
      }
    }
  }

  std::vector<BenchResult> out;
  for (auto& r : runners) {
    BenchResult b;
    b.cell = r.config.cell;
    b.steps = r.times_ms.size();
    b.mean_ms = std::accumulate(r.times_ms.begin(), r.times_ms.end(), 0.0) / static_cast<double>(b.steps);
    double var = 0.0;
    for (double t : r.times_ms) var += (t - b.mean_ms) * (t - b.mean_ms);
    b.std_ms = std::sqrt(var / static_cast<double>(b.steps));
    b.median_ms = median(r.times_ms);
    b.param_count = param_count(b.cell, r.config.filters, r.config.hidden);
    b.fingerprint = fingerprint_of(r.config, r.consumed, corpus);
    out.push_back(std::move(b));
  }
  return out;
}

std::string bench_csv(const std::vector<BenchResult>& results) {
  std::ostringstream os;
  os << "cell,mean_ms,median_ms,std_ms,steps\n" << std::fixed << std::setprecision(4);
  for (const auto& r : results) {
    os << to_string(r.cell) << ',' << r.mean_ms << ',' << r.median_ms << ',' << r.std_ms << ','
       << r.steps << '\n';
  }
  return os.str();
}

}  // namespace crnn
