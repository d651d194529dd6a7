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

// Macro precision/recall/F1, the k-nearest-neighbour bag-of-words baseline
// and the per-cell training-step benchmark.

#pragma once

#include "crnn/corpus.hpp"
#include "crnn/model.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace crnn {

struct ConfusionCounts {
  std::vector<std::size_t> true_positive;
  std::vector<std::size_t> false_positive;
  std::vector<std::size_t> false_negative;

  explicit ConfusionCounts(std::size_t classes = 0)
      : true_positive(classes), false_positive(classes), false_negative(classes) {}
  std::size_t classes() const { return true_positive.size(); }
  void add(std::size_t truth, std::size_t predicted);
};

struct ClassMetrics {
  std::size_t class_id = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct MetricsReport {
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
  std::vector<ClassMetrics> per_class;  // classes included in the macro mean
};

// Macro averages over classes with at least one true instance (TP + FN > 0).
MetricsReport metrics_from_counts(const ConfusionCounts& counts);
MetricsReport metrics_from_predictions(std::size_t classes, std::span<const std::size_t> truth,
                                       std::span<const std::size_t> predicted);

// `class,precision,recall,f1` rows followed by a `macro` row.
std::string metrics_csv(const MetricsReport& report, const std::vector<std::string>& label_names);

std::vector<Sample> encode_corpus(const LabeledCorpus& corpus, std::size_t length);

MetricsReport evaluate(const CrnnConfig& config, const CrnnParams& params,
                       const LabeledCorpus& test);
MetricsReport evaluate(const CrnnConfig& config, const CrnnParams& params,
                       std::span<const Sample> test);

// ---- KNN baseline ---------------------------------------------------------

enum class Representation { kBow, kTfidf };

struct KnnResult {
  MetricsReport report;
  std::vector<std::size_t> predictions;
  std::size_t k_used = 0;
  bool k_clamped = false;
};

// Cosine similarity over L2-normalised term-frequency (or tf * ln(N/df))
// vectors built from the training vocabulary. Majority vote over the k most
// similar training records; vote ties go to the larger summed similarity,
// then to the lowest class id.
KnnResult knn_baseline(const LabeledCorpus& train, const LabeledCorpus& test, std::size_t k,
                       Representation representation);

// ---- runtime benchmark ----------------------------------------------------

struct BenchOptions {
  std::size_t steps = 30;
  std::size_t warmup = 3;
  std::size_t batch_size = 8;
  double lr = 0.01;
  double clip = 5.0;
  std::uint64_t seed = 0;
};

struct BenchResult {
  CellKind cell = CellKind::kGru;
  double mean_ms = 0.0;
  double median_ms = 0.0;
  double std_ms = 0.0;
  std::size_t steps = 0;
  std::size_t param_count = 0;  // recurrent cell only
  std::string fingerprint;      // config (minus cell) and batch stream
};

// Times forward + backward + clip + Adam update per step. Cells take turns
// step by step over identical batch streams; warmup steps are discarded.
std::vector<BenchResult> bench_cells(const CrnnConfig& config, const LabeledCorpus& corpus,
                                     const std::vector<CellKind>& cells,
                                     const BenchOptions& options);

std::string bench_csv(const std::vector<BenchResult>& results);

}  // namespace crnn
