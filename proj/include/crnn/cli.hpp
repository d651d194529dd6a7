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

// Command-line front end: stats, convert, train, eval, sweep, bench and
// gradcheck. Exit codes: 0 success, 1 check failure, 2 usage or input error.

#pragma once

#include "crnn/corpus.hpp"
#include "crnn/model.hpp"
#include "crnn/training.hpp"

#include <iosfwd>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace crnn {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;

// Model, training and split settings as one key=value namespace.
struct RunConfig {
  CrnnConfig model;
  TrainPlan train;
  SplitPlan split;              // zero counts: derived from the corpus
  std::set<std::string> given;  // keys set by a file or a flag

  // Throws ConfigError for unknown keys or unparsable values.
  void set(const std::string& key, const std::string& value);
  // Every key, one per line.
  std::string to_text() const;
  static const std::vector<std::string>& keys();
};

// File values first, then overrides in order.
RunConfig resolve_run_config(const std::string& config_path,
                             const std::vector<std::pair<std::string, std::string>>& overrides);

// Fills the class count, split counts and (unless given) batch size from the
// corpus: named standard plans for qc, brown, twenty and google, otherwise a
// 90/10 split.
void bind_to_corpus(RunConfig& run, const LabeledCorpus& corpus);

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace crnn
