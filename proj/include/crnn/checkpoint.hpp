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

// Binary checkpoint container:
//   "CRNN1" | u32 version | u64 length + config text (key=value lines,
//   class names as label.<id>=<name>)
//   | u32 block count | per block: u32 name length, name, u32 rank,
//   u64 dims[rank], little-endian f64 values.
// Integers are little-endian.

#pragma once

#include "crnn/model.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace crnn {

inline constexpr char kCheckpointMagic[] = "CRNN1";
inline constexpr std::uint32_t kCheckpointVersion = 1;

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class CorruptCheckpointError : public CheckpointError {
 public:
  using CheckpointError::CheckpointError;
};
class CheckpointVersionError : public CheckpointError {
 public:
  using CheckpointError::CheckpointError;
};
class CheckpointShapeError : public CheckpointError {
 public:
  using CheckpointError::CheckpointError;
};

std::string config_to_text(const CrnnConfig& config);
CrnnConfig config_from_text(std::string_view text);

struct Checkpoint {
  CrnnConfig config;
  CrnnParams params;
  std::vector<std::string> labels;  // empty, or one name per class id
};

void save_checkpoint(const CrnnConfig& config, const CrnnParams& params, const std::string& path,
                     const std::vector<std::string>& labels = {});

// With `expected`, blocks must match the shapes `expected` implies.
Checkpoint load_checkpoint(const std::string& path,
                           const std::optional<CrnnConfig>& expected = std::nullopt);

}  // namespace crnn
