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

#include "crnn/checkpoint.hpp"

#include "crnn/key_value.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

namespace crnn {

std::string config_to_text(const CrnnConfig& c) {
  char alpha[64];
  std::snprintf(alpha, sizeof alpha, "%a", c.alpha);
  std::ostringstream os;
  os << "filters=" << c.filters << '\n'
     << "hidden=" << c.hidden << '\n'
     << "window=" << c.window << '\n'
     << "pool=" << c.pool << '\n'
     << "length=" << c.length << '\n'
     << "classes=" << c.num_classes << '\n'
     << "alpha=" << alpha << '\n'
     << "cell=" << to_string(c.cell) << '\n'
     << "seed=" << c.seed << '\n';
  return os.str();
}

CrnnConfig config_from_text(std::string_view text) {
  CrnnConfig c;
  for (const auto& [key, value] : parse_key_values(text)) {
    if (key == "filters") c.filters = parse_unsigned(key, value);
    else if (key == "hidden") c.hidden = parse_unsigned(key, value);
    else if (key == "window") c.window = parse_unsigned(key, value);
    else if (key == "pool") c.pool = parse_unsigned(key, value);
    else if (key == "length") c.length = parse_unsigned(key, value);
    else if (key == "classes") c.num_classes = parse_unsigned(key, value);
    else if (key == "alpha") c.alpha = parse_double(key, value);
    else if (key == "cell") c.cell = parse_cell_kind(value);
    else if (key == "seed") c.seed = parse_unsigned(key, value);
    else throw ConfigError("unknown model config key '" + key + "'");
  }
  return c;
}

namespace {

class Writer {
 public:
  explicit Writer(const std::string& path) : out_(path, std::ios::binary) {
    if (!out_) throw CheckpointError("cannot open checkpoint for writing: " + path);
  }
  void bytes(const void* p, std::size_t n) { out_.write(static_cast<const char*>(p), static_cast<std::streamsize>(n)); }
  void u32(std::uint32_t v) { le(v, 4); }
  void u64(std::uint64_t v) { le(v, 8); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void str(const std::string& s) { bytes(s.data(), s.size()); }
  void finish(const std::string& path) {
    out_.flush();
    if (!out_) throw CheckpointError("failed writing checkpoint: " + path);
  }

 private:
  void le(std::uint64_t v, int n) {
    char buf[8];
    for (int i = 0; i < n; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    bytes(buf, static_cast<std::size_t>(n));
  }
  std::ofstream out_;
};

class Reader {
 public:
  explicit Reader(std::string data) : data_(std::move(data)) {}
  void bytes(void* p, std::size_t n) {
    if (n > data_.size() - pos_) throw CorruptCheckpointError("checkpoint truncated");
    std::memcpy(p, data_.data() + pos_, n);
    pos_ += n;
  }
  std::uint64_t le(int n) {
    unsigned char buf[8];
    bytes(buf, static_cast<std::size_t>(n));
    std::uint64_t v = 0;
    for (int i = n - 1; i >= 0; --i) v = (v << 8) | buf[i];
    return v;
  }
  std::uint32_t u32() { return static_cast<std::uint32_t>(le(4)); }
  std::uint64_t u64() { return le(8); }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string str(std::size_t n) {
    if (n > data_.size() - pos_) throw CorruptCheckpointError("checkpoint truncated");
    std::string s = data_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  bool at_end() const { return pos_ == data_.size(); }

 private:
  std::string data_;
  std::size_t pos_ = 0;
};

}  // namespace

void save_checkpoint(const CrnnConfig& config, const CrnnParams& params, const std::string& path,
                     const std::vector<std::string>& labels) {
  if (!labels.empty() && labels.size() != config.num_classes) {
    throw CheckpointError("checkpoint: " + std::to_string(labels.size()) + " label names for " +
                          std::to_string(config.num_classes) + " classes");
  }
  Writer w(path);
  w.bytes(kCheckpointMagic, 5);
  w.u32(kCheckpointVersion);
  std::string text = config_to_text(config);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    text += "label." + std::to_string(i) + "=" + labels[i] + "\n";
  }
  w.u64(text.size());
  w.str(text);
  const auto blocks = params.named_parameters();
  w.u32(static_cast<std::uint32_t>(blocks.size()));
  for (const auto& b : blocks) {
    w.u32(static_cast<std::uint32_t>(b.name.size()));
    w.str(b.name);
    const Shape& s = b.tensor.shape();
    w.u32(static_cast<std::uint32_t>(s.rank()));
    for (auto d : s.dims()) w.u64(d);
    for (double v : b.tensor.values()) w.f64(v);
  }
  w.finish(path);
}

Checkpoint load_checkpoint(const std::string& path, const std::optional<CrnnConfig>& expected) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open checkpoint: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  Reader r(ss.str());

  char magic[5];
  r.bytes(magic, 5);
  if (std::memcmp(magic, kCheckpointMagic, 5) != 0) {
    throw CorruptCheckpointError("not a checkpoint (bad magic): " + path);
  }
  const std::uint32_t version = r.u32();
  if (version != kCheckpointVersion) {
    throw CheckpointVersionError("checkpoint version " + std::to_string(version) +
                                 " unsupported (expected " + std::to_string(kCheckpointVersion) + ")");
  }
  const std::uint64_t text_len = r.u64();
  CrnnConfig stored;
  std::vector<std::string> labels;
  try {
    std::string model_text;
    std::map<std::size_t, std::string> named;
    for (const auto& [key, value] : parse_key_values(r.str(text_len))) {
      if (key.rfind("label.", 0) == 0) {
        named[parse_unsigned(key, key.substr(6))] = value;
      } else {
        model_text += key + "=" + value + "\n";
      }
    }
    stored = config_from_text(model_text);
    stored.validate();
    if (!named.empty()) {
      if (named.size() != stored.num_classes || named.rbegin()->first + 1 != named.size()) {
        throw CorruptCheckpointError("checkpoint label names do not cover every class");
      }
      for (auto& entry : named) labels.push_back(entry.second);
    }
  } catch (const CheckpointError&) {
    throw;
  } catch (const std::exception& e) {
    throw CorruptCheckpointError(std::string("checkpoint config unreadable: ") + e.what());
  }

  Checkpoint ck{expected.value_or(stored), {}, std::move(labels)};
  ck.params = CrnnParams::init(ck.config);
  auto blocks = ck.params.named_parameters();
  const std::uint32_t count = r.u32();
  if (count != blocks.size()) {
    throw CheckpointShapeError("checkpoint holds " + std::to_string(count) + " blocks, model needs " +
                               std::to_string(blocks.size()));
  }
  for (auto& b : blocks) {
    const std::string name = r.str(r.u32());
    if (name != b.name) {
      throw CheckpointShapeError("checkpoint block '" + name + "' where '" + b.name + "' expected");
    }
    const std::uint32_t rank = r.u32();
    if (rank == 0 || rank > Shape::kMaxRank) throw CorruptCheckpointError("bad rank in block " + name);
    std::vector<std::size_t> dims(rank);
    for (auto& d : dims) {
      d = static_cast<std::size_t>(r.u64());
      if (d == 0) throw CorruptCheckpointError("zero dimension in block " + name);
    }
    const Shape shape(std::span<const std::size_t>(dims.data(), dims.size()));
    if (shape != b.tensor.shape()) {
      throw CheckpointShapeError("block " + name + " has shape " + shape.str() + ", model expects " +
                                 b.tensor.shape().str());
    }
    auto values = b.tensor.mutable_values();
    for (auto& v : values) v = r.f64();
  }
  if (!r.at_end()) throw CorruptCheckpointError("trailing bytes after checkpoint data");
  return ck;
}

}  // namespace crnn
