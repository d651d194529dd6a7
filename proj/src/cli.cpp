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

#include "crnn/cli.hpp"

#include "crnn/checkpoint.hpp"
#include "crnn/evaluation.hpp"
#include "crnn/key_value.hpp"
#include "crnn/model_check.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

namespace crnn {

namespace fs = std::filesystem;

namespace {

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::size_t as_size(const std::string& key, const std::string& value) {
  return static_cast<std::size_t>(parse_unsigned(key, value));
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(text);
  while (std::getline(is, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

const std::vector<std::string>& RunConfig::keys() {
  static const std::vector<std::string> k = {
      "filters", "hidden",     "window", "pool",  "length",     "classes",     "alpha",
      "cell",    "seed",       "steps",  "batch_size", "lr",   "beta1",       "beta2",
      "epsilon", "clip",       "eval_every", "train_count", "test_count"};
  return k;
}

void RunConfig::set(const std::string& key, const std::string& value) {
  try {
    if (key == "filters") model.filters = as_size(key, value);
    else if (key == "hidden") model.hidden = as_size(key, value);
    else if (key == "window") model.window = as_size(key, value);
    else if (key == "pool") model.pool = as_size(key, value);
    else if (key == "length") model.length = as_size(key, value);
    else if (key == "classes") model.num_classes = as_size(key, value);
    else if (key == "alpha") model.alpha = parse_double(key, value);
    else if (key == "cell") model.cell = parse_cell_kind(value);
    else if (key == "seed") {
      const auto s = parse_unsigned(key, value);
      model.seed = train.seed = split.seed = s;
    }
    else if (key == "steps") train.steps = as_size(key, value);
    else if (key == "batch_size") train.batch_size = split.batch_size = as_size(key, value);
    else if (key == "lr") train.adam.lr = parse_double(key, value);
    else if (key == "beta1") train.adam.beta1 = parse_double(key, value);
    else if (key == "beta2") train.adam.beta2 = parse_double(key, value);
    else if (key == "epsilon") train.adam.epsilon = parse_double(key, value);
    else if (key == "clip") train.clip = parse_double(key, value);
    else if (key == "eval_every") train.eval_every = as_size(key, value);
    else if (key == "train_count") split.train_count = as_size(key, value);
    else if (key == "test_count") split.test_count = as_size(key, value);
    else throw ConfigError("unknown config key '" + key + "'");
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  given.insert(key);
}

std::string RunConfig::to_text() const {
  std::ostringstream os;
  os << "filters=" << model.filters << '\n'
     << "hidden=" << model.hidden << '\n'
     << "window=" << model.window << '\n'
     << "pool=" << model.pool << '\n'
     << "length=" << model.length << '\n'
     << "classes=" << model.num_classes << '\n'
     << "alpha=" << format_double(model.alpha) << '\n'
     << "cell=" << to_string(model.cell) << '\n'
     << "seed=" << model.seed << '\n'
     << "steps=" << train.steps << '\n'
     << "batch_size=" << train.batch_size << '\n'
     << "lr=" << format_double(train.adam.lr) << '\n'
     << "beta1=" << format_double(train.adam.beta1) << '\n'
     << "beta2=" << format_double(train.adam.beta2) << '\n'
     << "epsilon=" << format_double(train.adam.epsilon) << '\n'
     << "clip=" << format_double(train.clip) << '\n'
     << "eval_every=" << train.eval_every << '\n'
     << "train_count=" << split.train_count << '\n'
     << "test_count=" << split.test_count << '\n';
  return os.str();
}

RunConfig resolve_run_config(const std::string& config_path,
                             const std::vector<std::pair<std::string, std::string>>& overrides) {
  RunConfig run;
  run.train.batch_size = run.split.batch_size = TrainPlan{}.batch_size;
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) throw ConfigError("cannot open config file: " + config_path);
    std::stringstream ss;
    ss << in.rdbuf();
    try {
      for (const auto& [key, value] : parse_key_values(ss.str())) run.set(key, value);
    } catch (const std::exception& e) {
      throw ConfigError(config_path + ": " + e.what());
    }
  }
  for (const auto& [key, value] : overrides) run.set(key, value);
  return run;
}

void bind_to_corpus(RunConfig& run, const LabeledCorpus& corpus) {
  if (run.given.count("classes") && run.model.num_classes != corpus.num_classes()) {
    throw ConfigError("config says " + std::to_string(run.model.num_classes) +
                      " classes but corpus '" + corpus.name + "' has " +
                      std::to_string(corpus.num_classes()));
  }
  run.model.num_classes = corpus.num_classes();
  const bool counts_given = run.given.count("train_count") || run.given.count("test_count");
  if (!counts_given) {
    SplitPlan plan;
    bool standard = true;
    try {
      plan = standard_split(corpus.name, run.split.seed);
    } catch (const CorpusError&) {
      standard = false;
    }
    if (standard && plan.train_count + plan.test_count <= corpus.size()) {
      run.split.train_count = plan.train_count;
      run.split.test_count = plan.test_count;
      if (!run.given.count("batch_size")) {
        run.split.batch_size = run.train.batch_size = plan.batch_size;
      }
    } else {
      if (corpus.size() < 2) throw CorpusError("corpus '" + corpus.name + "' is too small to split");
      run.split.test_count = std::max<std::size_t>(1, corpus.size() / 10);
      run.split.train_count = corpus.size() - run.split.test_count;
    }
  }
}

namespace {

// ---- output helpers -------------------------------------------------------

enum class Format { kTable, kCsv };

void echo_config(std::ostream& out, const std::string& command, const std::string& text) {
  out << "# crnn " << command << " resolved config\n";
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) out << "# " << line << '\n';
  out << '\n';
}

void print_metrics(std::ostream& out, const MetricsReport& report,
                   const std::vector<std::string>& labels, Format format) {
  if (format == Format::kCsv) {
    out << metrics_csv(report, labels);
    return;
  }
  std::size_t width = 5;
  for (const auto& m : report.per_class) {
    if (m.class_id < labels.size()) width = std::max(width, labels[m.class_id].size());
  }
  out << std::left << std::setw(static_cast<int>(width)) << "class" << std::right << std::fixed
      << std::setprecision(4) << std::setw(11) << "precision" << std::setw(9) << "recall"
      << std::setw(9) << "f1" << '\n';
  auto row = [&](const std::string& name, double p, double r, double f) {
    out << std::left << std::setw(static_cast<int>(width)) << name << std::right << std::setw(11)
        << p << std::setw(9) << r << std::setw(9) << f << '\n';
  };
  for (const auto& m : report.per_class) {
    row(m.class_id < labels.size() ? labels[m.class_id] : std::to_string(m.class_id), m.precision,
        m.recall, m.f1);
  }
  row("macro", report.macro_precision, report.macro_recall, report.macro_f1);
}

// ---- commands ---------------------------------------------------------------

struct Shared {
  std::string config_path;
  std::string out_dir = ".";
  std::string format = "table";
  std::map<std::string, std::string> flag_values;  // config key -> flag text
  std::vector<std::pair<std::string, std::string>> overrides;

  Format fmt() const { return format == "csv" ? Format::kCsv : Format::kTable; }
};

void add_shared(CLI::App* cmd, Shared& s) {
  cmd->add_option("--config", s.config_path, "key=value config file");
  cmd->add_option("--out-dir", s.out_dir, "directory for written artifacts");
  cmd->add_option("--format", s.format, "output format")->check(CLI::IsMember({"table", "csv"}));
  for (const auto& key : RunConfig::keys()) {
    std::string flag = "--" + key;
    for (auto& c : flag)
      if (c == '_') c = '-';
    cmd->add_option(flag, s.flag_values[key], "config key " + key);
  }
}

RunConfig resolve(CLI::App* cmd, Shared& s) {
  for (const auto& key : RunConfig::keys()) {
    std::string flag = "--" + key;
    for (auto& c : flag)
      if (c == '_') c = '-';
    if (cmd->count(flag) > 0) s.overrides.emplace_back(key, s.flag_values[key]);
  }
  RunConfig run = resolve_run_config(s.config_path, s.overrides);
  run.train.validate();
  CrnnConfig probe = run.model;
  probe.num_classes = std::max<std::size_t>(probe.num_classes, 2);
  probe.validate();
  return run;
}

fs::path prepare_out_dir(const std::string& dir) {
  fs::path p(dir);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw std::invalid_argument("cannot create output directory " + dir + ": " + ec.message());
  return p;
}

int cmd_stats(const std::vector<std::string>& paths, bool remove_stopwords, Format format,
              std::ostream& out) {
  std::ostringstream cfg;
  cfg << "format=" << (format == Format::kCsv ? "csv" : "table") << '\n'
      << "remove_stopwords=" << (remove_stopwords ? "true" : "false") << '\n';
  for (const auto& p : paths) cfg << "corpus=" << p << '\n';
  echo_config(out, "stats", cfg.str());
  std::vector<CorpusStats> rows;
  StatsOptions options;
  options.remove_stopwords = remove_stopwords;
  for (const auto& p : paths) rows.push_back(stats(load_corpus(p), options));
  if (format == Format::kCsv) {
    out << stats_csv_header() << '\n';
    for (const auto& r : rows) out << stats_csv_row(r) << '\n';
  } else {
    out << stats_table(rows);
  }
  return kExitOk;
}

int cmd_convert(const std::string& kind, const std::vector<std::string>& inputs,
                const std::string& output, std::size_t records, std::uint64_t seed,
                std::ostream& out) {
  std::ostringstream cfg;
  cfg << "kind=" << kind << "\noutput=" << output << "\nseed=" << seed << '\n';
  for (const auto& i : inputs) cfg << "input=" << i << '\n';
  echo_config(out, "convert", cfg.str());
  auto need_one = [&]() -> const std::string& {
    if (inputs.size() != 1) throw std::invalid_argument(kind + " takes exactly one input directory");
    return inputs.front();
  };
  LabeledCorpus corpus;
  if (kind == "qc") {
    if (inputs.empty()) throw std::invalid_argument("qc needs at least one input file");
    corpus = convert_qc(inputs);
  } else if (kind == "brown") {
    corpus = convert_brown(need_one());
  } else if (kind == "newsgroups") {
    corpus = convert_newsgroups(need_one());
  } else if (kind == "synthetic-news") {
    corpus = synthetic_news(seed);
  } else if (kind == "motifs") {
    corpus = synthetic_motifs(records, seed);
  } else {
    throw std::invalid_argument("unknown converter '" + kind + "'");
  }
  save_corpus(corpus, output);
  out << "wrote " << corpus.size() << " records, " << corpus.num_classes() << " classes to "
      << output << '\n';
  return kExitOk;
}

std::pair<LabeledCorpus, LabeledCorpus> load_and_split(RunConfig& run, const std::string& path) {
  const LabeledCorpus corpus = load_corpus(path);
  bind_to_corpus(run, corpus);
  run.model.validate();
  return split(corpus, run.split);
}

int cmd_train(const std::string& corpus_path, RunConfig run, const Shared& s, std::ostream& out,
              std::ostream& err) {
  auto [train_set, test_set] = load_and_split(run, corpus_path);
  echo_config(out, "train", run.to_text() + "corpus=" + corpus_path + "\n");
  const fs::path dir = prepare_out_dir(s.out_dir);
  const fs::path trace_path = dir / "trace.csv";
  const fs::path model_path = dir / "model.ckpt";

  std::ofstream trace(trace_path);
  if (!trace) throw std::invalid_argument("cannot write " + trace_path.string());
  trace << trace_csv_header() << '\n';
  const TrainResult result =
      train(run.model, train_set, run.train, &test_set, [&](const TracePoint& p) {
        trace << trace_csv_row(p) << '\n';
        if (p.test_f1) {
          err << "step " << p.step << " loss " << p.loss << " test_f1 " << *p.test_f1 << '\n';
        }
      });
  trace.close();
  save_checkpoint(run.model, result.params, model_path.string(), train_set.label_names());

  out << "checkpoint=" << model_path.string() << "\ntrace=" << trace_path.string() << "\n\n";
  print_metrics(out, evaluate(run.model, result.params, test_set), train_set.label_names(), s.fmt());
  return kExitOk;
}

int cmd_eval(const std::string& checkpoint_path, const std::string& corpus_path, Format format,
             std::ostream& out) {
  Checkpoint ck = load_checkpoint(checkpoint_path);
  const LabeledCorpus corpus = load_corpus(corpus_path);
  echo_config(out, "eval", config_to_text(ck.config) + "checkpoint=" + checkpoint_path +
                               "\ncorpus=" + corpus_path + "\n");
  const std::size_t model_classes = ck.config.num_classes;
  auto mismatch = [&](const std::string& detail) {
    return ConfigError("class count mismatch: checkpoint has " + std::to_string(model_classes) +
                       " classes, corpus '" + corpus.name + "' has " +
                       std::to_string(corpus.num_classes()) + detail);
  };
  std::vector<Sample> samples;
  std::vector<std::string> labels = ck.labels;
  if (ck.labels.empty()) {
    if (corpus.num_classes() != model_classes) throw mismatch("");
    labels = corpus.label_names();
    samples = encode_corpus(corpus, ck.config.length);
  } else {
    if (corpus.num_classes() > model_classes) throw mismatch("");
    std::map<std::string, std::size_t> ids;
    for (std::size_t i = 0; i < ck.labels.size(); ++i) ids[ck.labels[i]] = i;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      auto it = ids.find(corpus.label(i));
      if (it == ids.end()) throw mismatch(" (label '" + corpus.label(i) + "' unknown to the model)");
      samples.push_back({encode(corpus.text(i), ck.config.length), it->second});
    }
  }
  print_metrics(out, evaluate(ck.config, ck.params, samples), labels, format);
  return kExitOk;
}

int cmd_sweep(const std::string& corpus_path, RunConfig run, const std::string& alphas_text,
              Format format, std::ostream& out) {
  std::vector<double> alphas = default_alpha_grid();
  if (!alphas_text.empty()) {
    alphas.clear();
    for (const auto& a : split_list(alphas_text)) {
      const double v = parse_double("alphas", a);
      if (v < 0.0 || v > 1.0) throw ConfigError("alpha " + a + " outside [0, 1]");
      alphas.push_back(v);
    }
    if (alphas.empty()) throw ConfigError("--alphas is empty");
  }
  auto [train_set, test_set] = load_and_split(run, corpus_path);
  std::string grid;
  for (double a : alphas) grid += (grid.empty() ? "" : ",") + format_double(a);
  echo_config(out, "sweep", run.to_text() + "alphas=" + grid + "\ncorpus=" + corpus_path + "\n");
  const auto rows = sweep_alpha(run.model, train_set, test_set, run.train, alphas);
  if (format == Format::kCsv) {
    out << "alpha,macro_precision,macro_recall,macro_f1\n" << std::fixed << std::setprecision(6);
    for (const auto& r : rows) {
      out << format_double(r.alpha) << ',' << r.report.macro_precision << ','
          << r.report.macro_recall << ',' << r.report.macro_f1 << '\n';
    }
  } else {
    out << "alpha  precision   recall       f1\n" << std::fixed << std::setprecision(4);
    for (const auto& r : rows) {
      out << std::left << std::setw(5) << format_double(r.alpha) << std::right << std::setw(11)
          << r.report.macro_precision << std::setw(9) << r.report.macro_recall << std::setw(9)
          << r.report.macro_f1 << '\n';
    }
  }
  return kExitOk;
}

int cmd_bench(const std::string& corpus_path, RunConfig run, const std::string& cells_text,
              std::size_t timed_steps, std::size_t warmup, Format format, std::ostream& out,
              std::ostream& err) {
  std::vector<CellKind> cells;
  for (const auto& c : split_list(cells_text)) cells.push_back(parse_cell_kind(c));
  if (cells.empty()) throw ConfigError("--cells is empty");
  const LabeledCorpus corpus = load_corpus(corpus_path);
  bind_to_corpus(run, corpus);
  run.model.validate();
  BenchOptions options;
  options.steps = timed_steps;
  options.warmup = warmup;
  options.batch_size = run.train.batch_size;
  options.lr = run.train.adam.lr;
  options.clip = run.train.clip;
  options.seed = run.model.seed;
  echo_config(out, "bench", run.to_text() + "cells=" + cells_text + "\ntimed_steps=" +
                                std::to_string(timed_steps) + "\nwarmup=" +
                                std::to_string(warmup) + "\ncorpus=" + corpus_path + "\n");
  const auto results = bench_cells(run.model, corpus, cells, options);
  if (format == Format::kCsv) {
    out << bench_csv(results);
  } else {
    out << "cell  param_count    mean_ms  median_ms     std_ms  steps\n" << std::fixed
        << std::setprecision(3);
    for (const auto& r : results) {
      out << std::left << std::setw(4) << to_string(r.cell) << std::right << std::setw(13)
          << r.param_count << std::setw(11) << r.mean_ms << std::setw(11) << r.median_ms
          << std::setw(11) << r.std_ms << std::setw(7) << r.steps << '\n';
    }
  }
  for (const auto& r : results) {
    if (r.fingerprint != results.front().fingerprint) {
      err << "bench: data streams differ between cells\n";
      return kExitCheckFailed;
    }
  }
  return kExitOk;
}

int cmd_gradcheck(const RunConfig& run, const std::string& cells_text, std::size_t seeds,
                  double tolerance, double step, Format format, std::ostream& out) {
  std::vector<CellKind> cells;
  for (const auto& c : split_list(cells_text)) cells.push_back(parse_cell_kind(c));
  if (cells.empty()) throw ConfigError("--cells is empty");
  if (seeds == 0) throw ConfigError("--seeds must be at least 1");
  echo_config(out, "gradcheck", config_to_text(small_check_config(cells.front())) +
                                    "cells=" + cells_text + "\nseeds=" + std::to_string(seeds) +
                                    "\nfirst_seed=" + std::to_string(run.model.seed) +
                                    "\ntol=" + format_double(tolerance) +
                                    "\nstep=" + format_double(step) + "\n");
  GradCheckOptions options;
  options.tolerance = tolerance;
  options.step = step;
  bool all_passed = true;
  if (format == Format::kCsv) out << "cell,seed,max_rel_error,checked,skipped,status\n";
  for (auto cell : cells) {
    for (std::size_t i = 0; i < seeds; ++i) {
      const std::uint64_t seed = run.model.seed + i;
      const auto report = check_model_gradients(small_check_config(cell), seed, options);
      all_passed = all_passed && report.passed();
      const char* status = report.passed() ? "PASS" : "FAIL";
      const std::size_t checked = report.elements() - report.skipped();
      if (format == Format::kCsv) {
        out << to_string(cell) << ',' << seed << ',' << std::scientific << std::setprecision(3)
            << report.max_rel_error() << ',' << checked << ',' << report.skipped() << ','
            << status << '\n';
      } else {
        out << to_string(cell) << " seed " << seed << ": max rel error " << std::scientific
            << std::setprecision(3) << report.max_rel_error() << " over " << checked
            << " elements (" << report.skipped() << " at kinks) " << status << '\n';
      }
    }
  }
  out << (all_passed ? "gradcheck passed" : "gradcheck FAILED") << '\n';
  return all_passed ? kExitOk : kExitCheckFailed;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Character-level convolutional-recurrent text classifier"};
  app.require_subcommand(1);

  std::vector<std::string> stats_paths;
  bool stats_stopwords = false;
  std::string stats_format = "table";
  auto* stats_cmd = app.add_subcommand("stats", "corpus summary statistics");
  stats_cmd->add_option("corpus", stats_paths, "TSV corpus files")->required();
  stats_cmd->add_flag("--remove-stopwords", stats_stopwords, "drop bundled stopwords first");
  stats_cmd->add_option("--format", stats_format, "output format")
      ->check(CLI::IsMember({"table", "csv"}));

  std::string conv_kind, conv_output;
  std::vector<std::string> conv_inputs;
  std::size_t conv_records = 20;
  std::uint64_t conv_seed = 0;
  auto* convert_cmd = app.add_subcommand("convert", "convert a native corpus to TSV");
  convert_cmd->add_option("kind", conv_kind, "qc | brown | newsgroups | synthetic-news | motifs")
      ->required();
  convert_cmd->add_option("inputs", conv_inputs, "input files or directory");
  convert_cmd->add_option("--out", conv_output, "output TSV path")->required();
  convert_cmd->add_option("--records", conv_records, "record count for motifs");
  convert_cmd->add_option("--seed", conv_seed, "seed for synthetic corpora");

  Shared train_shared;
  std::string train_corpus;
  auto* train_cmd = app.add_subcommand("train", "train a model and write a checkpoint");
  train_cmd->add_option("corpus", train_corpus, "TSV corpus")->required();
  add_shared(train_cmd, train_shared);

  std::string eval_checkpoint, eval_corpus, eval_format = "csv";
  auto* eval_cmd = app.add_subcommand("eval", "evaluate a checkpoint on a corpus");
  eval_cmd->add_option("checkpoint", eval_checkpoint, "checkpoint file")->required();
  eval_cmd->add_option("corpus", eval_corpus, "TSV corpus")->required();
  eval_cmd->add_option("--format", eval_format, "output format")
      ->check(CLI::IsMember({"table", "csv"}));

  Shared sweep_shared;
  std::string sweep_corpus, sweep_alphas;
  auto* sweep_cmd = app.add_subcommand("sweep", "train one model per aggregation weight");
  sweep_cmd->add_option("corpus", sweep_corpus, "TSV corpus")->required();
  sweep_cmd->add_option("--alphas", sweep_alphas, "comma-separated weights (default 0.9..0.1)");
  add_shared(sweep_cmd, sweep_shared);

  Shared bench_shared;
  std::string bench_corpus, bench_cells_text = "lstm,gru,mgu";
  std::size_t bench_steps = 30, bench_warmup = 3;
  auto* bench_cmd = app.add_subcommand("bench", "time training steps per recurrent cell");
  bench_cmd->add_option("corpus", bench_corpus, "TSV corpus")->required();
  bench_cmd->add_option("--cells", bench_cells_text, "comma-separated cells");
  bench_cmd->add_option("--timed-steps", bench_steps, "timed steps per cell (>= 30)");
  bench_cmd->add_option("--warmup", bench_warmup, "untimed warmup steps");
  add_shared(bench_cmd, bench_shared);

  Shared gc_shared;
  std::string gc_cells = "lstm,gru,mgu";
  std::size_t gc_seeds = 5;
  double gc_tol = 1e-4, gc_step = 1e-4;
  auto* gc_cmd = app.add_subcommand("gradcheck", "finite-difference check of the full model");
  gc_cmd->add_option("--cells", gc_cells, "comma-separated cells");
  gc_cmd->add_option("--seeds", gc_seeds, "number of random check points per cell");
  gc_cmd->add_option("--tol", gc_tol, "maximum relative error");
  gc_cmd->add_option("--step", gc_step, "finite-difference step");
  add_shared(gc_cmd, gc_shared);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*stats_cmd) {
      return cmd_stats(stats_paths, stats_stopwords,
                       stats_format == "csv" ? Format::kCsv : Format::kTable, out);
    }
    if (*convert_cmd) {
      return cmd_convert(conv_kind, conv_inputs, conv_output, conv_records, conv_seed, out);
    }
    if (*train_cmd) {
      return cmd_train(train_corpus, resolve(train_cmd, train_shared), train_shared, out, err);
    }
    if (*eval_cmd) {
      return cmd_eval(eval_checkpoint, eval_corpus,
                      eval_format == "csv" ? Format::kCsv : Format::kTable, out);
    }
    if (*sweep_cmd) {
      return cmd_sweep(sweep_corpus, resolve(sweep_cmd, sweep_shared), sweep_alphas,
                       sweep_shared.fmt(), out);
    }
    if (*bench_cmd) {
      return cmd_bench(bench_corpus, resolve(bench_cmd, bench_shared), bench_cells_text,
                       bench_steps, bench_warmup, bench_shared.fmt(), out, err);
    }
    if (*gc_cmd) {
      return cmd_gradcheck(resolve(gc_cmd, gc_shared), gc_cells, gc_seeds, gc_tol, gc_step,
                           gc_shared.fmt(), out);
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const CorpusError& e) {
    err << "corpus error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const CheckpointError& e) {
    err << "checkpoint error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::out_of_range& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "failed: " << e.what() << '\n';
    return kExitCheckFailed;
  }
  return kExitUsage;
}

}  // namespace crnn
