#pragma once

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "prosupmine/bench.hpp"
#include "prosupmine/core_model.hpp"
#include "prosupmine/dataio.hpp"
#include "prosupmine/oracle.hpp"
#include "prosupmine/pstree.hpp"

namespace prosupmine::cli {

enum ExitCode : int { kOk = 0, kIoError = 1, kUsage = 2, kMismatch = 3, kGuard = 4 };

inline constexpr const char* kMaxElementEnv = "PROSUPMINE_MAX_ELEMENT";

/// Event lines arriving one at a time. A batch is released as soon as a line
/// with a later tick shows up, so output can follow input progressively.
class EventReader {
 public:
  explicit EventReader(std::istream& in) : in_(in) {}

  std::optional<TickBatch> next() {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      if (line.empty() || line == "\r" || line.front() == '#') continue;
      Event ev = dataio::parse_event_line(line, line_no_);
      if (pending_ && ev.ts < pending_->ts) throw dataio::OutOfOrderError(line_no_, ev.ts, pending_->ts);
      if (pending_ && ev.ts > pending_->ts) {
        auto ready = std::move(*pending_);
        pending_ = TickBatch{ev.ts, {}};
        add(ev);
        return ready;
      }
      if (!pending_) pending_ = TickBatch{ev.ts, {}};
      add(ev);
    }
    if (in_.bad()) throw dataio::IoError("read failure at line " + std::to_string(line_no_ + 1));
    auto last = std::move(pending_);
    pending_.reset();
    return last;
  }

 private:
  void add(const Event& ev) {
    auto [it, inserted] = pending_->elements.try_emplace(ev.seq_id, ev.element);
    if (!inserted) it->second = merge_labels(it->second, ev.element);
  }

  std::istream& in_;
  std::optional<TickBatch> pending_;
  std::size_t line_no_ = 0;
};

struct MinerFlags {
  Timestamp poi = 3;
  std::string minsup = "0.5";
  bool boolean = false;
  std::size_t max_element = 12;
  bool max_element_set = false;

  MinerConfig resolve() const {
    MinerConfig c;
    c.poi = poi;
    if (poi < 1) throw ConfigError("poi must be >= 1");
    c.minsup = SupportRatio::parse(minsup);
    c.mode = boolean ? Mode::Boolean : Mode::SupportCoupled;
    c.max_element_size = max_element;
    if (!max_element_set) {
      if (const char* env = std::getenv(kMaxElementEnv); env && *env) {
        std::size_t v = 0;
        if (!dataio::detail::parse_uint(std::string_view(env), v) || v < 1)
          throw ConfigError(std::string(kMaxElementEnv) + " must be an integer >= 1");
        c.max_element_size = v;
      }
    }
    c.validate();
    return c;
  }
};

namespace detail {

inline void add_miner_flags(CLI::App& cmd, MinerFlags& f) {
  cmd.add_option("--poi", f.poi, "Period of interest in ticks")->capture_default_str();
  cmd.add_option("--minsup", f.minsup, "Minimum support ratio in (0,1]")->capture_default_str();
  cmd.add_flag("--boolean", f.boolean, "Ignore item quantities");
  cmd.add_option_function<std::size_t>(
         "--max-element", [&f](std::size_t v) { f.max_element = v; f.max_element_set = true; },
         "Largest element size accepted (overrides PROSUPMINE_MAX_ELEMENT)");
}

/// Opens `path` for reading, or hands back `fallback` for "-".
struct Input {
  std::istream* stream = nullptr;
  std::unique_ptr<std::ifstream> file;

  Input(const std::string& path, std::istream& fallback) {
    if (path == "-") {
      stream = &fallback;
    } else {
      file = std::make_unique<std::ifstream>(path, std::ios::binary);
      if (!*file) throw dataio::IoError("cannot open '" + path + "'");
      stream = file.get();
    }
  }
};

struct Output {
  std::ostream* stream = nullptr;
  std::unique_ptr<std::ofstream> file;

  Output(const std::string& path, std::ostream& fallback) {
    if (path.empty() || path == "-") {
      stream = &fallback;
    } else {
      file = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file) throw dataio::IoError("cannot write '" + path + "'");
      stream = file.get();
    }
  }
};

inline dataio::ReportFormat parse_format(const std::string& f) {
  if (f == "text") return dataio::ReportFormat::Text;
  if (f == "csv") return dataio::ReportFormat::Csv;
  if (f == "json" || f == "jsonl" || f == "json-lines") return dataio::ReportFormat::JsonLines;
  throw ConfigError("unknown format '" + f + "' (text, csv, json-lines)");
}

template <typename T>
std::vector<T> split_list(const std::string& text, T (*parse)(const std::string&)) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ','))
    if (!tok.empty()) out.push_back(parse(tok));
  if (out.empty()) throw ConfigError("empty list '" + text + "'");
  return out;
}

inline Timestamp parse_poi(const std::string& s) {
  Timestamp v = 0;
  if (!dataio::detail::parse_uint(std::string_view(s), v) || v < 1) throw ConfigError("poi must be an integer >= 1, got '" + s + "'");
  return v;
}

inline SupportRatio parse_minsup(const std::string& s) { return SupportRatio::parse(s); }

inline Mode parse_mode(const std::string& s) {
  if (s == "boolean") return Mode::Boolean;
  if (s == "support-coupled" || s == "coupled") return Mode::SupportCoupled;
  throw ConfigError("unknown mode '" + s + "' (boolean, support-coupled)");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

struct MineOptions {
  std::string input = "-";
  std::string output = "-";
  std::string format = "text";
  bool strict = false;
  MinerFlags miner;
};

inline int cmd_mine(const MineOptions& opt, std::istream& in, std::ostream& out) {
  const MinerConfig config = opt.miner.resolve();
  const auto format = detail::parse_format(opt.format);
  detail::Output sink(opt.output, out);
  std::ostream& os = *sink.stream;
  ProgressiveTree tree(config);
  bool header = true;
  const auto emit = [&](const TickBatch& batch) {
    os << dataio::write_report(tree.process_timestamp(batch), format, header);
    header = false;
    os.flush();
  };

  if (opt.input == "-") {
    EventReader reader(in);
    while (auto batch = reader.next()) emit(*batch);
  } else {
    for (const auto& batch : dataio::load_stream(opt.input, {opt.strict})) emit(batch);
  }
  if (header && format == dataio::ReportFormat::Csv) os << dataio::kCsvHeader << '\n';
  if (!os) throw dataio::IoError("write failure");
  return kOk;
}

struct VerifyOptions {
  std::string input = "-";
  std::size_t bound = oracle::Options{}.max_enumeration;
  MinerFlags miner;
};

inline int cmd_verify(const VerifyOptions& opt, std::istream& in, std::ostream& out, std::ostream& err) {
  const MinerConfig config = opt.miner.resolve();
  detail::Input source(opt.input, in);
  const auto batches = dataio::load_stream(*source.stream);
  const auto events = dataio::flatten(batches);
  ProgressiveTree tree(config);
  oracle::Options oopt;
  oopt.max_enumeration = opt.bound;
  for (const auto& batch : batches) {
    const auto mined = tree.process_timestamp(batch);
    const auto expected = oracle::mine_bruteforce(events, batch.ts, config.poi, config.minsup, config.mode, oopt);
    if (!(mined == expected)) {
      err << "mismatch at tick " << batch.ts << "\n"
          << "tree:   " << dataio::write_report(mined, dataio::ReportFormat::JsonLines)
          << "oracle: " << dataio::write_report(expected, dataio::ReportFormat::JsonLines);
      return kMismatch;
    }
  }
  out << "verified " << batches.size() << " ticks, " << events.size() << " events\n";
  return kOk;
}

struct GenerateOptions {
  dataio::GeneratorParams params;
  std::string output = "-";
};

inline int cmd_generate(const GenerateOptions& opt, std::ostream& out, std::ostream& err) {
  const auto batches = dataio::generate_stream(opt.params);
  detail::Output sink(opt.output, out);
  dataio::write_stream(*sink.stream, batches);
  sink.stream->flush();
  if (!*sink.stream) throw dataio::IoError("write failure");
  (sink.file ? out : err) << "events: " << dataio::event_count(batches) << "\n";
  return kOk;
}

/// Pinned default workload for `bench` without --input.
inline dataio::GeneratorParams default_bench_workload() {
  dataio::GeneratorParams p;
  p.n_sequences = 200;
  p.n_items = 50;
  p.n_ticks = 200;
  p.arrival_prob = 0.1;
  p.element_size_max = 2;
  p.qty_max = 3;
  p.seed = 42;
  return p;
}

struct BenchOptions {
  std::string input;
  dataio::GeneratorParams params = default_bench_workload();
  std::string poi_values = "5,10,20,40";
  std::string minsup_values = "0.05,0.1,0.25";
  std::string modes = "boolean,support-coupled";
  std::size_t repetitions = 3;
  std::string out_dir = "bench_out";
  MinerFlags miner;
};

inline int cmd_bench(const BenchOptions& opt, std::ostream& out, std::ostream& err) {
  bench::SweepSpec spec;
  spec.stream = opt.input.empty() ? dataio::generate_stream(opt.params) : dataio::load_stream(opt.input);
  spec.poi_values = detail::split_list<Timestamp>(opt.poi_values, detail::parse_poi);
  spec.minsup_values = detail::split_list<SupportRatio>(opt.minsup_values, detail::parse_minsup);
  spec.modes = detail::split_list<Mode>(opt.modes, detail::parse_mode);
  spec.repetitions = opt.repetitions;
  spec.max_element_size = opt.miner.resolve().max_element_size;
  const auto result = bench::run_sweep(spec);
  bench::write_outputs(opt.out_dir, result.rows);
  out << bench::sweep_csv(result.rows);
  for (const auto& v : result.violations)
    err << (v.kind == bench::Violation::Kind::MinsupAntitonicity ? "antitonicity" : "mode-inequality")
        << " violation: poi " << v.poi << " tick " << v.tick << ": " << v.detail << "\n";
  return result.violations.empty() ? kOk : kMismatch;
}

// ---------------------------------------------------------------------------
// Dispatch
// ---------------------------------------------------------------------------

inline int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Windowed support-coupled sequential pattern miner", "prosupmine"};
  app.require_subcommand(1);

  MineOptions mine;
  auto* mine_cmd = app.add_subcommand("mine", "Mine frequent patterns tick by tick");
  mine_cmd->add_option("input", mine.input, "Event file, or - for standard input")->capture_default_str();
  mine_cmd->add_option("--out", mine.output, "Report destination (default standard output)");
  mine_cmd->add_option("--format", mine.format, "text, csv or json-lines")->capture_default_str();
  mine_cmd->add_flag("--strict", mine.strict, "Reject decreasing ticks in file input");
  detail::add_miner_flags(*mine_cmd, mine.miner);

  VerifyOptions verify;
  auto* verify_cmd = app.add_subcommand("verify", "Check the tree against the brute-force miner");
  verify_cmd->add_option("input", verify.input, "Event file, or - for standard input")->capture_default_str();
  verify_cmd->add_option("--bound", verify.bound, "Oracle enumeration bound")->capture_default_str();
  detail::add_miner_flags(*verify_cmd, verify.miner);

  GenerateOptions gen;
  auto* gen_cmd = app.add_subcommand("generate", "Write a seeded synthetic event stream");
  auto add_gen_flags = [](CLI::App& cmd, dataio::GeneratorParams& p) {
    cmd.add_option("--seqs", p.n_sequences, "Number of sequences")->capture_default_str();
    cmd.add_option("--items", p.n_items, "Number of distinct items")->capture_default_str();
    cmd.add_option("--ticks", p.n_ticks, "Number of ticks")->capture_default_str();
    cmd.add_option("--arrival-prob", p.arrival_prob, "Probability a sequence emits at a tick")->capture_default_str();
    cmd.add_option("--element-size-max", p.element_size_max, "Largest element size")->capture_default_str();
    cmd.add_option("--qty-max", p.qty_max, "Largest item quantity")->capture_default_str();
    cmd.add_option("--seed", p.seed, "Random seed")->capture_default_str();
  };
  add_gen_flags(*gen_cmd, gen.params);
  gen_cmd->add_option("--out", gen.output, "Destination file (default standard output)");

  BenchOptions bench_opt;
  auto* bench_cmd = app.add_subcommand("bench", "Run a parameter sweep and write trend data");
  bench_cmd->add_option("--input", bench_opt.input, "Event file (default: generated workload)");
  add_gen_flags(*bench_cmd, bench_opt.params);
  bench_cmd->add_option("--poi", bench_opt.poi_values, "Comma-separated poi values")->capture_default_str();
  bench_cmd->add_option("--minsup", bench_opt.minsup_values, "Comma-separated minsup values")->capture_default_str();
  bench_cmd->add_option("--modes", bench_opt.modes, "Comma-separated modes")->capture_default_str();
  bench_cmd->add_option("--reps", bench_opt.repetitions, "Timed repetitions per cell")->capture_default_str();
  bench_cmd->add_option("--out", bench_opt.out_dir, "Output directory")->capture_default_str();
  bench_cmd->add_option_function<std::size_t>(
      "--max-element", [&](std::size_t v) { bench_opt.miner.max_element = v; bench_opt.miner.max_element_set = true; },
      "Largest element size accepted");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*mine_cmd) return cmd_mine(mine, in, out);
    if (*verify_cmd) return cmd_verify(verify, in, out, err);
    if (*gen_cmd) return cmd_generate(gen, out, err);
    if (*bench_cmd) return cmd_bench(bench_opt, out, err);
  } catch (const oracle::InstanceTooLarge& e) {
    err << "error: " << e.what() << "\n";
    return kGuard;
  } catch (const dataio::IoError& e) {
    err << "error: " << e.what() << "\n";
    return kIoError;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kIoError;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

inline int run_cli(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_cli(args, std::cin, std::cout, std::cerr);
}

}  // namespace prosupmine::cli
