#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "prosupmine/core_model.hpp"
#include "prosupmine/dataio.hpp"
#include "prosupmine/pstree.hpp"

namespace prosupmine::bench {

struct SweepSpec {
  std::vector<TickBatch> stream;
  std::vector<Timestamp> poi_values;
  std::vector<SupportRatio> minsup_values;
  std::vector<Mode> modes;
  std::size_t repetitions = 3;
  std::size_t max_element_size = 12;

  void validate() const {
    if (poi_values.empty() || minsup_values.empty() || modes.empty())
      throw ConfigError("sweep needs at least one poi, minsup and mode");
    if (repetitions < 1) throw ConfigError("repetitions must be >= 1");
    for (auto w : poi_values)
      if (w < 1) throw ConfigError("poi must be >= 1");
  }
};

struct SweepRow {
  Timestamp poi = 0;
  SupportRatio minsup;
  Mode mode = Mode::SupportCoupled;
  std::size_t total_patterns = 0;
  /// Median over repetitions; the column keeps its historical name.
  std::int64_t mean_exec_time_ns = 0;
  std::size_t peak_node_count = 0;
};

struct Violation {
  enum class Kind { MinsupAntitonicity, ModeInequality } kind;
  Timestamp poi = 0;
  Timestamp tick = 0;
  std::string detail;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::vector<Violation> violations;
  /// Patterns per tick for each row, same order as `rows`.
  std::vector<std::vector<std::size_t>> per_tick_counts;
};

namespace detail {

struct CellTrace {
  std::vector<Timestamp> ticks;
  std::vector<std::vector<std::string>> skeletons;  // sorted, per tick
  std::size_t total = 0;
  std::size_t peak_nodes = 0;
};

inline std::string skeleton_key(const Skeleton& s) {
  std::string out;
  for (const auto& set : s) {
    out += '(';
    for (std::size_t i = 0; i < set.size(); ++i) {
      if (i) out += '|';
      out += set[i];
    }
    out += ')';
  }
  return out;
}

inline CellTrace trace_cell(std::span<const TickBatch> stream, const MinerConfig& config) {
  ProgressiveTree tree(config);
  CellTrace trace;
  for (const auto& batch : stream) {
    const auto report = tree.process_timestamp(batch);
    trace.ticks.push_back(report.ts);
    std::vector<std::string> keys;
    keys.reserve(report.patterns.size());
    for (const auto& p : report.patterns) keys.push_back(skeleton_key(p.skeleton));
    std::sort(keys.begin(), keys.end());
    trace.total += keys.size();
    trace.skeletons.push_back(std::move(keys));
    trace.peak_nodes = std::max(trace.peak_nodes, tree.stats().node_count);
  }
  return trace;
}

inline volatile std::size_t pattern_sink = 0;

/// Processing time only; the stream is already in memory.
inline std::int64_t time_cell(std::span<const TickBatch> stream, const MinerConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  ProgressiveTree tree(config);
  std::size_t sink = 0;
  for (const auto& batch : stream) sink += tree.process_timestamp(batch).patterns.size();
  const auto stop = std::chrono::steady_clock::now();
  pattern_sink = sink;
  return std::chrono::duration_cast<std::chrono::nanoseconds>(stop - start).count();
}

inline std::int64_t median(std::vector<std::int64_t> v) {
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2;
}

}  // namespace detail

/// Replays the stream once per (poi, minsup, mode) cell in spec order, then
/// checks the per-tick minsup and mode invariants across cells.
inline SweepResult run_sweep(const SweepSpec& spec) {
  spec.validate();
  SweepResult result;
  std::map<std::tuple<Timestamp, std::size_t, Mode>, detail::CellTrace> traces;

  for (auto poi : spec.poi_values) {
    for (std::size_t mi = 0; mi < spec.minsup_values.size(); ++mi) {
      for (auto mode : spec.modes) {
        const MinerConfig config{poi, spec.minsup_values[mi], mode, spec.max_element_size};
        auto trace = detail::trace_cell(spec.stream, config);
        std::vector<std::int64_t> times;
        for (std::size_t r = 0; r < spec.repetitions; ++r) times.push_back(detail::time_cell(spec.stream, config));

        SweepRow row{poi, spec.minsup_values[mi], mode, trace.total, detail::median(times), trace.peak_nodes};
        result.rows.push_back(row);
        std::vector<std::size_t> counts;
        for (const auto& s : trace.skeletons) counts.push_back(s.size());
        result.per_tick_counts.push_back(std::move(counts));
        traces.emplace(std::tuple{poi, mi, mode}, std::move(trace));
      }
    }
  }

  for (auto poi : spec.poi_values) {
    for (auto mode : spec.modes) {
      for (std::size_t lo = 0; lo < spec.minsup_values.size(); ++lo) {
        for (std::size_t hi = 0; hi < spec.minsup_values.size(); ++hi) {
          if (!(spec.minsup_values[lo] < spec.minsup_values[hi])) continue;
          const auto& low = traces.at({poi, lo, mode});
          const auto& high = traces.at({poi, hi, mode});
          for (std::size_t t = 0; t < low.ticks.size(); ++t) {
            if (!std::includes(low.skeletons[t].begin(), low.skeletons[t].end(), high.skeletons[t].begin(),
                               high.skeletons[t].end()))
              result.violations.push_back({Violation::Kind::MinsupAntitonicity, poi, low.ticks[t],
                                           "minsup " + spec.minsup_values[hi].str() + " reports a skeleton missing at " +
                                               spec.minsup_values[lo].str() + " (" + std::string(to_string(mode)) + ")"});
          }
        }
      }
    }
    const bool both = std::count(spec.modes.begin(), spec.modes.end(), Mode::Boolean) &&
                      std::count(spec.modes.begin(), spec.modes.end(), Mode::SupportCoupled);
    if (!both) continue;
    for (std::size_t mi = 0; mi < spec.minsup_values.size(); ++mi) {
      const auto& b = traces.at({poi, mi, Mode::Boolean});
      const auto& c = traces.at({poi, mi, Mode::SupportCoupled});
      for (std::size_t t = 0; t < b.ticks.size(); ++t) {
        if (b.skeletons[t].size() < c.skeletons[t].size())
          result.violations.push_back({Violation::Kind::ModeInequality, poi, b.ticks[t],
                                       "boolean " + std::to_string(b.skeletons[t].size()) + " < coupled " +
                                           std::to_string(c.skeletons[t].size()) + " at minsup " +
                                           spec.minsup_values[mi].str()});
      }
    }
  }
  return result;
}

struct TickCounts {
  Timestamp ts = 0;
  std::size_t boolean_count = 0;
  std::size_t coupled_count = 0;
};

struct ModeViolation {
  Timestamp ts = 0;
  TimestampReport boolean_report;
  TimestampReport coupled_report;
};

struct ModeComparison {
  std::vector<TickCounts> ticks;
  std::vector<ModeViolation> violations;
};

inline ModeComparison compare_modes(std::span<const TickBatch> stream, Timestamp poi, const SupportRatio& minsup,
                                    std::size_t max_element_size = 12) {
  ProgressiveTree boolean_tree(MinerConfig{poi, minsup, Mode::Boolean, max_element_size});
  ProgressiveTree coupled_tree(MinerConfig{poi, minsup, Mode::SupportCoupled, max_element_size});
  ModeComparison out;
  for (const auto& batch : stream) {
    auto b = boolean_tree.process_timestamp(batch);
    auto c = coupled_tree.process_timestamp(batch);
    out.ticks.push_back({batch.ts, b.patterns.size(), c.patterns.size()});
    if (b.patterns.size() < c.patterns.size()) out.violations.push_back({batch.ts, std::move(b), std::move(c)});
  }
  return out;
}

/// Spearman rank correlation (average ranks for ties).
inline double rank_correlation(std::span<const double> x, std::span<const double> y) {
  const auto ranks = [](std::span<const double> v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < idx.size();) {
      std::size_t j = i;
      while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
      for (std::size_t k = i; k <= j; ++k) r[idx[k]] = (static_cast<double>(i + j) / 2.0) + 1.0;
      i = j + 1;
    }
    return r;
  };
  if (x.size() != y.size() || x.size() < 2) return 0.0;
  const auto rx = ranks(x), ry = ranks(y);
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / rx.size();
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / ry.size();
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0 || syy == 0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

inline constexpr std::string_view kSweepCsvHeader =
    "poi,minsup,mode,total_patterns,mean_exec_time_ns,peak_node_count";

inline std::string sweep_csv(std::span<const SweepRow> rows, bool with_times = true) {
  std::string out(kSweepCsvHeader);
  out += '\n';
  for (const auto& r : rows) {
    out += std::to_string(r.poi) + "," + dataio::format_ratio(r.minsup.value()) + "," + std::string(to_string(r.mode)) +
           "," + std::to_string(r.total_patterns) + "," + (with_times ? std::to_string(r.mean_exec_time_ns) : "-") +
           "," + std::to_string(r.peak_node_count) + "\n";
  }
  return out;
}

/// gnuplot-style whitespace tables, one per figure axis.
struct FigureData {
  std::string fig5;  // poi vs execution time
  std::string fig6;  // poi and minsup vs pattern count
  std::string fig7;  // boolean vs support-coupled pattern count
};

inline FigureData figure_data(std::span<const SweepRow> rows) {
  FigureData f;
  f.fig5 = "# poi minsup mode exec_time_ns\n";
  f.fig6 = "# poi minsup mode total_patterns\n";
  f.fig7 = "# poi minsup boolean_patterns support_coupled_patterns\n";
  std::map<std::pair<Timestamp, SupportRatio>, std::pair<std::string, std::string>> pairs;
  for (const auto& r : rows) {
    const std::string ms = dataio::format_ratio(r.minsup.value());
    f.fig5 += std::to_string(r.poi) + " " + ms + " " + std::string(to_string(r.mode)) + " " +
              std::to_string(r.mean_exec_time_ns) + "\n";
    f.fig6 += std::to_string(r.poi) + " " + ms + " " + std::string(to_string(r.mode)) + " " +
              std::to_string(r.total_patterns) + "\n";
    auto& [b, c] = pairs.try_emplace({r.poi, r.minsup}, "NaN", "NaN").first->second;
    (r.mode == Mode::Boolean ? b : c) = std::to_string(r.total_patterns);
  }
  for (const auto& [key, bc] : pairs)
    f.fig7 += std::to_string(key.first) + " " + dataio::format_ratio(key.second.value()) + " " + bc.first + " " +
              bc.second + "\n";
  return f;
}

inline void write_outputs(const std::filesystem::path& dir, std::span<const SweepRow> rows) {
  std::filesystem::create_directories(dir);
  const auto put = [&](const char* name, const std::string& body) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw dataio::IoError("cannot write '" + (dir / name).string() + "'");
    out << body;
    if (!out) throw dataio::IoError("write failed for '" + (dir / name).string() + "'");
  };
  const auto figs = figure_data(rows);
  put("sweep.csv", sweep_csv(rows));
  put("fig5.dat", figs.fig5);
  put("fig6.dat", figs.fig6);
  put("fig7.dat", figs.fig7);
}

}  // namespace prosupmine::bench
