#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "prosupmine/core_model.hpp"

namespace prosupmine::dataio {

struct ParseError : Error {
  ParseError(std::size_t line, std::size_t offset, const std::string& what)
      : Error("line " + std::to_string(line) + ", byte " + std::to_string(offset) + ": " + what),
        line(line), offset(offset) {}
  std::size_t line;
  std::size_t offset;
};

struct OutOfOrderError : Error {
  OutOfOrderError(std::size_t line, Timestamp ts, Timestamp previous)
      : Error("line " + std::to_string(line) + ": tick " + std::to_string(ts) + " after tick " +
              std::to_string(previous)),
        line(line), ts(ts), previous(previous) {}
  std::size_t line;
  Timestamp ts;
  Timestamp previous;
};

struct IoError : Error {
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Event lines: ts,seq_id,item[:qty][;item[:qty]]*
// ---------------------------------------------------------------------------

namespace detail {

template <typename Int>
bool parse_uint(std::string_view s, Int& out) {
  if (s.empty()) return false;
  if (!std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; })) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

}  // namespace detail

inline Event parse_event_line(std::string_view line, std::size_t line_no = 1) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  const auto c1 = line.find(',');
  if (c1 == std::string_view::npos) throw ParseError(line_no, 0, "expected 'ts,seq_id,items'");
  const auto c2 = line.find(',', c1 + 1);
  if (c2 == std::string_view::npos) throw ParseError(line_no, c1 + 1, "expected 'ts,seq_id,items'");

  Event ev;
  const std::string_view ts_text = line.substr(0, c1);
  if (!detail::parse_uint(ts_text, ev.ts) || ev.ts < 0)
    throw ParseError(line_no, 0, "malformed tick '" + std::string(ts_text) + "'");

  const std::string_view seq = line.substr(c1 + 1, c2 - c1 - 1);
  if (!valid_token(seq)) throw ParseError(line_no, c1 + 1, "malformed sequence id '" + std::string(seq) + "'");
  ev.seq_id = std::string(seq);

  std::vector<QuantifiedItem> items;
  std::size_t pos = c2 + 1;
  while (true) {
    const auto end = std::min(line.find(';', pos), line.size());
    const std::string_view tok = line.substr(pos, end - pos);
    const auto colon = tok.find(':');
    const std::string_view name = tok.substr(0, colon);
    if (!valid_token(name)) throw ParseError(line_no, pos, "empty or malformed item '" + std::string(name) + "'");
    Quantity qty = 1;
    if (colon != std::string_view::npos) {
      const std::string_view qtext = tok.substr(colon + 1);
      if (!detail::parse_uint(qtext, qty) || qty < 1)
        throw ParseError(line_no, pos + colon + 1, "quantity must be an integer >= 1, got '" + std::string(qtext) + "'");
    }
    items.push_back({Item(std::string(name)), qty});
    if (end == line.size()) break;
    pos = end + 1;
  }
  ev.element = ElementLabel::from(std::move(items));
  return ev;
}

inline std::string format_element(const ElementLabel& e, char sep = ';') {
  std::string out;
  for (const auto& qi : e.items()) {
    if (!out.empty()) out += sep;
    out += qi.item.name();
    out += ':';
    out += std::to_string(qi.qty);
  }
  return out;
}

inline std::string format_event_line(const Event& ev) {
  return std::to_string(ev.ts) + "," + ev.seq_id + "," + format_element(ev.element);
}

// ---------------------------------------------------------------------------
// Streams
// ---------------------------------------------------------------------------

struct LoadOptions {
  /// Reject decreasing ticks instead of sorting them.
  bool strict = false;
};

/// Groups events by tick; same-tick events of one sequence merge with max
/// quantity. Blank lines and lines starting with '#' are skipped.
inline std::vector<TickBatch> load_stream(std::istream& in, LoadOptions options = {}) {
  std::map<Timestamp, TickBatch> by_tick;
  std::string line;
  std::size_t line_no = 0;
  Timestamp previous = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r" || line.front() == '#') continue;
    Event ev = parse_event_line(line, line_no);
    if (options.strict && ev.ts < previous) throw OutOfOrderError(line_no, ev.ts, previous);
    previous = std::max(previous, ev.ts);
    auto& batch = by_tick[ev.ts];
    batch.ts = ev.ts;
    auto [it, inserted] = batch.elements.try_emplace(ev.seq_id, ev.element);
    if (!inserted) it->second = merge_labels(it->second, ev.element);
  }
  if (in.bad()) throw IoError("read failure at line " + std::to_string(line_no + 1));
  std::vector<TickBatch> out;
  out.reserve(by_tick.size());
  for (auto& [ts, b] : by_tick) out.push_back(std::move(b));
  return out;
}

inline std::vector<TickBatch> load_stream(const std::string& path, LoadOptions options = {}) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  return load_stream(in, options);
}

inline std::vector<Event> flatten(std::span<const TickBatch> batches) {
  std::vector<Event> out;
  for (const auto& b : batches)
    for (const auto& [seq, e] : b.elements) out.push_back(Event{seq, b.ts, e});
  return out;
}

inline std::size_t event_count(std::span<const TickBatch> batches) {
  return std::accumulate(batches.begin(), batches.end(), std::size_t{0},
                         [](std::size_t n, const TickBatch& b) { return n + b.elements.size(); });
}

inline void write_stream(std::ostream& out, std::span<const TickBatch> batches) {
  for (const auto& ev : flatten(batches)) out << format_event_line(ev) << '\n';
}

// ---------------------------------------------------------------------------
// Synthetic generator
// ---------------------------------------------------------------------------

struct GeneratorParams {
  std::size_t n_sequences = 20;
  std::size_t n_items = 10;
  std::size_t n_ticks = 30;
  double arrival_prob = 0.5;
  std::size_t element_size_max = 3;
  Quantity qty_max = 3;
  std::uint64_t seed = 42;

  void validate() const {
    if (n_sequences < 1 || n_items < 1 || n_ticks < 1 || element_size_max < 1)
      throw ConfigError("generator counts must be >= 1");
    if (!(arrival_prob > 0.0 && arrival_prob <= 1.0)) throw ConfigError("arrival probability must be in (0,1]");
    if (qty_max < 1) throw ConfigError("qty_max must be >= 1");
  }
};

/// mt19937_64 with distribution code written out here, since the standard
/// distributions are implementation-defined.
class PortableRng {
 public:
  explicit PortableRng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [lo, hi].
  std::uint64_t uniform(std::uint64_t lo, std::uint64_t hi) {
    const std::uint64_t range = hi - lo + 1;
    if (range == 0) return engine_();
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % range;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return lo + x % range;
  }

  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return p >= 1.0 || unit() < p; }

 private:
  std::mt19937_64 engine_;
};

inline std::string padded(char prefix, std::size_t value, std::size_t width) {
  std::string digits = std::to_string(value);
  if (digits.size() < width) digits.insert(0, width - digits.size(), '0');
  return prefix + digits;
}

/// Ticks 1..n_ticks; ticks where nothing arrives produce no batch.
inline std::vector<TickBatch> generate_stream(const GeneratorParams& params) {
  params.validate();
  PortableRng rng(params.seed);
  const std::size_t seq_width = std::max<std::size_t>(2, std::to_string(params.n_sequences).size());
  const std::size_t item_width = std::to_string(params.n_items).size();
  const std::size_t size_max = std::min(params.element_size_max, params.n_items);

  std::vector<std::string> seq_names, item_names;
  for (std::size_t s = 1; s <= params.n_sequences; ++s) seq_names.push_back(padded('S', s, seq_width));
  for (std::size_t i = 1; i <= params.n_items; ++i) item_names.push_back(padded('I', i, item_width));

  std::vector<std::size_t> pool(params.n_items);
  std::vector<TickBatch> out;
  for (std::size_t t = 1; t <= params.n_ticks; ++t) {
    TickBatch batch;
    batch.ts = static_cast<Timestamp>(t);
    for (const auto& seq : seq_names) {
      if (!rng.bernoulli(params.arrival_prob)) continue;
      const auto size = static_cast<std::size_t>(rng.uniform(1, size_max));
      std::iota(pool.begin(), pool.end(), std::size_t{0});
      std::vector<QuantifiedItem> items;
      for (std::size_t k = 0; k < size; ++k) {
        const auto j = static_cast<std::size_t>(rng.uniform(k, params.n_items - 1));
        std::swap(pool[k], pool[j]);
        items.push_back({Item(item_names[pool[k]]), static_cast<Quantity>(rng.uniform(1, params.qty_max))});
      }
      batch.elements.emplace(seq, ElementLabel::from(std::move(items)));
    }
    if (!batch.elements.empty()) out.push_back(std::move(batch));
  }
  return out;
}

/// FNV-1a, used to pin generated fixtures and compare serialized runs.
inline std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

enum class ReportFormat { Text, Csv, JsonLines };

inline constexpr std::string_view kCsvHeader = "ts,pattern,support,support_ratio,db_size";

/// `<(A:2|B:1)(C:1)>`: elements in pattern order, items in name order.
inline std::string format_pattern(const ReportedPattern& p) {
  std::string out = "<";
  for (std::size_t k = 0; k < p.skeleton.size(); ++k) {
    out += '(';
    for (std::size_t i = 0; i < p.skeleton[k].size(); ++i) {
      if (i) out += '|';
      const auto& name = p.skeleton[k][i];
      out += name;
      out += ':';
      out += std::to_string(p.quantities[k].at(name));
    }
    out += ')';
  }
  out += '>';
  return out;
}

inline std::string format_ratio(double r) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, r);
  return std::string(buf, ptr);
}

/// Inverse of format_pattern; fills skeleton and quantities.
inline ReportedPattern parse_pattern(std::string_view text) {
  const auto bad = [&](const char* why) { return ParseError(1, 0, std::string(why) + " in '" + std::string(text) + "'"); };
  if (text.size() < 2 || text.front() != '<' || text.back() != '>') throw bad("pattern must be <...>");
  ReportedPattern p;
  std::string_view body = text.substr(1, text.size() - 2);
  while (!body.empty()) {
    if (body.front() != '(') throw bad("expected '('");
    const auto close = body.find(')');
    if (close == std::string_view::npos) throw bad("unterminated element");
    std::string_view elem = body.substr(1, close - 1);
    ItemSet names;
    std::map<std::string, Quantity> qty;
    while (true) {
      const auto bar = std::min(elem.find('|'), elem.size());
      const std::string_view tok = elem.substr(0, bar);
      const auto colon = tok.find(':');
      if (colon == std::string_view::npos) throw bad("item without quantity");
      Quantity q = 0;
      if (!valid_token(tok.substr(0, colon)) || !detail::parse_uint(tok.substr(colon + 1), q) || q < 1)
        throw bad("malformed item");
      names.emplace_back(tok.substr(0, colon));
      qty[names.back()] = q;
      if (bar == elem.size()) break;
      elem.remove_prefix(bar + 1);
    }
    p.skeleton.push_back(std::move(names));
    p.quantities.push_back(std::move(qty));
    body.remove_prefix(close + 1);
  }
  if (p.skeleton.empty()) throw bad("empty pattern");
  return p;
}

inline std::string write_report(const TimestampReport& report, ReportFormat format, bool csv_header = true) {
  std::string out;
  switch (format) {
    case ReportFormat::Text:
      for (const auto& p : report.patterns)
        out += "t" + std::to_string(report.ts) + " " + format_pattern(p) + " " + std::to_string(p.support) + "\n";
      break;
    case ReportFormat::Csv:
      if (csv_header) {
        out += kCsvHeader;
        out += '\n';
      }
      for (const auto& p : report.patterns)
        out += std::to_string(report.ts) + "," + format_pattern(p) + "," + std::to_string(p.support) + "," +
               format_ratio(p.support_ratio) + "," + std::to_string(report.db_size) + "\n";
      break;
    case ReportFormat::JsonLines: {
      nlohmann::ordered_json j;
      j["ts"] = report.ts;
      j["db_size"] = report.db_size;
      j["patterns"] = nlohmann::ordered_json::array();
      for (const auto& p : report.patterns) {
        nlohmann::ordered_json jp;
        jp["pattern"] = format_pattern(p);
        jp["skeleton"] = p.skeleton;
        jp["quantities"] = p.quantities;
        jp["support"] = p.support;
        jp["support_ratio"] = p.support_ratio;
        j["patterns"].push_back(std::move(jp));
      }
      out += j.dump();
      out += '\n';
      break;
    }
  }
  return out;
}

struct CsvRow {
  Timestamp ts = 0;
  ReportedPattern pattern;
  std::size_t db_size = 0;
};

inline CsvRow parse_csv_row(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  while (true) {
    const auto comma = line.find(',', pos);
    fields.push_back(line.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  if (fields.size() != 5) throw ParseError(1, 0, "csv row needs 5 fields");
  CsvRow row;
  if (!detail::parse_uint(fields[0], row.ts)) throw ParseError(1, 0, "malformed tick");
  row.pattern = parse_pattern(fields[1]);
  if (!detail::parse_uint(fields[2], row.pattern.support)) throw ParseError(1, 0, "malformed support");
  const std::string ratio(fields[3]);
  auto [ptr, ec] = std::from_chars(ratio.data(), ratio.data() + ratio.size(), row.pattern.support_ratio);
  if (ec != std::errc{} || ptr != ratio.data() + ratio.size()) throw ParseError(1, 0, "malformed support ratio");
  if (!detail::parse_uint(fields[4], row.db_size)) throw ParseError(1, 0, "malformed db size");
  return row;
}

}  // namespace prosupmine::dataio
