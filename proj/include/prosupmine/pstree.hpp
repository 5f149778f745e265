#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "prosupmine/core_model.hpp"

namespace prosupmine {

/// Interned sequence identifier, local to one tree.
using SeqKey = std::uint32_t;

struct SequenceEntry {
  SeqKey seq = 0;
  /// Tick of the first element of the newest occurrence of this node's pattern.
  Timestamp start_ts = 0;

  friend bool operator==(const SequenceEntry&, const SequenceEntry&) = default;
};

/// One candidate pattern: the labels on the path from the root down to here.
/// `entries` is sorted by `seq` and holds at most one entry per sequence.
struct PatternNode {
  ElementLabel label;
  std::vector<SequenceEntry> entries;
  std::map<ElementLabel, std::unique_ptr<PatternNode>> children;
};

struct TreeStats {
  std::size_t node_count = 0;
  std::size_t entry_count = 0;
  std::size_t depth = 0;

  friend bool operator==(const TreeStats&, const TreeStats&) = default;
};

struct FrequentPattern {
  Pattern pattern;
  std::size_t support = 0;
};

/// Every non-empty subset of `e`, keeping observed quantities, ordered by size
/// and then label order.
inline std::vector<ElementLabel> candidate_elements(const ElementLabel& e, std::size_t cap) {
  const auto& items = e.items();
  if (items.empty()) throw InvalidLabel("cannot enumerate an empty element");
  if (items.size() > cap) throw ElementTooLarge(items.size(), cap);
  const std::size_t n = items.size();
  std::vector<ElementLabel> out;
  out.reserve((std::size_t{1} << n) - 1);
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
    std::vector<QuantifiedItem> subset;
    for (std::size_t i = 0; i < n; ++i)
      if (mask & (std::uint64_t{1} << i)) subset.push_back(items[i]);
    out.push_back(ElementLabel::from(std::move(subset)));
  }
  std::sort(out.begin(), out.end(), [](const ElementLabel& a, const ElementLabel& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  });
  return out;
}

/// An occurrence starting at `start_ts` is still inside a window of `poi`
/// ticks ending at `now`.
constexpr bool window_valid(Timestamp start_ts, Timestamp now, Timestamp poi) noexcept {
  return start_ts > now - poi;
}

/// Adds an entry for `seq`, or moves its start to the later of the two.
inline void upsert_entry(PatternNode& node, SeqKey seq, Timestamp start_ts) {
  auto it = std::lower_bound(node.entries.begin(), node.entries.end(), seq,
                             [](const SequenceEntry& e, SeqKey s) { return e.seq < s; });
  if (it != node.entries.end() && it->seq == seq) {
    it->start_ts = std::max(it->start_ts, start_ts);
  } else {
    node.entries.insert(it, SequenceEntry{seq, start_ts});
  }
}

/// Groups frequent variants by skeleton. Each group reports the per-position,
/// per-item maximum quantity and the largest variant support.
inline std::vector<ReportedPattern> dominance_collapse(std::span<const FrequentPattern> frequent,
                                                       std::size_t db_size) {
  std::map<Skeleton, ReportedPattern> groups;
  for (const auto& fp : frequent) {
    Skeleton key = skeleton(fp.pattern);
    auto [it, inserted] = groups.try_emplace(key);
    ReportedPattern& rp = it->second;
    if (inserted) {
      rp.skeleton = std::move(key);
      rp.quantities.resize(fp.pattern.elements.size());
    }
    for (std::size_t k = 0; k < fp.pattern.elements.size(); ++k) {
      for (const auto& qi : fp.pattern.elements[k].items()) {
        auto& q = rp.quantities[k][qi.item.name()];
        q = std::max(q, qi.qty);
      }
    }
    rp.support = std::max(rp.support, fp.support);
  }
  std::vector<ReportedPattern> out;
  out.reserve(groups.size());
  for (auto& [key, rp] : groups) {
    rp.support_ratio = db_size == 0 ? 0.0 : static_cast<double>(rp.support) / static_cast<double>(db_size);
    out.push_back(std::move(rp));
  }
  sort_canonical(out);
  return out;
}

/// The support-coupled progressive sequence tree.
///
/// Each call to process_timestamp makes one post-order pass over the tree as
/// it stood after the previous tick: obsolete entries are dropped, surviving
/// entries are extended with the new elements of their sequence, and nodes
/// left without entries are removed with their subtrees. A second walk then
/// collects the frequent candidates. Nodes and entries created during a pass
/// are not extended in that same pass, so items that arrive together only
/// ever form one pattern element.
///
/// Not thread-safe for concurrent mutation; see process_timestamp.
class ProgressiveTree {
 public:
  explicit ProgressiveTree(MinerConfig config) : config_(std::move(config)) { config_.validate(); }

  const MinerConfig& config() const noexcept { return config_; }
  std::optional<Timestamp> last_ts() const noexcept { return last_ts_; }
  const PatternNode& root() const noexcept { return root_; }
  std::size_t events_consumed() const noexcept { return events_consumed_; }

  const SeqId& seq_name(SeqKey key) const { return seq_names_.at(key); }

  TimestampReport process_timestamp(const TickBatch& batch) {
    return process_timestamp(batch.ts, batch.elements);
  }

  TimestampReport process_timestamp(Timestamp now, const std::map<SeqId, ElementLabel>& batch) {
    if (last_ts_ && now <= *last_ts_) throw NonMonotonicTimestamp(now, *last_ts_);
    if (now < 0) throw ConfigError("timestamps must be non-negative");

    // Resolve every arrival before touching the tree so a bad element leaves
    // it unchanged.
    std::vector<std::pair<SeqId, std::vector<ElementLabel>>> resolved;
    resolved.reserve(batch.size());
    for (const auto& [seq, element] : batch) {
      const ElementLabel label =
          config_.mode == Mode::Boolean ? element.coerced_to_boolean() : element;
      resolved.emplace_back(seq, candidate_elements(label, config_.max_element_size));
    }

    std::vector<std::pair<SeqKey, const std::vector<ElementLabel>*>> root_arrivals;
    for (const auto& [seq, cands] : resolved) root_arrivals.emplace_back(intern(seq), &cands);
    std::vector<const std::vector<ElementLabel>*> arrivals(seq_names_.size(), nullptr);
    for (const auto& [key, cands] : root_arrivals) arrivals[key] = cands;

    std::vector<const ElementLabel*> path;
    for (auto it = root_.children.begin(); it != root_.children.end();) {
      path.push_back(&it->first);
      update(*it->second, path, now, arrivals);
      path.pop_back();
      it = it->second->entries.empty() ? root_.children.erase(it) : std::next(it);
    }
    for (const auto& [key, cands] : root_arrivals) {
      for (const auto& c : *cands) upsert_entry(child(root_, c), key, now);
    }

    last_ts_ = now;
    events_consumed_ += batch.size();

    TimestampReport report;
    report.ts = now;
    report.db_size = db_size();
    if (report.db_size == 0) return report;

    std::vector<FrequentPattern> frequent;
    std::vector<const ElementLabel*> current;
    collect(root_, current, frequent, report.db_size);
    report.patterns = dominance_collapse(frequent, report.db_size);
    return report;
  }

  /// Distinct sequences with at least one element inside the window.
  std::size_t db_size() const {
    std::vector<bool> seen(seq_names_.size(), false);
    std::size_t n = 0;
    for (const auto& [label, node] : root_.children) {
      for (const auto& e : node->entries) {
        if (!seen[e.seq]) {
          seen[e.seq] = true;
          ++n;
        }
      }
    }
    return n;
  }

  TreeStats stats() const {
    TreeStats s;
    stats_walk(root_, 0, s);
    return s;
  }

  /// Structural invariant violations after processing `now`; empty when sound.
  std::vector<std::string> audit() const {
    std::vector<std::string> problems;
    if (!last_ts_) {
      if (!root_.children.empty()) problems.push_back("tree has nodes before any tick");
      return problems;
    }
    std::vector<const ElementLabel*> path;
    for (const auto& [label, node] : root_.children) {
      path.push_back(&label);
      audit_walk(label, *node, path, problems);
      path.pop_back();
    }
    if (!root_.entries.empty()) problems.push_back("root holds entries");
    return problems;
  }

 private:
  SeqKey intern(const SeqId& seq) {
    auto [it, inserted] = seq_keys_.try_emplace(seq, static_cast<SeqKey>(seq_names_.size()));
    if (inserted) seq_names_.push_back(seq);
    return it->second;
  }

  static PatternNode& child(PatternNode& parent, const ElementLabel& label) {
    auto& slot = parent.children[label];
    if (!slot) {
      slot = std::make_unique<PatternNode>();
      slot->label = label;
    }
    return *slot;
  }

  static bool on_path(const std::vector<const ElementLabel*>& path, const ElementLabel& c) {
    return std::any_of(path.begin(), path.end(), [&](const ElementLabel* l) { return l->same_items(c); });
  }

  void update(PatternNode& node, std::vector<const ElementLabel*>& path, Timestamp now,
              const std::vector<const std::vector<ElementLabel>*>& arrivals) {
    for (auto it = node.children.begin(); it != node.children.end();) {
      path.push_back(&it->first);
      update(*it->second, path, now, arrivals);
      path.pop_back();
      it = it->second->entries.empty() ? node.children.erase(it) : std::next(it);
    }

    std::erase_if(node.entries,
                  [&](const SequenceEntry& e) { return !window_valid(e.start_ts, now, config_.poi); });

    for (const auto& entry : node.entries) {
      const auto* cands = arrivals[entry.seq];
      if (!cands) continue;
      for (const auto& c : *cands) {
        if (on_path(path, c)) continue;
        upsert_entry(child(node, c), entry.seq, entry.start_ts);
      }
    }
  }

  void collect(const PatternNode& node, std::vector<const ElementLabel*>& path, std::vector<FrequentPattern>& out,
               std::size_t db) const {
    for (const auto& [label, ch] : node.children) {
      path.push_back(&label);
      if (is_frequent(ch->entries.size(), db, config_.minsup)) {
        FrequentPattern fp{{}, ch->entries.size()};
        fp.pattern.elements.reserve(path.size());
        for (const auto* l : path) fp.pattern.elements.push_back(*l);
        out.push_back(std::move(fp));
      }
      collect(*ch, path, out, db);
      path.pop_back();
    }
  }

  static void stats_walk(const PatternNode& node, std::size_t depth, TreeStats& s) {
    ++s.node_count;
    s.entry_count += node.entries.size();
    s.depth = std::max(s.depth, depth);
    for (const auto& [label, ch] : node.children) stats_walk(*ch, depth + 1, s);
  }

  void audit_walk(const ElementLabel& key, const PatternNode& node, std::vector<const ElementLabel*>& path,
                  std::vector<std::string>& problems) const {
    const auto where = [&] {
      std::string s;
      for (const auto* l : path) {
        s += '(';
        for (const auto& qi : l->items()) s += qi.item.name() + ":" + std::to_string(qi.qty) + " ";
        s += ')';
      }
      return s;
    };
    if (!(key == node.label)) problems.push_back("child key differs from node label at " + where());
    if (node.entries.empty()) problems.push_back("empty node at " + where());
    for (std::size_t i = 0; i < node.entries.size(); ++i) {
      const auto& e = node.entries[i];
      if (!window_valid(e.start_ts, *last_ts_, config_.poi))
        problems.push_back("obsolete entry for " + seq_names_[e.seq] + " at " + where());
      if (i > 0 && node.entries[i - 1].seq >= e.seq)
        problems.push_back("duplicate or unsorted entry at " + where());
    }
    for (std::size_t i = 0; i + 1 < path.size(); ++i)
      if (path[i]->same_items(*path.back())) problems.push_back("repeated element on path " + where());
    for (const auto& [label, ch] : node.children) {
      path.push_back(&label);
      audit_walk(label, *ch, path, problems);
      path.pop_back();
    }
  }

  MinerConfig config_;
  PatternNode root_;
  std::optional<Timestamp> last_ts_;
  std::vector<SeqId> seq_names_;
  std::unordered_map<SeqId, SeqKey> seq_keys_;
  std::size_t events_consumed_ = 0;
};

inline TreeStats tree_stats(const ProgressiveTree& tree) { return tree.stats(); }

/// Replays `batches` through a fresh tree, one report per batch.
inline std::vector<TimestampReport> mine_stream(std::span<const TickBatch> batches, const MinerConfig& config) {
  ProgressiveTree tree(config);
  std::vector<TimestampReport> reports;
  reports.reserve(batches.size());
  for (const auto& b : batches) reports.push_back(tree.process_timestamp(b));
  return reports;
}

}  // namespace prosupmine
