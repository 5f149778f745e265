#pragma once

// Brute-force reference miner. Shares only the value types with the tree; it
// re-derives windows, subsets, embeddings and the output collapse on its own.

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "prosupmine/core_model.hpp"

namespace prosupmine::oracle {

struct InstanceTooLarge : Error {
  explicit InstanceTooLarge(std::size_t bound)
      : Error("oracle enumeration exceeds bound of " + std::to_string(bound) + " candidate embeddings"),
        bound(bound) {}
  std::size_t bound;
};

struct SequenceView {
  SeqId seq_id;
  std::vector<std::pair<Timestamp, ElementLabel>> elements;
};

struct Options {
  std::size_t max_enumeration = 2'000'000;
  /// Diagnostic: also count patterns that reuse an item set at two positions.
  bool allow_repeated_elements = false;
};

/// Per-sequence views of the elements in the window (now - poi, now].
inline std::vector<SequenceView> window_view(std::span<const Event> events, Timestamp now, Timestamp poi) {
  std::map<SeqId, std::map<Timestamp, std::vector<QuantifiedItem>>> grouped;
  for (const auto& ev : events) {
    if (ev.ts > now || ev.ts <= now - poi) continue;
    auto& items = grouped[ev.seq_id][ev.ts];
    items.insert(items.end(), ev.element.items().begin(), ev.element.items().end());
  }
  std::vector<SequenceView> views;
  for (auto& [seq, ticks] : grouped) {
    SequenceView v{seq, {}};
    for (auto& [ts, items] : ticks) v.elements.emplace_back(ts, ElementLabel::from(std::move(items)));
    views.push_back(std::move(v));
  }
  return views;
}

/// `needle` items all occur in `hay` with identical quantities.
inline bool contains_exact(const ElementLabel& hay, const ElementLabel& needle) {
  for (const auto& want : needle.items()) {
    const bool found = std::any_of(hay.items().begin(), hay.items().end(), [&](const QuantifiedItem& have) {
      return have.item == want.item && have.qty == want.qty;
    });
    if (!found) return false;
  }
  return true;
}

/// The view contains `p` as a subsequence: strictly increasing positions, each
/// pattern element a subset of the element at its position.
inline bool supports(const SequenceView& view, const Pattern& p) {
  std::size_t pos = 0;
  for (const auto& want : p.elements) {
    while (pos < view.elements.size() && !contains_exact(view.elements[pos].second, want)) ++pos;
    if (pos == view.elements.size()) return false;
    ++pos;
  }
  return true;
}

namespace detail {

inline std::vector<ElementLabel> all_subsets(const ElementLabel& e) {
  const auto& items = e.items();
  std::vector<ElementLabel> out;
  const std::uint64_t limit = std::uint64_t{1} << items.size();
  for (std::uint64_t mask = 1; mask < limit; ++mask) {
    std::vector<QuantifiedItem> pick;
    for (std::size_t i = 0; i < items.size(); ++i)
      if ((mask >> i) & 1U) pick.push_back(items[i]);
    out.push_back(ElementLabel::from(std::move(pick)));
  }
  return out;
}

inline bool item_sets_equal(const ElementLabel& a, const ElementLabel& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a.items()[i].item != b.items()[i].item) return false;
  return true;
}

struct Enumerator {
  const std::vector<std::vector<ElementLabel>>& subsets;
  const Options& options;
  std::set<Pattern>& found;
  std::size_t& generated;
  Pattern current{};

  void run(std::size_t from) {
    for (std::size_t i = from; i < subsets.size(); ++i) {
      for (const auto& s : subsets[i]) {
        if (!options.allow_repeated_elements &&
            std::any_of(current.elements.begin(), current.elements.end(),
                        [&](const ElementLabel& l) { return item_sets_equal(l, s); }))
          continue;
        if (++generated > options.max_enumeration) throw InstanceTooLarge(options.max_enumeration);
        current.elements.push_back(s);
        found.insert(current);
        run(i + 1);
        current.elements.pop_back();
      }
    }
  }
};

}  // namespace detail

inline TimestampReport mine_bruteforce(std::span<const Event> events, Timestamp now, Timestamp poi,
                                       const SupportRatio& minsup, Mode mode, const Options& options = {}) {
  std::vector<Event> input(events.begin(), events.end());
  if (mode == Mode::Boolean)
    for (auto& ev : input) ev.element = ev.element.coerced_to_boolean();

  const auto views = window_view(input, now, poi);
  TimestampReport report;
  report.ts = now;
  report.db_size = views.size();
  if (views.empty()) return report;

  std::set<Pattern> candidates;
  std::size_t generated = 0;
  for (const auto& v : views) {
    std::vector<std::vector<ElementLabel>> subsets;
    for (const auto& [ts, e] : v.elements) subsets.push_back(detail::all_subsets(e));
    detail::Enumerator{subsets, options, candidates, generated}.run(0);
  }

  // ceil(minsup * |DB|) without going through the shared helper.
  const std::uint64_t need_num = static_cast<std::uint64_t>(views.size()) * minsup.num();
  const std::uint64_t need = need_num / minsup.den() + (need_num % minsup.den() != 0 ? 1 : 0);

  struct Group {
    std::vector<std::map<std::string, Quantity>> quantities;
    std::size_t support = 0;
  };
  std::map<Skeleton, Group> groups;
  for (const auto& p : candidates) {
    std::size_t count = 0;
    for (const auto& v : views) count += supports(v, p) ? 1 : 0;
    if (count < need) continue;
    Skeleton key;
    for (const auto& e : p.elements) {
      ItemSet names;
      for (const auto& qi : e.items()) names.push_back(qi.item.name());
      key.push_back(std::move(names));
    }
    auto& g = groups[key];
    g.quantities.resize(p.elements.size());
    for (std::size_t k = 0; k < p.elements.size(); ++k)
      for (const auto& qi : p.elements[k].items())
        g.quantities[k][qi.item.name()] = std::max(g.quantities[k][qi.item.name()], qi.qty);
    g.support = std::max(g.support, count);
  }

  for (auto& [key, g] : groups) {
    ReportedPattern rp;
    rp.skeleton = key;
    rp.quantities = std::move(g.quantities);
    rp.support = g.support;
    rp.support_ratio = static_cast<double>(g.support) / static_cast<double>(views.size());
    report.patterns.push_back(std::move(rp));
  }
  sort_canonical(report.patterns);
  return report;
}

}  // namespace prosupmine::oracle
