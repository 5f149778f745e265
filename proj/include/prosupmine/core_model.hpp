#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace prosupmine {

using Timestamp = std::int64_t;
using Quantity = std::uint32_t;
using SeqId = std::string;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : Error {
  using Error::Error;
};

struct InvalidLabel : Error {
  using Error::Error;
};

struct ElementTooLarge : Error {
  ElementTooLarge(std::size_t size, std::size_t cap)
      : Error("element has " + std::to_string(size) + " items, cap is " + std::to_string(cap)),
        size(size), cap(cap) {}
  std::size_t size;
  std::size_t cap;
};

struct NonMonotonicTimestamp : Error {
  NonMonotonicTimestamp(Timestamp now, Timestamp last)
      : Error("timestamp " + std::to_string(now) + " does not follow " + std::to_string(last)),
        now(now), last(last) {}
  Timestamp now;
  Timestamp last;
};

// ---------------------------------------------------------------------------
// Items and labels
// ---------------------------------------------------------------------------

/// True when `name` is usable as an item or sequence token.
inline bool valid_token(std::string_view name) noexcept {
  if (name.empty()) return false;
  return std::none_of(name.begin(), name.end(), [](char c) {
    return c == ',' || c == ';' || c == ':' || c == '|' || c == ' ' || c == '\t' || c == '\n' ||
           c == '\r' || c == '\v' || c == '\f';
  });
}

class Item {
 public:
  explicit Item(std::string name) : name_(std::move(name)) {
    if (!valid_token(name_)) throw InvalidLabel("invalid item name '" + name_ + "'");
  }

  const std::string& name() const noexcept { return name_; }

  friend auto operator<=>(const Item&, const Item&) = default;
  friend bool operator==(const Item&, const Item&) = default;

 private:
  std::string name_;
};

struct QuantifiedItem {
  Item item;
  Quantity qty = 1;

  friend auto operator<=>(const QuantifiedItem&, const QuantifiedItem&) = default;
  friend bool operator==(const QuantifiedItem&, const QuantifiedItem&) = default;
};

/// Quantity-stripped element: sorted, distinct item names.
using ItemSet = std::vector<std::string>;
/// Quantity-stripped pattern.
using Skeleton = std::vector<ItemSet>;

/// A non-empty set of quantified items kept in canonical (item-name) order.
/// Equality and ordering include quantities.
class ElementLabel {
 public:
  ElementLabel() = default;

  /// Canonicalizes `items`; a repeated item keeps its largest quantity.
  static ElementLabel from(std::vector<QuantifiedItem> items) {
    if (items.empty()) throw InvalidLabel("element label must contain at least one item");
    std::sort(items.begin(), items.end());
    std::vector<QuantifiedItem> merged;
    merged.reserve(items.size());
    for (auto& qi : items) {
      if (qi.qty < 1) throw InvalidLabel("quantity of '" + qi.item.name() + "' must be >= 1");
      if (!merged.empty() && merged.back().item == qi.item) {
        merged.back().qty = std::max(merged.back().qty, qi.qty);
      } else {
        merged.push_back(std::move(qi));
      }
    }
    ElementLabel label;
    label.items_ = std::move(merged);
    return label;
  }

  static ElementLabel of(std::initializer_list<std::pair<const char*, Quantity>> items) {
    std::vector<QuantifiedItem> v;
    for (const auto& [name, qty] : items) v.push_back({Item(name), qty});
    return from(std::move(v));
  }

  const std::vector<QuantifiedItem>& items() const noexcept { return items_; }
  std::size_t size() const noexcept { return items_.size(); }
  bool empty() const noexcept { return items_.empty(); }

  ItemSet skeleton() const {
    ItemSet s;
    s.reserve(items_.size());
    for (const auto& qi : items_) s.push_back(qi.item.name());
    return s;
  }

  /// Same item set, every quantity replaced by 1.
  ElementLabel coerced_to_boolean() const {
    ElementLabel out = *this;
    for (auto& qi : out.items_) qi.qty = 1;
    return out;
  }

  bool same_items(const ElementLabel& other) const noexcept {
    return std::equal(items_.begin(), items_.end(), other.items_.begin(), other.items_.end(),
                      [](const auto& a, const auto& b) { return a.item == b.item; });
  }

  friend auto operator<=>(const ElementLabel&, const ElementLabel&) = default;
  friend bool operator==(const ElementLabel&, const ElementLabel&) = default;

 private:
  std::vector<QuantifiedItem> items_;
};

/// Merge two same-tick elements of one sequence: item union, max quantity.
inline ElementLabel merge_labels(const ElementLabel& a, const ElementLabel& b) {
  std::vector<QuantifiedItem> all = a.items();
  all.insert(all.end(), b.items().begin(), b.items().end());
  return ElementLabel::from(std::move(all));
}

struct Event {
  SeqId seq_id;
  Timestamp ts = 0;
  ElementLabel element;

  friend bool operator==(const Event&, const Event&) = default;
};

/// Arrivals of one tick; at most one (already merged) element per sequence.
struct TickBatch {
  Timestamp ts = 0;
  std::map<SeqId, ElementLabel> elements;

  friend bool operator==(const TickBatch&, const TickBatch&) = default;
};

// ---------------------------------------------------------------------------
// Patterns
// ---------------------------------------------------------------------------

struct Pattern {
  std::vector<ElementLabel> elements;

  friend auto operator<=>(const Pattern&, const Pattern&) = default;
  friend bool operator==(const Pattern&, const Pattern&) = default;
};

inline Skeleton skeleton(const Pattern& p) {
  Skeleton s;
  s.reserve(p.elements.size());
  for (const auto& e : p.elements) s.push_back(e.skeleton());
  return s;
}

/// Non-empty, and no two elements share an item set. Quantities are ignored
/// when comparing positions, so <(A:1)(A:2)> is not well formed.
inline bool well_formed(const Pattern& p) {
  if (p.elements.empty()) return false;
  for (std::size_t i = 0; i < p.elements.size(); ++i) {
    if (p.elements[i].empty()) return false;
    for (std::size_t j = i + 1; j < p.elements.size(); ++j)
      if (p.elements[i].same_items(p.elements[j])) return false;
  }
  return true;
}

struct ReportedPattern {
  Skeleton skeleton;
  std::vector<std::map<std::string, Quantity>> quantities;
  std::size_t support = 0;
  double support_ratio = 0.0;

  friend bool operator==(const ReportedPattern&, const ReportedPattern&) = default;
};

/// Canonical report order: shorter patterns first, then lexicographic by skeleton.
inline bool canonical_less(const Skeleton& a, const Skeleton& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

inline void sort_canonical(std::vector<ReportedPattern>& patterns) {
  std::sort(patterns.begin(), patterns.end(), [](const auto& x, const auto& y) {
    return canonical_less(x.skeleton, y.skeleton);
  });
}

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

/// Exact rational minimum-support ratio in (0, 1].
class SupportRatio {
 public:
  SupportRatio() = default;

  SupportRatio(std::uint64_t num, std::uint64_t den) {
    if (den == 0 || num == 0 || num > den) throw ConfigError("minsup must be in (0,1]");
    const auto g = std::gcd(num, den);
    num_ = num / g;
    den_ = den / g;
  }

  /// Parses a decimal ("0.25", "1", ".5", "1.0") or a fraction ("1/3").
  static SupportRatio parse(std::string_view text) {
    const auto fail = [&] { return ConfigError("minsup must be in (0,1], got '" + std::string(text) + "'"); };
    if (text.empty()) throw fail();
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
      return SupportRatio(parse_digits(text.substr(0, slash), fail),
                          parse_digits(text.substr(slash + 1), fail));
    }
    const auto dot = text.find('.');
    std::string_view whole = text.substr(0, dot);
    std::string_view frac = dot == std::string_view::npos ? std::string_view{} : text.substr(dot + 1);
    if (whole.empty() && frac.empty()) throw fail();
    if (frac.size() > 15) throw fail();
    std::uint64_t den = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
    const std::uint64_t w = whole.empty() ? 0 : parse_digits(whole, fail);
    const std::uint64_t f = frac.empty() ? 0 : parse_digits(frac, fail);
    if (w > 1) throw fail();
    const std::uint64_t num = w * den + f;
    if (num == 0 || num > den) throw fail();
    return SupportRatio(num, den);
  }

  std::uint64_t num() const noexcept { return num_; }
  std::uint64_t den() const noexcept { return den_; }
  double value() const noexcept { return static_cast<double>(num_) / static_cast<double>(den_); }

  std::string str() const {
    return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_);
  }

  friend bool operator==(const SupportRatio&, const SupportRatio&) = default;
  friend auto operator<=>(const SupportRatio& a, const SupportRatio& b) {
    return a.num_ * b.den_ <=> b.num_ * a.den_;
  }

 private:
  template <typename Fail>
  static std::uint64_t parse_digits(std::string_view s, const Fail& fail) {
    if (s.empty() || s.size() > 18) throw fail();
    std::uint64_t v = 0;
    for (char c : s) {
      if (c < '0' || c > '9') throw fail();
      v = v * 10 + static_cast<std::uint64_t>(c - '0');
    }
    return v;
  }

  std::uint64_t num_ = 1;
  std::uint64_t den_ = 1;
};

enum class Mode { SupportCoupled, Boolean };

inline std::string_view to_string(Mode m) noexcept {
  return m == Mode::Boolean ? "boolean" : "support-coupled";
}

struct MinerConfig {
  Timestamp poi = 1;
  SupportRatio minsup{1, 2};
  Mode mode = Mode::SupportCoupled;
  std::size_t max_element_size = 12;

  void validate() const {
    if (poi < 1) throw ConfigError("poi must be >= 1");
    if (max_element_size < 1) throw ConfigError("max_element_size must be >= 1");
  }
};

struct TimestampReport {
  Timestamp ts = 0;
  std::size_t db_size = 0;
  std::vector<ReportedPattern> patterns;

  friend bool operator==(const TimestampReport&, const TimestampReport&) = default;
};

/// ceil(minsup * db_size). Callers also require db_size > 0 before emitting.
inline std::size_t frequency_threshold(std::size_t db_size, const SupportRatio& minsup) noexcept {
  const auto n = static_cast<std::uint64_t>(db_size) * minsup.num();
  return static_cast<std::size_t>((n + minsup.den() - 1) / minsup.den());
}

inline bool is_frequent(std::size_t support, std::size_t db_size, const SupportRatio& minsup) noexcept {
  return db_size > 0 && support >= frequency_threshold(db_size, minsup);
}

}  // namespace prosupmine
