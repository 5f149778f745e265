#include <gtest/gtest.h>

#include <algorithm>

#include "prosupmine/core_model.hpp"
#include "prosupmine/dataio.hpp"
#include "test_support.hpp"

using namespace prosupmine;
using prosupmine::testing::L;
using prosupmine::testing::P;

TEST(Item, RejectsReservedSeparatorsAndBlanks) {
  EXPECT_NO_THROW(Item("bread"));
  for (const char* bad : {"", "a,b", "a;b", "a:b", "a|b", "a b", "a\tb"})
    EXPECT_THROW(Item{std::string(bad)}, InvalidLabel) << bad;
}

TEST(Item, CaseSensitiveLexicographicOrder) {
  EXPECT_LT(Item("A"), Item("B"));
  EXPECT_LT(Item("B"), Item("a"));
  EXPECT_NE(Item("a"), Item("A"));
}

TEST(ElementLabel, CanonicalizesAndMergesWithMaxQuantity) {
  const auto label = ElementLabel::from({{Item("B"), 1}, {Item("A"), 2}, {Item("B"), 3}});
  ASSERT_EQ(label.size(), 2u);
  EXPECT_EQ(label.items()[0], (QuantifiedItem{Item("A"), 2}));
  EXPECT_EQ(label.items()[1], (QuantifiedItem{Item("B"), 3}));
}

TEST(ElementLabel, RejectsEmptyAndZeroQuantity) {
  EXPECT_THROW(ElementLabel::from({}), InvalidLabel);
  EXPECT_THROW(ElementLabel::from({{Item("A"), 0}}), InvalidLabel);
}

TEST(ElementLabel, EqualityIncludesQuantities) {
  EXPECT_NE(L({{"A", 2}}), L({{"A", 3}}));
  EXPECT_TRUE(L({{"A", 2}}).same_items(L({{"A", 3}})));
  EXPECT_FALSE(L({{"A", 2}}).same_items(L({{"A", 2}, {"B", 1}})));
}

TEST(ElementLabel, OrderIsTotalAndSortIsIdempotent) {
  dataio::PortableRng rng(7);
  std::vector<ElementLabel> labels;
  const char* names[] = {"A", "B", "C", "D"};
  for (int i = 0; i < 200; ++i) {
    std::vector<QuantifiedItem> items;
    const auto n = rng.uniform(1, 3);
    for (std::uint64_t k = 0; k < n; ++k)
      items.push_back({Item(names[rng.uniform(0, 3)]), static_cast<Quantity>(rng.uniform(1, 3))});
    labels.push_back(ElementLabel::from(std::move(items)));
  }
  for (const auto& a : labels) {
    for (const auto& b : labels) {
      const int holds = int(a < b) + int(a == b) + int(b < a);
      ASSERT_EQ(holds, 1);
    }
  }
  auto sorted = labels;
  std::sort(sorted.begin(), sorted.end());
  auto again = sorted;
  std::sort(again.begin(), again.end());
  EXPECT_EQ(sorted, again);
}

TEST(Skeleton, StripsQuantities) {
  EXPECT_EQ(skeleton(P({L({{"A", 2}}), L({{"B", 1}})})), (Skeleton{{"A"}, {"B"}}));
  EXPECT_EQ(skeleton(P({L({{"A", 1}})})), (Skeleton{{"A"}}));
  EXPECT_EQ(skeleton(P({L({{"A", 2}, {"B", 3}})})), (Skeleton{{"A", "B"}}));
}

TEST(Skeleton, IdempotentAndLengthPreserving) {
  const auto p = P({L({{"A", 2}, {"C", 1}}), L({{"B", 3}})});
  const auto s = skeleton(p);
  Pattern stripped;
  for (const auto& set : s) {
    std::vector<QuantifiedItem> items;
    for (const auto& n : set) items.push_back({Item(n), 1});
    stripped.elements.push_back(ElementLabel::from(items));
  }
  EXPECT_EQ(skeleton(stripped), s);
  EXPECT_EQ(s.size(), p.elements.size());
}

TEST(Pattern, WellFormedRejectsRepeatedItemSets) {
  EXPECT_TRUE(well_formed(P({L({{"A", 1}}), L({{"B", 1}})})));
  EXPECT_FALSE(well_formed(P({L({{"A", 1}}), L({{"A", 1}})})));
  EXPECT_FALSE(well_formed(P({L({{"A", 1}}), L({{"A", 2}})})));
  EXPECT_TRUE(well_formed(P({L({{"A", 1}}), L({{"A", 1}, {"B", 1}})})));
  EXPECT_FALSE(well_formed(Pattern{}));
}

TEST(SupportRatio, ParsesDecimalsExactly) {
  EXPECT_EQ(SupportRatio::parse("0.5"), SupportRatio(1, 2));
  EXPECT_EQ(SupportRatio::parse("0.25"), SupportRatio(1, 4));
  EXPECT_EQ(SupportRatio::parse("1"), SupportRatio(1, 1));
  EXPECT_EQ(SupportRatio::parse("1.0"), SupportRatio(1, 1));
  EXPECT_EQ(SupportRatio::parse(".1"), SupportRatio(1, 10));
  EXPECT_EQ(SupportRatio::parse("1/3"), SupportRatio(1, 3));
  for (const char* bad : {"", "0", "0.0", "1.5", "2", "-0.5", "abc", "0.5.1", "/", "3/2"})
    EXPECT_THROW(SupportRatio::parse(bad), ConfigError) << bad;
}

TEST(FrequencyThreshold, CeilOfRatioTimesDbSize) {
  EXPECT_EQ(frequency_threshold(4, SupportRatio(1, 2)), 2u);
  EXPECT_EQ(frequency_threshold(0, SupportRatio(1, 2)), 0u);
  EXPECT_FALSE(is_frequent(0, 0, SupportRatio(1, 2)));
  EXPECT_EQ(frequency_threshold(3, SupportRatio(1, 2)), 2u);
  // 0.1 * 30 is 3 exactly, not 3.0000000000000004.
  EXPECT_EQ(frequency_threshold(30, SupportRatio::parse("0.1")), 3u);
  EXPECT_EQ(frequency_threshold(7, SupportRatio(1, 1)), 7u);
}

TEST(FrequencyThreshold, MonotoneInBothArguments) {
  const std::vector<SupportRatio> ratios = {SupportRatio::parse("0.05"), SupportRatio(1, 4), SupportRatio(1, 3),
                                            SupportRatio(1, 2), SupportRatio(3, 4), SupportRatio(1, 1)};
  for (std::size_t db = 0; db < 60; ++db) {
    for (std::size_t i = 0; i < ratios.size(); ++i) {
      EXPECT_LE(frequency_threshold(db, ratios[i]), frequency_threshold(db + 1, ratios[i]));
      if (i + 1 < ratios.size()) {
        EXPECT_LE(frequency_threshold(db, ratios[i]), frequency_threshold(db, ratios[i + 1]));
      }
    }
  }
}

TEST(MinerConfig, Validation) {
  MinerConfig c;
  EXPECT_NO_THROW(c.validate());
  c.poi = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c.poi = 1;
  c.max_element_size = 0;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(CanonicalOrder, LengthThenSkeleton) {
  std::vector<ReportedPattern> ps(3);
  ps[0].skeleton = {{"A"}, {"B"}};
  ps[1].skeleton = {{"B"}};
  ps[2].skeleton = {{"A"}};
  sort_canonical(ps);
  EXPECT_EQ(ps[0].skeleton, (Skeleton{{"A"}}));
  EXPECT_EQ(ps[1].skeleton, (Skeleton{{"B"}}));
  EXPECT_EQ(ps[2].skeleton, (Skeleton{{"A"}, {"B"}}));
}
