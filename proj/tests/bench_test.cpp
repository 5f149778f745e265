#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "prosupmine/bench.hpp"
#include "prosupmine/oracle.hpp"
#include "test_support.hpp"

using namespace prosupmine;
using namespace prosupmine::bench;
using prosupmine::testing::L;

namespace {

std::vector<TickBatch> pinned_small() { return dataio::generate_stream({6, 5, 12, 0.6, 3, 3, 42}); }

std::size_t oracle_total(const std::vector<TickBatch>& stream, Timestamp poi, SupportRatio minsup, Mode mode) {
  const auto events = dataio::flatten(stream);
  std::size_t n = 0;
  for (const auto& b : stream) n += oracle::mine_bruteforce(events, b.ts, poi, minsup, mode).patterns.size();
  return n;
}

}  // namespace

TEST(RunSweep, RowsInSpecOrder) {
  SweepSpec spec{pinned_small(), {2, 4, 8}, {SupportRatio(1, 2)}, {Mode::SupportCoupled}, 1, 12};
  const auto result = run_sweep(spec);
  ASSERT_EQ(result.rows.size(), 3u);
  EXPECT_EQ(result.rows[0].poi, 2);
  EXPECT_EQ(result.rows[1].poi, 4);
  EXPECT_EQ(result.rows[2].poi, 8);
  for (const auto& r : result.rows) {
    EXPECT_GE(r.mean_exec_time_ns, 0);
    EXPECT_GE(r.peak_node_count, 1u);
  }
  EXPECT_TRUE(result.violations.empty());
}

TEST(RunSweep, MinsupAntitonicityMatchesOracleCounts) {
  const auto stream = pinned_small();
  const std::vector<SupportRatio> ms = {SupportRatio(1, 4), SupportRatio(1, 2), SupportRatio(3, 4)};
  SweepSpec spec{stream, {3}, ms, {Mode::SupportCoupled}, 1, 12};
  const auto result = run_sweep(spec);
  ASSERT_EQ(result.rows.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i)
    EXPECT_EQ(result.rows[i].total_patterns, oracle_total(stream, 3, ms[i], Mode::SupportCoupled));
  EXPECT_GE(result.rows[0].total_patterns, result.rows[1].total_patterns);
  EXPECT_GE(result.rows[1].total_patterns, result.rows[2].total_patterns);
  EXPECT_TRUE(result.violations.empty());
}

TEST(RunSweep, ModeInequality) {
  const auto stream = dataio::generate_stream({8, 5, 20, 0.6, 3, 3, 42});
  SweepSpec spec{stream, {2, 4}, {SupportRatio(1, 4), SupportRatio(1, 2)}, {Mode::Boolean, Mode::SupportCoupled}, 1, 12};
  const auto result = run_sweep(spec);
  ASSERT_EQ(result.rows.size(), 8u);
  for (std::size_t i = 0; i < result.rows.size(); i += 2) {
    EXPECT_EQ(result.rows[i].mode, Mode::Boolean);
    EXPECT_GE(result.rows[i].total_patterns, result.rows[i + 1].total_patterns);
  }
  EXPECT_TRUE(result.violations.empty());
}

TEST(RunSweep, RejectsEmptyLists) {
  EXPECT_THROW(run_sweep(SweepSpec{pinned_small(), {}, {SupportRatio(1, 2)}, {Mode::Boolean}, 1, 12}), ConfigError);
  EXPECT_THROW(run_sweep(SweepSpec{pinned_small(), {1}, {SupportRatio(1, 2)}, {Mode::Boolean}, 0, 12}), ConfigError);
}

TEST(CompareModes, PinnedStreamHasNoViolations) {
  const auto stream = dataio::generate_stream({20, 10, 30, 0.5, 3, 3, 42});
  const auto cmp = compare_modes(stream, 4, SupportRatio(1, 4));
  EXPECT_EQ(cmp.ticks.size(), stream.size());
  EXPECT_TRUE(cmp.violations.empty());
}

TEST(CompareModes, UnitQuantitiesGiveIdenticalCounts) {
  const auto stream = dataio::generate_stream({6, 5, 20, 0.6, 3, 1, 8});
  for (const auto& t : compare_modes(stream, 3, SupportRatio(1, 2)).ticks) EXPECT_EQ(t.boolean_count, t.coupled_count);
}

TEST(CompareModes, WorkedTraceIdenticalCounts) {
  const auto cmp = compare_modes(prosupmine::testing::worked_trace(), 3, SupportRatio(1, 2));
  ASSERT_EQ(cmp.ticks.size(), 2u);
  EXPECT_EQ(cmp.ticks[0].boolean_count, 1u);
  EXPECT_EQ(cmp.ticks[1].boolean_count, 3u);
  for (const auto& t : cmp.ticks) EXPECT_EQ(t.boolean_count, t.coupled_count);
}

TEST(CompareModes, QuantityVariantsCollapse) {
  // A:1 and A:2 in one window: coupled reports <A> once, as does boolean.
  const std::vector<TickBatch> stream = {TickBatch{1, {{"S", L({{"A", 1}})}}}, TickBatch{2, {{"S", L({{"A", 2}})}}}};
  const auto cmp = compare_modes(stream, 2, SupportRatio(1, 1));
  EXPECT_TRUE(cmp.violations.empty());
  EXPECT_EQ(cmp.ticks[1].boolean_count, 1u);
  EXPECT_EQ(cmp.ticks[1].coupled_count, 1u);
}

TEST(RankCorrelation, Basics) {
  const std::vector<double> x = {1, 2, 3, 4};
  EXPECT_DOUBLE_EQ(rank_correlation(x, std::vector<double>{10, 20, 30, 40}), 1.0);
  EXPECT_DOUBLE_EQ(rank_correlation(x, std::vector<double>{4, 3, 2, 1}), -1.0);
  EXPECT_DOUBLE_EQ(rank_correlation(x, std::vector<double>{5, 5, 5, 5}), 0.0);
  EXPECT_GT(rank_correlation(x, std::vector<double>{1, 3, 2, 4}), 0.0);
}

TEST(Outputs, CsvSchemaAndFigureFiles) {
  SweepSpec spec{pinned_small(), {2, 3}, {SupportRatio(1, 2)}, {Mode::Boolean, Mode::SupportCoupled}, 1, 12};
  const auto result = run_sweep(spec);
  const auto csv = sweep_csv(result.rows);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "poi,minsup,mode,total_patterns,mean_exec_time_ns,peak_node_count");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 5);

  const auto dir = std::filesystem::temp_directory_path() / "prosupmine_bench_test";
  std::filesystem::remove_all(dir);
  write_outputs(dir, result.rows);
  for (const char* f : {"sweep.csv", "fig5.dat", "fig6.dat", "fig7.dat"}) {
    ASSERT_TRUE(std::filesystem::exists(dir / f)) << f;
    EXPECT_GT(std::filesystem::file_size(dir / f), 40u) << f;
  }
  std::ifstream fig7(dir / "fig7.dat");
  std::string header, row;
  std::getline(fig7, header);
  std::getline(fig7, row);
  EXPECT_EQ(row.find("NaN"), std::string::npos);
  std::filesystem::remove_all(dir);
}
