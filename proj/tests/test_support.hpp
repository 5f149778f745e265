#pragma once

#include <string>
#include <vector>

#include "prosupmine/core_model.hpp"
#include "prosupmine/dataio.hpp"

namespace prosupmine::testing {

inline ElementLabel L(std::initializer_list<std::pair<const char*, Quantity>> items) {
  return ElementLabel::of(items);
}

inline Pattern P(std::initializer_list<ElementLabel> elements) { return Pattern{elements}; }

/// S01: 2A at t1, B at t2.
inline std::vector<TickBatch> worked_trace() {
  return {TickBatch{1, {{"S01", L({{"A", 2}})}}}, TickBatch{2, {{"S01", L({{"B", 1}})}}}};
}

inline ReportedPattern RP(Skeleton skel, std::vector<std::map<std::string, Quantity>> q, std::size_t support,
                          std::size_t db) {
  return ReportedPattern{std::move(skel), std::move(q), support, static_cast<double>(support) / static_cast<double>(db)};
}

struct FuzzCase {
  std::vector<TickBatch> stream;
  Timestamp poi = 1;
  dataio::GeneratorParams params;
};

/// Desk-scale random stream: <=6 sequences, <=5 items, qty <=3, <=12 ticks,
/// element size <=3.
inline FuzzCase fuzz_case(std::uint64_t index, std::uint64_t master_seed = 20240601) {
  dataio::PortableRng rng(master_seed * 1000003ULL + index);
  static constexpr double kArrival[] = {0.3, 0.5, 0.8, 1.0};
  FuzzCase c;
  c.params.n_sequences = rng.uniform(1, 6);
  c.params.n_items = rng.uniform(1, 5);
  c.params.n_ticks = rng.uniform(1, 12);
  c.params.arrival_prob = kArrival[rng.uniform(0, 3)];
  c.params.element_size_max = rng.uniform(1, 3);
  c.params.qty_max = static_cast<Quantity>(rng.uniform(1, 3));
  c.params.seed = rng.uniform(0, ~0ULL - 1);
  c.poi = static_cast<Timestamp>(1 + index % 4);
  c.stream = dataio::generate_stream(c.params);
  return c;
}

}  // namespace prosupmine::testing
