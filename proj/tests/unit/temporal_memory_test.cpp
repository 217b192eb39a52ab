#include "gridhtm/temporal_memory.hpp"

#include <gtest/gtest.h>

#include <numeric>
#include <random>

#include "gridhtm/errors.hpp"

namespace gridhtm {
namespace {

TmParams params(std::size_t columns = 64) {
  TmParams p;
  p.column_count = columns;
  p.seed = 17;
  return p;
}

// Disjoint blocks of `width` columns starting at `first`.
Sdr block(std::size_t columns, BitIndex first, BitIndex width) {
  std::vector<BitIndex> bits(width);
  std::iota(bits.begin(), bits.end(), first);
  return Sdr(columns, bits);
}

std::vector<Sdr> cycle_abc() { return {block(64, 0, 10), block(64, 10, 10), block(64, 20, 10)}; }

void train(TemporalMemory& tm, const std::vector<Sdr>& cycle, int repetitions) {
  for (int r = 0; r < repetitions; ++r) {
    for (const Sdr& s : cycle) tm.compute(s, true);
  }
}

double replay_mean(TemporalMemory& tm, const std::vector<Sdr>& cycle) {
  double total = 0;
  for (const Sdr& s : cycle) total += tm.compute(s, false).anomaly_score;
  return total / static_cast<double>(cycle.size());
}

TEST(TemporalMemory, FirstStepIsFullyAnomalous) {
  TemporalMemory tm(params());
  const TmStepResult r = tm.compute(block(64, 5, 7), true);
  EXPECT_EQ(r.anomaly_score, 1.0);
  EXPECT_EQ(r.active_column_count, 7u);
}

TEST(TemporalMemory, EmptyInputScoresZero) {
  TemporalMemory tm(params());
  EXPECT_EQ(tm.compute(Sdr(64), true).anomaly_score, 0.0);
  train(tm, cycle_abc(), 3);
  EXPECT_EQ(tm.compute(Sdr(64), true).anomaly_score, 0.0);
}

TEST(TemporalMemory, LearnsRepeatingCycle) {
  TemporalMemory tm(params());
  const auto cycle = cycle_abc();
  train(tm, cycle, 50);
  for (int r = 0; r < 2; ++r) {
    for (const Sdr& s : cycle) EXPECT_EQ(tm.compute(s, true).anomaly_score, 0.0);
  }
}

TEST(TemporalMemory, AnomalyIsFractionOfUnpredictedColumns) {
  TemporalMemory tm(params());
  const auto cycle = cycle_abc();
  train(tm, cycle, 20);
  tm.compute(cycle[0], true);
  // B is expected next; half the active columns come from B, half are new
  std::vector<BitIndex> mixed;
  for (BitIndex i = 10; i < 15; ++i) mixed.push_back(i);
  for (BitIndex i = 40; i < 45; ++i) mixed.push_back(i);
  EXPECT_DOUBLE_EQ(tm.compute(Sdr(64, mixed), false).anomaly_score, 0.5);
}

TEST(TemporalMemory, PredictiveColumnCountTracksPrediction) {
  TemporalMemory tm(params());
  const auto cycle = cycle_abc();
  train(tm, cycle, 20);
  EXPECT_EQ(tm.compute(cycle[0], false).predictive_column_count, 10u);
}

TEST(TemporalMemory, ResetForgetsContextOnly) {
  TemporalMemory tm(params());
  const auto cycle = cycle_abc();
  train(tm, cycle, 30);
  const std::size_t segments = tm.segment_count();
  tm.reset();
  EXPECT_TRUE(tm.active_cells().empty());
  EXPECT_TRUE(tm.predictive_cells().empty());
  EXPECT_EQ(tm.segment_count(), segments);
  EXPECT_EQ(tm.compute(cycle[0], false).anomaly_score, 1.0);
  EXPECT_EQ(tm.compute(cycle[1], false).anomaly_score, 0.0);
  EXPECT_EQ(tm.compute(cycle[2], false).anomaly_score, 0.0);
}

TEST(TemporalMemory, ResetOnFreshInstanceIsNoOp) {
  TemporalMemory tm(params());
  tm.reset();
  EXPECT_EQ(tm, TemporalMemory(params()));
}

TEST(TemporalMemory, ReproducibleFromSeed) {
  TemporalMemory a(params());
  TemporalMemory b(params());
  std::mt19937 gen(1);
  for (int i = 0; i < 200; ++i) {
    std::vector<BitIndex> bits;
    for (BitIndex c = 0; c < 64; ++c) {
      if (gen() % 6 == 0) bits.push_back(c);
    }
    const Sdr s(64, bits);
    ASSERT_EQ(a.compute(s, true).anomaly_score, b.compute(s, true).anomaly_score);
  }
  EXPECT_EQ(a, b);
}

TEST(TemporalMemory, RespectsSegmentAndSynapseCaps) {
  TmParams p = params();
  p.max_segments_per_cell = 2;
  p.max_synapses_per_segment = 6;
  p.new_synapse_count = 5;
  p.activation_threshold = 3;
  p.min_threshold = 2;
  TemporalMemory tm(p);
  std::mt19937 gen(2);
  for (int i = 0; i < 400; ++i) {
    std::vector<BitIndex> bits;
    for (BitIndex c = 0; c < 64; ++c) {
      if (gen() % 8 == 0) bits.push_back(c);
    }
    tm.compute(Sdr(64, bits), true);
  }
  for (CellId cell = 0; cell < tm.cell_count(); ++cell) {
    ASSERT_LE(tm.segment_count(cell), 2u);
    for (const auto& segment : tm.segments_of(cell)) {
      ASSERT_LE(segment.size(), 6u);
      for (auto [pre, perm] : segment) {
        ASSERT_LT(pre, tm.cell_count());
        ASSERT_GE(perm, 0.0f);
        ASSERT_LE(perm, 1.0f);
      }
    }
  }
}

TEST(TemporalMemory, LearnsFastForgetsSlowly) {
  const auto cycle = cycle_abc();
  TemporalMemory trained(params());
  train(trained, cycle, 30);
  std::mt19937 gen(3);
  for (int i = 0; i < 1000; ++i) {
    // unrelated input drawn from the columns the cycle never uses
    std::vector<BitIndex> bits;
    for (BitIndex c = 30; c < 64; ++c) {
      if (gen() % 4 == 0) bits.push_back(c);
    }
    trained.compute(Sdr(64, bits), true);
  }
  trained.reset();
  TemporalMemory control(params());
  const double after_interference = replay_mean(trained, cycle);
  EXPECT_LT(after_interference, 1.0);
  EXPECT_LT(after_interference, replay_mean(control, cycle));
}

// Characterization: with single-frame input, holding A after an A/B
// alternation is flagged briefly, then settles to fully predicted.
TEST(TemporalMemory, ContextualLoopHidesHeldInput) {
  TemporalMemory tm(params());
  const Sdr a = block(64, 0, 10);
  const Sdr b = block(64, 10, 10);
  for (int i = 0; i < 60; ++i) {
    tm.compute(a, true);
    tm.compute(b, true);
  }
  tm.compute(a, true);
  std::vector<double> held;
  for (int i = 0; i < 6; ++i) held.push_back(tm.compute(a, true).anomaly_score);
  RecordProperty("held_scores", ::testing::PrintToString(held));
  EXPECT_EQ(held.front(), 1.0);
  for (std::size_t i = 3; i < held.size(); ++i) EXPECT_EQ(held[i], 0.0) << "repeat " << i;
}

TEST(TemporalMemory, RejectsBadParameters) {
  TmParams p = params();
  p.min_threshold = 9;
  p.activation_threshold = 8;
  EXPECT_THROW(TemporalMemory{p}, ConfigError);
  p = params();
  p.cells_per_column = 0;
  EXPECT_THROW(TemporalMemory{p}, ConfigError);
}

TEST(TemporalMemory, WidthMismatchIsContractError) {
  TemporalMemory tm(params());
  EXPECT_THROW(tm.compute(Sdr(63), true), ContractError);
}

TEST(TemporalMemory, SnapshotRoundTrip) {
  TemporalMemory tm(params());
  const auto cycle = cycle_abc();
  train(tm, cycle, 5);
  tm.compute(cycle[0], true);
  const auto bytes = tm.snapshot();
  TemporalMemory restored = TemporalMemory::restore(bytes);
  EXPECT_EQ(restored, tm);
  EXPECT_EQ(restored.snapshot(), bytes);
  for (int r = 0; r < 5; ++r) {
    for (const Sdr& s : cycle) {
      ASSERT_EQ(restored.compute(s, true).anomaly_score, tm.compute(s, true).anomaly_score);
    }
  }
  EXPECT_EQ(restored, tm);
}

}  // namespace
}  // namespace gridhtm
