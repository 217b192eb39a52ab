#include "gridhtm/aggregation.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "gridhtm/errors.hpp"

namespace gridhtm {
namespace {

using Scores = std::vector<double>;

TEST(AggregateMean, Examples) {
  EXPECT_EQ(aggregate_mean(Scores{0, 0, 0.5, 1.0}), 0.375);
  EXPECT_EQ(aggregate_mean(Scores{0, 0, 0}), 0.0);
  EXPECT_EQ(aggregate_mean(Scores{1.0}), 1.0);
}

TEST(AggregateNonZeroMean, Examples) {
  EXPECT_EQ(aggregate_nonzero_mean(Scores{0, 0, 0.5, 1.0}), 0.75);
  EXPECT_EQ(aggregate_nonzero_mean(Scores{0, 0, 0, 0}), 0.0);
  EXPECT_EQ(aggregate_nonzero_mean(Scores{0.2}), 0.2);
}

TEST(Aggregate, EmptyInputIsContractError) {
  EXPECT_THROW(aggregate_mean(Scores{}), ContractError);
  EXPECT_THROW(aggregate_nonzero_mean(Scores{}), ContractError);
}

TEST(Aggregate, DispatchesOnKind) {
  const Scores s{0, 0.5, 1.0, 0};
  EXPECT_EQ(aggregate(AggregationKind::Mean, s), aggregate_mean(s));
  EXPECT_EQ(aggregate(AggregationKind::NonZeroMean, s), aggregate_nonzero_mean(s));
}

TEST(AggregationKind, NamesRoundTrip) {
  for (AggregationKind k : {AggregationKind::Mean, AggregationKind::NonZeroMean}) {
    EXPECT_EQ(parse_aggregation(to_string(k)), k);
  }
  EXPECT_EQ(parse_aggregation("median"), std::nullopt);
}

TEST(Aggregate, NonZeroMeanDominatesMean) {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> value(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    Scores s(1 + gen() % 50);
    for (double& x : s) x = gen() % 3 == 0 ? 0.0 : value(gen);
    EXPECT_GE(aggregate_nonzero_mean(s), aggregate_mean(s));
  }
}

TEST(Aggregate, ZerosDiluteMeanButNotNonZeroMean) {
  std::mt19937_64 gen(9);
  std::uniform_real_distribution<double> value(0.01, 1.0);
  for (int i = 0; i < 200; ++i) {
    Scores s(1 + gen() % 20);
    for (double& x : s) x = value(gen);
    Scores padded = s;
    padded.resize(s.size() + 1 + gen() % 30, 0.0);
    EXPECT_EQ(aggregate_nonzero_mean(padded), aggregate_nonzero_mean(s));
    EXPECT_LT(aggregate_mean(padded), aggregate_mean(s));
  }
}

TEST(MovingAverage, Examples) {
  const Scores series{0.3, 0.1, 0.7};
  EXPECT_EQ(moving_average(series, 1), series);
  EXPECT_EQ(moving_average(Scores(6, 0.25), 4), Scores(6, 0.25));
  EXPECT_EQ(moving_average(Scores{0, 0, 1, 1}, 2), (Scores{0, 0, 0.5, 1.0}));
}

TEST(MovingAverage, WarmUpUsesPrefix) {
  EXPECT_EQ(moving_average(Scores{1, 3, 5, 7}, 3), (Scores{1, 2, 3, 5}));
}

TEST(MovingAverage, ZeroWindowIsConfigError) {
  EXPECT_THROW(moving_average(Scores{1.0}, 0), ConfigError);
  EXPECT_THROW(MovingAverage(0), ConfigError);
}

TEST(MovingAverage, BoundedByInputRange) {
  std::mt19937_64 gen(21);
  std::uniform_real_distribution<double> value(0.0, 1.0);
  Scores series(500);
  for (double& x : series) x = value(gen);
  const auto [lo, hi] = std::minmax_element(series.begin(), series.end());
  for (double y : moving_average(series, 37)) {
    EXPECT_GE(y, *lo);
    EXPECT_LE(y, *hi);
  }
}

TEST(MovingAverage, StreamingMatchesBatchExactly) {
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> value(0.0, 1.0);
  Scores series(300);
  for (double& x : series) x = value(gen);
  MovingAverage stream(20);
  const Scores batch = moving_average(series, 20);
  for (std::size_t i = 0; i < series.size(); ++i) EXPECT_EQ(stream.push(series[i]), batch[i]);
}

TEST(MovingAverage, ClearRestartsWarmUp) {
  MovingAverage stream(3);
  stream.push(1.0);
  stream.push(1.0);
  stream.clear();
  EXPECT_EQ(stream.push(4.0), 4.0);
}

}  // namespace
}  // namespace gridhtm
