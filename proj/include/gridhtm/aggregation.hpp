#pragma once

#include <cstddef>
#include <deque>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gridhtm {

enum class AggregationKind { Mean, NonZeroMean };

std::string_view to_string(AggregationKind kind);
/// Accepts "mean" and "nonzero_mean".
std::optional<AggregationKind> parse_aggregation(std::string_view name);

/// Arithmetic mean over every score, zeros included.
double aggregate_mean(std::span<const double> scores);

/// Mean over the strictly positive scores; 0 when there are none.
double aggregate_nonzero_mean(std::span<const double> scores);

double aggregate(AggregationKind kind, std::span<const double> scores);

/// Trailing moving average. Element i is the mean of the last
/// min(i + 1, window) inputs, so the output aligns with the input.
std::vector<double> moving_average(std::span<const double> series, std::size_t window);

/// Streaming form of moving_average; push() yields the same values, bit for
/// bit, as the batch function would at that index.
class MovingAverage {
 public:
  explicit MovingAverage(std::size_t window);

  double push(double value);
  void clear() { values_.clear(); }

  std::size_t window() const noexcept { return window_; }
  const std::deque<double>& values() const noexcept { return values_; }

  friend bool operator==(const MovingAverage&, const MovingAverage&) = default;

 private:
  friend struct SnapshotAccess;
  MovingAverage() = default;

  std::size_t window_ = 1;
  std::deque<double> values_;
};

}  // namespace gridhtm
