#include "gridhtm/aggregation.hpp"

#include <algorithm>

#include "gridhtm/errors.hpp"

namespace gridhtm {

std::string_view to_string(AggregationKind kind) {
  switch (kind) {
    case AggregationKind::Mean:
      return "mean";
    case AggregationKind::NonZeroMean:
      return "nonzero_mean";
  }
  return "unknown";
}

std::optional<AggregationKind> parse_aggregation(std::string_view name) {
  if (name == "mean") return AggregationKind::Mean;
  if (name == "nonzero_mean") return AggregationKind::NonZeroMean;
  return std::nullopt;
}

double aggregate_mean(std::span<const double> scores) {
  detail::require(!scores.empty(), "aggregate_mean: empty score set");
  double sum = 0.0;
  for (double x : scores) sum += x;
  return sum / static_cast<double>(scores.size());
}

double aggregate_nonzero_mean(std::span<const double> scores) {
  detail::require(!scores.empty(), "aggregate_nonzero_mean: empty score set");
  double sum = 0.0;
  std::size_t n = 0;
  for (double x : scores) {
    if (x > 0.0) {
      sum += x;
      ++n;
    }
  }
  return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

double aggregate(AggregationKind kind, std::span<const double> scores) {
  return kind == AggregationKind::Mean ? aggregate_mean(scores) : aggregate_nonzero_mean(scores);
}

namespace {

// Summing the window from oldest to newest keeps the batch and streaming
// forms bit-identical.
template <typename It>
double window_mean(It first, It last) {
  double sum = 0.0;
  std::size_t n = 0;
  for (; first != last; ++first, ++n) sum += *first;
  return sum / static_cast<double>(n);
}

}  // namespace

std::vector<double> moving_average(std::span<const double> series, std::size_t window) {
  detail::require_config(window >= 1, "moving_average: window must be >= 1");
  std::vector<double> out;
  out.reserve(series.size());
  for (std::size_t i = 0; i < series.size(); ++i) {
    const std::size_t start = i + 1 >= window ? i + 1 - window : 0;
    out.push_back(window_mean(series.begin() + static_cast<std::ptrdiff_t>(start),
                              series.begin() + static_cast<std::ptrdiff_t>(i + 1)));
  }
  return out;
}

MovingAverage::MovingAverage(std::size_t window) : window_(window) {
  detail::require_config(window >= 1, "moving average window must be >= 1");
}

double MovingAverage::push(double value) {
  values_.push_back(value);
  if (values_.size() > window_) values_.pop_front();
  return window_mean(values_.begin(), values_.end());
}

}  // namespace gridhtm
