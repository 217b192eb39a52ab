#include "gridhtm/spatial_pooler.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "gridhtm/errors.hpp"
#include "gridhtm/random.hpp"

namespace gridhtm {

void SpParams::validate() const {
  using detail::require_config;
  require_config(input_width > 0, "sp.input_width must be positive");
  require_config(column_count > 0, "sp.column_count must be positive");
  require_config(active_columns > 0, "sp.active_columns must be positive");
  require_config(active_columns <= column_count,
                 "sp.active_columns (" + std::to_string(active_columns) + ") exceeds sp.column_count (" +
                     std::to_string(column_count) + ")");
  require_config(potential_fraction > 0.0 && potential_fraction <= 1.0, "sp.potential_fraction must be in (0, 1]");
  require_config(connected_threshold > 0.0 && connected_threshold < 1.0, "sp.connected_threshold must be in (0, 1)");
  require_config(permanence_increment > 0.0, "sp.permanence_increment must be > 0");
  require_config(permanence_decrement >= 0.0, "sp.permanence_decrement must be >= 0");
  require_config(initial_permanence_band >= 0.0, "sp.initial_permanence_band must be >= 0");
  require_config(duty_cycle_period > 0, "sp.duty_cycle_period must be positive");
  require_config(std::llround(potential_fraction * static_cast<double>(input_width)) > 0,
                 "sp.potential_fraction leaves an empty potential pool");
}

SpatialPooler::SpatialPooler(const SpParams& params) : params_(params) {
  params_.validate();
  pool_size_ = static_cast<std::size_t>(std::llround(params_.potential_fraction * static_cast<double>(params_.input_width)));

  Rng rng(params_.seed);
  const std::size_t columns = params_.column_count;
  pools_.resize(columns * pool_size_);
  permanences_.resize(columns * pool_size_);

  std::vector<BitIndex> inputs(params_.input_width);
  const double lo = params_.connected_threshold - params_.initial_permanence_band;
  const double span = 2.0 * params_.initial_permanence_band;
  for (std::size_t c = 0; c < columns; ++c) {
    std::iota(inputs.begin(), inputs.end(), BitIndex{0});
    rng.choose_front(std::span<BitIndex>(inputs), pool_size_);
    auto pool = std::span<BitIndex>(pools_).subspan(c * pool_size_, pool_size_);
    std::copy_n(inputs.begin(), pool_size_, pool.begin());
    std::sort(pool.begin(), pool.end());
    for (std::size_t k = 0; k < pool_size_; ++k) {
      const double p = std::clamp(lo + span * rng.uniform(), 0.0, 1.0);
      permanences_[c * pool_size_ + k] = static_cast<float>(p);
    }
  }

  active_duty_.assign(columns, 0.0);
  boost_.assign(columns, 1.0);
}

std::span<const BitIndex> SpatialPooler::potential_pool(std::size_t column) const {
  return std::span<const BitIndex>(pools_).subspan(column * pool_size_, pool_size_);
}

std::span<const float> SpatialPooler::permanences(std::size_t column) const {
  return std::span<const float>(permanences_).subspan(column * pool_size_, pool_size_);
}

Sdr SpatialPooler::compute(const Sdr& input, bool learn) {
  detail::require(input.width() == params_.input_width,
                  "SpatialPooler::compute: input width " + std::to_string(input.width()) + " != " +
                      std::to_string(params_.input_width));

  const std::vector<std::uint8_t> dense = input.dense();
  const auto connected = static_cast<float>(params_.connected_threshold);
  const std::size_t columns = params_.column_count;

  std::vector<std::size_t> overlaps(columns, 0);
  std::vector<BitIndex> eligible;
  eligible.reserve(columns);
  for (std::size_t c = 0; c < columns; ++c) {
    const BitIndex* pool = pools_.data() + c * pool_size_;
    const float* perm = permanences_.data() + c * pool_size_;
    std::size_t count = 0;
    for (std::size_t k = 0; k < pool_size_; ++k) {
      count += static_cast<std::size_t>(dense[pool[k]] != 0 && perm[k] >= connected);
    }
    overlaps[c] = count;
    if (count >= params_.stimulus_threshold) eligible.push_back(static_cast<BitIndex>(c));
  }

  const std::size_t winners_wanted = std::min(params_.active_columns, eligible.size());
  if (params_.boosting_enabled) {
    std::partial_sort(eligible.begin(), eligible.begin() + static_cast<std::ptrdiff_t>(winners_wanted), eligible.end(),
                      [&](BitIndex a, BitIndex b) {
                        const double sa = static_cast<double>(overlaps[a]) * boost_[a];
                        const double sb = static_cast<double>(overlaps[b]) * boost_[b];
                        return sa != sb ? sa > sb : a < b;
                      });
  } else {
    std::partial_sort(eligible.begin(), eligible.begin() + static_cast<std::ptrdiff_t>(winners_wanted), eligible.end(),
                      [&](BitIndex a, BitIndex b) { return overlaps[a] != overlaps[b] ? overlaps[a] > overlaps[b] : a < b; });
  }
  std::vector<BitIndex> winners(eligible.begin(), eligible.begin() + static_cast<std::ptrdiff_t>(winners_wanted));
  std::sort(winners.begin(), winners.end());

  if (learn) {
    const auto inc = static_cast<float>(params_.permanence_increment);
    const auto dec = static_cast<float>(params_.permanence_decrement);
    for (BitIndex c : winners) {
      const BitIndex* pool = pools_.data() + c * pool_size_;
      float* perm = permanences_.data() + c * pool_size_;
      for (std::size_t k = 0; k < pool_size_; ++k) {
        const float next = dense[pool[k]] != 0 ? perm[k] + inc : perm[k] - dec;
        perm[k] = std::clamp(next, 0.0f, 1.0f);
      }
    }
    if (params_.boosting_enabled) update_boosting(winners);
    ++step_count_;
  }

  return Sdr(columns, std::move(winners));
}

void SpatialPooler::update_boosting(const std::vector<BitIndex>& winners) {
  const auto period = static_cast<double>(std::min<std::uint64_t>(step_count_ + 1, params_.duty_cycle_period));
  const double target = static_cast<double>(params_.active_columns) / static_cast<double>(params_.column_count);
  std::vector<std::uint8_t> won(params_.column_count, 0);
  for (BitIndex c : winners) won[c] = 1;
  for (std::size_t c = 0; c < params_.column_count; ++c) {
    active_duty_[c] = (active_duty_[c] * (period - 1.0) + static_cast<double>(won[c])) / period;
    boost_[c] = std::exp(-params_.boost_strength * (active_duty_[c] - target));
  }
}

}  // namespace gridhtm
