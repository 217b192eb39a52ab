#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "gridhtm/sdr.hpp"

namespace gridhtm {

struct SpParams {
  std::size_t input_width = 144;
  std::size_t column_count = 256;
  /// Winners per step. Defaults to 1/16 of the columns.
  std::size_t active_columns = 16;
  /// Fraction of input bits each column may connect to.
  double potential_fraction = 0.85;
  double connected_threshold = 0.2;
  double permanence_increment = 0.05;
  double permanence_decrement = 0.008;
  /// Initial permanences are uniform in connected_threshold +/- this.
  double initial_permanence_band = 0.1;
  std::size_t stimulus_threshold = 1;
  bool boosting_enabled = false;
  double boost_strength = 1.0;
  std::size_t duty_cycle_period = 1000;
  std::uint64_t seed = 0;

  /// Throws ConfigError describing the first invalid field.
  void validate() const;

  friend bool operator==(const SpParams&, const SpParams&) = default;
};

/// Global-inhibition spatial pooler.
///
/// Each column holds a fixed potential pool over the input with one
/// permanence per pooled bit. Overlap counts connected synapses on active
/// bits; the `active_columns` highest-overlap columns at or above
/// `stimulus_threshold` win (ties go to the lower column index).
///
/// Single-writer: do not call compute() concurrently on one instance.
class SpatialPooler {
 public:
  explicit SpatialPooler(const SpParams& params);

  /// Maps `input` to an output SDR of width column_count. With learn=false
  /// the pooler state is untouched.
  Sdr compute(const Sdr& input, bool learn);

  const SpParams& params() const noexcept { return params_; }
  std::size_t pool_size() const noexcept { return pool_size_; }
  std::uint64_t step_count() const noexcept { return step_count_; }

  std::span<const BitIndex> potential_pool(std::size_t column) const;
  std::span<const float> permanences(std::size_t column) const;
  std::span<const double> boost_factors() const noexcept { return boost_; }

  std::vector<std::byte> snapshot() const;
  static SpatialPooler restore(std::span<const std::byte> bytes);

  friend bool operator==(const SpatialPooler&, const SpatialPooler&) = default;

 private:
  friend struct SnapshotAccess;
  SpatialPooler() = default;

  void update_boosting(const std::vector<BitIndex>& winners);

  SpParams params_;
  std::size_t pool_size_ = 0;
  // column c owns [c * pool_size_, (c + 1) * pool_size_) in both arrays
  std::vector<BitIndex> pools_;
  std::vector<float> permanences_;
  std::vector<double> active_duty_;
  std::vector<double> boost_;
  std::uint64_t step_count_ = 0;
};

}  // namespace gridhtm
