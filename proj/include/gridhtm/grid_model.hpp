#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "gridhtm/aggregation.hpp"
#include "gridhtm/bitmap.hpp"
#include "gridhtm/grid_encoder.hpp"
#include "gridhtm/sdr.hpp"
#include "gridhtm/spatial_pooler.hpp"
#include "gridhtm/temporal_memory.hpp"

namespace gridhtm {

/// Replacement parameters for one grid cell. Unset members fall back to
/// the grid defaults.
struct CellOverride {
  std::optional<SpParams> sp;
  std::optional<TmParams> tm;

  friend bool operator==(const CellOverride&, const CellOverride&) = default;
};

struct GridConfig {
  EncoderConfig encoder;
  /// Number of past SP outputs concatenated into the TM input; 1 disables
  /// multistep patterns.
  std::size_t multistep_n = 2;
  /// input_width is derived from the encoder; seed is mixed with the cell
  /// coordinate.
  SpParams default_sp;
  /// column_count is derived as SP column_count * multistep_n; seed is mixed
  /// with the cell coordinate.
  TmParams default_tm;
  std::map<CellCoord, CellOverride> per_cell_overrides;
  bool suppression_enabled = true;
  AggregationKind aggregation = AggregationKind::NonZeroMean;
  std::size_t smoothing_window = 200;
  std::uint64_t seed = 0;

  /// Throws ConfigError on the first problem found.
  void validate() const;

  /// Effective parameters of one cell, with derived widths and seeds.
  SpParams sp_params_for(CellCoord cell) const;
  TmParams tm_params_for(CellCoord cell) const;

  friend bool operator==(const GridConfig&, const GridConfig&) = default;
};

/// One grid cell: its own spatial pooler, temporal memory and SP history.
struct CellUnit {
  SpatialPooler sp;
  TemporalMemory tm;
  /// Last multistep_n SP outputs, oldest first. Zero SDRs until filled.
  std::vector<Sdr> history;
  /// Per-class emptiness of the previous frame.
  std::vector<std::uint8_t> prev_empty;
  /// TM input of the most recent step.
  Sdr last_tm_input;

  friend bool operator==(const CellUnit&, const CellUnit&) = default;
};

struct FrameResult {
  std::uint64_t frame_index = 0;
  Grid<double> raw_scores;
  /// raw_scores with empty-to-occupied transitions zeroed.
  Grid<double> reported_scores;
  /// Predictive column count per cell; lower is more certain.
  Grid<std::uint32_t> certainty;
  double aggregate = 0.0;
  double aggregate_smoothed = 0.0;

  friend bool operator==(const FrameResult&, const FrameResult&) = default;
};

/// Grid of independent SP + TM units over a segmented frame stream.
///
/// Frames must be fed strictly in order. Within a frame the cells share no
/// mutable state, so they are processed in parallel when enabled; results
/// are identical to sequential processing. The model itself is
/// single-writer.
class GridModel {
 public:
  explicit GridModel(GridConfig config);

  FrameResult step(std::span<const Bitmap> planes, bool learn);

  const GridConfig& config() const noexcept { return config_; }
  CellCoord grid_size() const noexcept { return grid_size_; }
  std::uint64_t frames_seen() const noexcept { return frames_seen_; }

  const CellUnit& cell(CellCoord coord) const;
  const Sdr& tm_input(CellCoord coord) const { return cell(coord).last_tm_input; }

  void set_parallel(bool enabled) noexcept { parallel_ = enabled; }
  bool parallel() const noexcept { return parallel_; }

  /// Restarts the smoothed-aggregate window, e.g. when a calibration period
  /// ends.
  void reset_smoothing() { smoother_.clear(); }

  std::vector<std::byte> snapshot() const;
  static GridModel restore(std::span<const std::byte> bytes);

  /// Compares model state; the parallel flag is a runtime setting and is
  /// ignored.
  friend bool operator==(const GridModel& a, const GridModel& b) {
    return a.config_ == b.config_ && a.cells_ == b.cells_ && a.frames_seen_ == b.frames_seen_ &&
           a.smoother_ == b.smoother_;
  }

 private:
  friend struct SnapshotAccess;
  GridModel() = default;

  struct CellStep {
    double raw = 0.0;
    double reported = 0.0;
    std::uint32_t certainty = 0;
  };
  CellStep step_cell(std::size_t index, std::span<const Bitmap> planes, bool learn);

  GridConfig config_;
  CellCoord grid_size_;
  std::vector<Sdr> empty_patterns_;
  std::vector<CellUnit> cells_;
  std::uint64_t frames_seen_ = 0;
  MovingAverage smoother_{1};
  bool parallel_ = true;
};

}  // namespace gridhtm
