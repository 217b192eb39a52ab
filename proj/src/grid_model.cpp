#include "gridhtm/grid_model.hpp"

#include <string>

#include <tbb/blocked_range.h>
#include <tbb/parallel_for.h>

#include "gridhtm/errors.hpp"
#include "gridhtm/random.hpp"

namespace gridhtm {

namespace {

constexpr std::uint64_t kSpSalt = 0x5350;
constexpr std::uint64_t kTmSalt = 0x544d;

std::uint64_t cell_seed(std::uint64_t grid_seed, CellCoord cell, std::uint64_t param_seed, std::uint64_t salt) {
  return mix_seed(mix_seed(mix_seed(grid_seed, salt), cell.row * 0x10000ULL + cell.col), param_seed);
}

std::string coord_name(CellCoord c) { return "(" + std::to_string(c.row) + ", " + std::to_string(c.col) + ")"; }

}  // namespace

void GridConfig::validate() const {
  encoder.validate();
  detail::require_config(multistep_n >= 1, "grid.multistep_n must be >= 1");
  detail::require_config(smoothing_window >= 1, "grid.smoothing_window must be >= 1");
  const CellCoord grid = encoder.grid_size();
  for (const auto& [coord, override_params] : per_cell_overrides) {
    detail::require_config(coord.row < grid.row && coord.col < grid.col,
                           "override for cell " + coord_name(coord) + " is outside the " + std::to_string(grid.row) +
                               "x" + std::to_string(grid.col) + " grid");
  }
  for (std::size_t r = 0; r < grid.row; ++r) {
    for (std::size_t c = 0; c < grid.col; ++c) {
      sp_params_for({r, c}).validate();
      tm_params_for({r, c}).validate();
    }
  }
}

SpParams GridConfig::sp_params_for(CellCoord cell) const {
  const auto it = per_cell_overrides.find(cell);
  SpParams p = (it != per_cell_overrides.end() && it->second.sp) ? *it->second.sp : default_sp;
  p.input_width = encoder.cell_bits() * encoder.class_count;
  p.seed = cell_seed(seed, cell, p.seed, kSpSalt);
  return p;
}

TmParams GridConfig::tm_params_for(CellCoord cell) const {
  const auto it = per_cell_overrides.find(cell);
  TmParams p = (it != per_cell_overrides.end() && it->second.tm) ? *it->second.tm : default_tm;
  p.column_count = sp_params_for(cell).column_count * multistep_n;
  p.seed = cell_seed(seed, cell, p.seed, kTmSalt);
  return p;
}

GridModel::GridModel(GridConfig config) : config_(std::move(config)) {
  config_.validate();
  grid_size_ = config_.encoder.grid_size();
  for (std::size_t k = 0; k < config_.encoder.class_count; ++k) {
    empty_patterns_.push_back(empty_pattern(config_.encoder, k));
  }
  cells_.reserve(grid_size_.row * grid_size_.col);
  for (std::size_t r = 0; r < grid_size_.row; ++r) {
    for (std::size_t c = 0; c < grid_size_.col; ++c) {
      const SpParams sp = config_.sp_params_for({r, c});
      const TmParams tm = config_.tm_params_for({r, c});
      cells_.push_back(CellUnit{
          SpatialPooler(sp),
          TemporalMemory(tm),
          std::vector<Sdr>(config_.multistep_n, Sdr(sp.column_count)),
          // no frame precedes the first, so nothing counts as a transition
          std::vector<std::uint8_t>(config_.encoder.class_count, 0),
          Sdr(tm.column_count),
      });
    }
  }
  smoother_ = MovingAverage(config_.smoothing_window);
}

const CellUnit& GridModel::cell(CellCoord coord) const {
  detail::require(coord.row < grid_size_.row && coord.col < grid_size_.col, "cell " + coord_name(coord) + " out of range");
  return cells_[coord.row * grid_size_.col + coord.col];
}

GridModel::CellStep GridModel::step_cell(std::size_t index, std::span<const Bitmap> planes, bool learn) {
  CellUnit& unit = cells_[index];
  const CellCoord coord{index / grid_size_.col, index % grid_size_.col};
  const CellInput input = encode_cell(config_.encoder, planes, coord, empty_patterns_);

  const Sdr sp_out = unit.sp.compute(concatenate(input.per_class), learn);
  unit.history.erase(unit.history.begin());
  unit.history.push_back(sp_out);
  unit.last_tm_input = concatenate(unit.history);
  const TmStepResult tm = unit.tm.compute(unit.last_tm_input, learn);

  bool entered = false;
  for (std::size_t k = 0; k < input.was_empty.size(); ++k) {
    entered = entered || (unit.prev_empty[k] != 0 && input.was_empty[k] == 0);
  }
  unit.prev_empty = input.was_empty;

  CellStep out;
  out.raw = tm.anomaly_score;
  out.reported = (config_.suppression_enabled && entered) ? 0.0 : tm.anomaly_score;
  out.certainty = static_cast<std::uint32_t>(tm.predictive_column_count);
  return out;
}

FrameResult GridModel::step(std::span<const Bitmap> planes, bool learn) {
  validate_planes(config_.encoder, planes);

  std::vector<CellStep> steps(cells_.size());
  if (parallel_) {
    tbb::parallel_for(tbb::blocked_range<std::size_t>(0, cells_.size()), [&](const tbb::blocked_range<std::size_t>& range) {
      for (std::size_t i = range.begin(); i != range.end(); ++i) steps[i] = step_cell(i, planes, learn);
    });
  } else {
    for (std::size_t i = 0; i < cells_.size(); ++i) steps[i] = step_cell(i, planes, learn);
  }

  FrameResult result;
  result.frame_index = frames_seen_++;
  result.raw_scores = Grid<double>(grid_size_.row, grid_size_.col);
  result.reported_scores = Grid<double>(grid_size_.row, grid_size_.col);
  result.certainty = Grid<std::uint32_t>(grid_size_.row, grid_size_.col);
  for (std::size_t i = 0; i < steps.size(); ++i) {
    result.raw_scores.values()[i] = steps[i].raw;
    result.reported_scores.values()[i] = steps[i].reported;
    result.certainty.values()[i] = steps[i].certainty;
  }
  result.aggregate = aggregate(config_.aggregation, result.reported_scores.values());
  result.aggregate_smoothed = smoother_.push(result.aggregate);
  return result;
}

}  // namespace gridhtm
