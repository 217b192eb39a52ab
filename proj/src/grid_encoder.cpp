#include "gridhtm/grid_encoder.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "gridhtm/errors.hpp"
#include "gridhtm/random.hpp"

namespace gridhtm {

void EncoderConfig::validate() const {
  using detail::require_config;
  require_config(frame_size.row > 0 && frame_size.col > 0, "encoder: frame size must be positive");
  require_config(cell_size.row > 0 && cell_size.col > 0, "encoder: cell size must be positive");
  require_config(frame_size.row % cell_size.row == 0 && frame_size.col % cell_size.col == 0,
                 "encoder: frame " + std::to_string(frame_size.row) + "x" + std::to_string(frame_size.col) +
                     " does not divide into " + std::to_string(cell_size.row) + "x" + std::to_string(cell_size.col) +
                     " cells; pad the masks upstream");
  require_config(class_count > 0, "encoder.class_count must be positive");
  require_config(empty_pattern_sparsity <= cell_bits(), "encoder.empty_pattern_sparsity exceeds the cell pixel count");
}

Sdr empty_pattern(const EncoderConfig& config, std::size_t class_index) {
  Rng rng(mix_seed(config.seed, 0xE3E3ULL + class_index));
  std::vector<BitIndex> bits(config.cell_bits());
  std::iota(bits.begin(), bits.end(), BitIndex{0});
  rng.choose_front(std::span<BitIndex>(bits), config.empty_pattern_sparsity);
  bits.resize(config.empty_pattern_sparsity);
  return Sdr(config.cell_bits(), std::move(bits));
}

void validate_planes(const EncoderConfig& config, std::span<const Bitmap> planes) {
  detail::require(planes.size() == config.class_count, "expected " + std::to_string(config.class_count) +
                                                           " class planes, got " + std::to_string(planes.size()));
  for (std::size_t k = 0; k < planes.size(); ++k) {
    detail::require(planes[k].rows() == config.frame_size.row && planes[k].cols() == config.frame_size.col,
                    "class plane " + std::to_string(k) + " is " + std::to_string(planes[k].rows()) + "x" +
                        std::to_string(planes[k].cols()) + ", expected " + std::to_string(config.frame_size.row) +
                        "x" + std::to_string(config.frame_size.col));
  }
}

CellInput encode_cell(const EncoderConfig& config, std::span<const Bitmap> planes, CellCoord cell) {
  std::vector<Sdr> patterns;
  for (std::size_t k = 0; k < planes.size(); ++k) patterns.push_back(empty_pattern(config, k));
  return encode_cell(config, planes, cell, patterns);
}

CellInput encode_cell(const EncoderConfig& config, std::span<const Bitmap> planes, CellCoord cell,
                      std::span<const Sdr> empty_patterns) {
  CellInput out;
  out.cell_coord = cell;
  const CellCoord origin{cell.row * config.cell_size.row, cell.col * config.cell_size.col};
  for (std::size_t k = 0; k < planes.size(); ++k) {
    Sdr window = from_bitmap_window(planes[k], origin, config.cell_size);
    const bool empty = window.active_count() < config.min_sparsity;
    out.per_class.push_back(empty ? empty_patterns[k] : std::move(window));
    out.was_empty.push_back(empty ? 1 : 0);
  }
  return out;
}

Grid<CellInput> encode_frame(const EncoderConfig& config, std::span<const Bitmap> planes) {
  config.validate();
  validate_planes(config, planes);
  const CellCoord grid = config.grid_size();
  std::vector<Sdr> patterns;
  for (std::size_t k = 0; k < config.class_count; ++k) patterns.push_back(empty_pattern(config, k));
  Grid<CellInput> out(grid.row, grid.col);
  for (std::size_t r = 0; r < grid.row; ++r) {
    for (std::size_t c = 0; c < grid.col; ++c) out.at(r, c) = encode_cell(config, planes, {r, c}, patterns);
  }
  return out;
}

PixelStats active_pixel_stats(const EncoderConfig& config, std::span<const Frame> frames, CellCoord cell) {
  config.validate();
  detail::require(!frames.empty(), "active_pixel_stats: no frames");
  const CellCoord grid = config.grid_size();
  detail::require(cell.row < grid.row && cell.col < grid.col, "active_pixel_stats: cell out of range");

  std::vector<Sdr> patterns;
  for (std::size_t k = 0; k < config.class_count; ++k) patterns.push_back(empty_pattern(config, k));
  std::vector<double> counts;
  counts.reserve(frames.size());
  for (const Frame& frame : frames) {
    validate_planes(config, frame);
    const CellInput in = encode_cell(config, frame, cell, patterns);
    std::size_t n = 0;
    for (const Sdr& s : in.per_class) n += s.active_count();
    counts.push_back(static_cast<double>(n));
  }
  const double mean = std::accumulate(counts.begin(), counts.end(), 0.0) / static_cast<double>(counts.size());
  double sq = 0.0;
  for (double x : counts) sq += (x - mean) * (x - mean);
  return {mean, std::sqrt(sq / static_cast<double>(counts.size()))};
}

}  // namespace gridhtm
