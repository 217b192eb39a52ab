#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "gridhtm/bitmap.hpp"
#include "gridhtm/sdr.hpp"

namespace gridhtm {

struct EncoderConfig {
  CellCoord frame_size{120, 120};
  CellCoord cell_size{12, 12};
  std::size_t class_count = 1;
  /// A cell window with fewer active pixels than this counts as empty.
  std::size_t min_sparsity = 5;
  /// Active bits in the pattern substituted for empty windows.
  std::size_t empty_pattern_sparsity = 5;
  std::uint64_t seed = 0;

  void validate() const;

  CellCoord grid_size() const noexcept {
    return {frame_size.row / cell_size.row, frame_size.col / cell_size.col};
  }
  std::size_t cell_bits() const noexcept { return cell_size.row * cell_size.col; }

  friend bool operator==(const EncoderConfig&, const EncoderConfig&) = default;
};

struct CellInput {
  CellCoord cell_coord;
  /// One SDR per class plane, each cell_bits() wide.
  std::vector<Sdr> per_class;
  /// Emptiness verdict per class, taken before substitution.
  std::vector<std::uint8_t> was_empty;

  friend bool operator==(const CellInput&, const CellInput&) = default;
};

/// The fixed pattern standing in for an empty window of class `class_index`.
/// Shared by every cell; a pure function of (seed, class_index).
Sdr empty_pattern(const EncoderConfig& config, std::size_t class_index);

/// Encodes one cell window of every plane. Planes are assumed validated.
CellInput encode_cell(const EncoderConfig& config, std::span<const Bitmap> planes, CellCoord cell);

/// Same, with the per-class empty patterns precomputed.
CellInput encode_cell(const EncoderConfig& config, std::span<const Bitmap> planes, CellCoord cell,
                      std::span<const Sdr> empty_patterns);

/// Splits every plane into cell windows and applies the emptiness rule.
Grid<CellInput> encode_frame(const EncoderConfig& config, std::span<const Bitmap> planes);

/// Throws ContractError unless there is one plane per class, each of
/// frame_size.
void validate_planes(const EncoderConfig& config, std::span<const Bitmap> planes);

struct PixelStats {
  double mean = 0.0;
  double std_dev = 0.0;
};

/// Mean and population standard deviation, across frames, of the
/// post-substitution active-bit count of one cell (summed over classes).
PixelStats active_pixel_stats(const EncoderConfig& config, std::span<const Frame> frames, CellCoord cell);

}  // namespace gridhtm
