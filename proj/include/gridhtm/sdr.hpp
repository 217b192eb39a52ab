#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "gridhtm/bitmap.hpp"

namespace gridhtm {

using BitIndex = std::uint32_t;

/// Sparse distributed representation: a fixed-width binary vector stored as
/// the strictly increasing list of its active bit indices.
///
/// Values are immutable once built, so they can be shared freely between
/// threads.
class Sdr {
 public:
  Sdr() = default;

  /// All-zero SDR of the given width.
  explicit Sdr(std::size_t width);

  /// Builds from active indices in any order. Duplicates or indices
  /// >= width raise ContractError.
  Sdr(std::size_t width, std::vector<BitIndex> active);

  /// Builds from a dense 0/1 vector; width is the vector length.
  static Sdr from_dense(std::span<const std::uint8_t> dense);

  std::size_t width() const noexcept { return width_; }
  std::span<const BitIndex> active() const noexcept { return active_; }
  std::size_t active_count() const noexcept { return active_.size(); }
  bool empty() const noexcept { return active_.empty(); }
  double sparsity() const noexcept;

  bool test(BitIndex bit) const;
  std::vector<std::uint8_t> dense() const;

  friend bool operator==(const Sdr&, const Sdr&) = default;

 private:
  struct Trusted {};
  Sdr(Trusted, std::size_t width, std::vector<BitIndex> active)
      : width_(width), active_(std::move(active)) {}

  friend Sdr concatenate(std::span<const Sdr> parts);
  friend Sdr from_bitmap_window(const Bitmap& bitmap, CellCoord origin, CellCoord size);

  std::size_t width_ = 0;
  std::vector<BitIndex> active_;
};

/// Number of bits active in both. Widths must match.
std::size_t overlap(const Sdr& a, const Sdr& b);

/// Joins parts end to end; bits of part k are offset by the total width of
/// parts 0..k-1. Requires at least one part.
Sdr concatenate(std::span<const Sdr> parts);

/// Row-major flattening of a rectangular window: pixel (r, c) of the window
/// becomes bit r * size.col + c. The window must lie inside the bitmap.
Sdr from_bitmap_window(const Bitmap& bitmap, CellCoord origin, CellCoord size);

}  // namespace gridhtm
