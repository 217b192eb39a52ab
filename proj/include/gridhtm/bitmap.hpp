#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace gridhtm {

/// (row, col) pair used both for pixel positions/extents and grid cell
/// coordinates.
struct CellCoord {
  std::size_t row = 0;
  std::size_t col = 0;

  friend bool operator==(const CellCoord&, const CellCoord&) = default;
  friend auto operator<=>(const CellCoord&, const CellCoord&) = default;
};

/// Dense row-major 2-D grid.
template <typename T>
class Grid {
 public:
  Grid() = default;
  Grid(std::size_t rows, std::size_t cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }

  T& at(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  T& at(CellCoord p) { return at(p.row, p.col); }
  const T& at(CellCoord p) const { return at(p.row, p.col); }

  std::vector<T>& values() noexcept { return data_; }
  const std::vector<T>& values() const noexcept { return data_; }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

/// One binary mask plane; nonzero bytes are set pixels.
using Bitmap = Grid<std::uint8_t>;

/// One video frame: one mask plane per segmentation class.
using Frame = std::vector<Bitmap>;

}  // namespace gridhtm
