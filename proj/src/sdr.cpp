#include "gridhtm/sdr.hpp"

#include <algorithm>
#include <string>

#include "gridhtm/errors.hpp"

namespace gridhtm {

Sdr::Sdr(std::size_t width) : width_(width) {}

Sdr::Sdr(std::size_t width, std::vector<BitIndex> active)
    : width_(width), active_(std::move(active)) {
  std::sort(active_.begin(), active_.end());
  detail::require(std::adjacent_find(active_.begin(), active_.end()) == active_.end(),
                  "Sdr: duplicate active index");
  detail::require(active_.empty() || active_.back() < width_,
                  "Sdr: active index " + (active_.empty() ? std::string{} : std::to_string(active_.back())) +
                      " out of range for width " + std::to_string(width_));
}

Sdr Sdr::from_dense(std::span<const std::uint8_t> dense) {
  std::vector<BitIndex> active;
  for (std::size_t i = 0; i < dense.size(); ++i) {
    if (dense[i] != 0) active.push_back(static_cast<BitIndex>(i));
  }
  return Sdr(Trusted{}, dense.size(), std::move(active));
}

double Sdr::sparsity() const noexcept {
  return width_ == 0 ? 0.0 : static_cast<double>(active_.size()) / static_cast<double>(width_);
}

bool Sdr::test(BitIndex bit) const {
  return std::binary_search(active_.begin(), active_.end(), bit);
}

std::vector<std::uint8_t> Sdr::dense() const {
  std::vector<std::uint8_t> out(width_, 0);
  for (BitIndex i : active_) out[i] = 1;
  return out;
}

std::size_t overlap(const Sdr& a, const Sdr& b) {
  detail::require(a.width() == b.width(), "overlap: width mismatch (" + std::to_string(a.width()) +
                                              " vs " + std::to_string(b.width()) + ")");
  const auto x = a.active();
  const auto y = b.active();
  std::size_t count = 0;
  auto i = x.begin();
  auto j = y.begin();
  while (i != x.end() && j != y.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++count;
      ++i;
      ++j;
    }
  }
  return count;
}

Sdr concatenate(std::span<const Sdr> parts) {
  detail::require(!parts.empty(), "concatenate: no parts");
  std::size_t width = 0;
  std::size_t total = 0;
  for (const Sdr& p : parts) {
    width += p.width();
    total += p.active_count();
  }
  std::vector<BitIndex> active;
  active.reserve(total);
  std::size_t offset = 0;
  for (const Sdr& p : parts) {
    for (BitIndex i : p.active()) active.push_back(static_cast<BitIndex>(i + offset));
    offset += p.width();
  }
  return Sdr(Sdr::Trusted{}, width, std::move(active));
}

Sdr from_bitmap_window(const Bitmap& bitmap, CellCoord origin, CellCoord size) {
  detail::require(origin.row + size.row <= bitmap.rows() && origin.col + size.col <= bitmap.cols(),
                  "from_bitmap_window: window out of bounds");
  std::vector<BitIndex> active;
  for (std::size_t r = 0; r < size.row; ++r) {
    for (std::size_t c = 0; c < size.col; ++c) {
      if (bitmap.at(origin.row + r, origin.col + c) != 0) {
        active.push_back(static_cast<BitIndex>(r * size.col + c));
      }
    }
  }
  return Sdr(Sdr::Trusted{}, size.row * size.col, std::move(active));
}

}  // namespace gridhtm
