#include "gridhtm/heatmap.hpp"

#include <algorithm>
#include <cmath>

namespace gridhtm {

namespace {

std::uint8_t channel(double v) { return static_cast<std::uint8_t>(std::floor(255.0 * v + 0.5)); }

}  // namespace

Rgb score_color(double score) noexcept {
  const double s = std::isnan(score) ? 0.0 : std::clamp(score, 0.0, 1.0);
  return Rgb{channel(s), channel(1.0 - s), 0};
}

RgbImage render_heatmap(const FrameResult& result, CellCoord cell_size) {
  const Grid<double>& scores = result.reported_scores;
  RgbImage image(scores.rows() * cell_size.row, scores.cols() * cell_size.col);
  for (std::size_t r = 0; r < image.rows(); ++r) {
    for (std::size_t c = 0; c < image.cols(); ++c) {
      image.at(r, c) = score_color(scores.at(r / cell_size.row, c / cell_size.col));
    }
  }
  return image;
}

}  // namespace gridhtm
