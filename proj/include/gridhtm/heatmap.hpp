#pragma once

#include "gridhtm/grid_model.hpp"
#include "gridhtm/image_io.hpp"

namespace gridhtm {

/// Linear green-to-red ramp: red = round(255 s), green = round(255 (1 - s)),
/// rounding halves up. Scores are clamped to [0, 1].
Rgb score_color(double score) noexcept;

/// Paints every cell's reported score over its pixel footprint.
RgbImage render_heatmap(const FrameResult& result, CellCoord cell_size);

}  // namespace gridhtm
