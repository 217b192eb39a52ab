#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "gridhtm/grid_model.hpp"
#include "gridhtm/synthetic.hpp"

namespace gridhtm {

struct RunOutputs {
  /// Score CSV; empty disables it.
  std::filesystem::path scores_csv;
  /// Adds one reported-score column per cell to the CSV.
  bool cell_scores = false;
  /// One PPM heatmap per scored frame; empty disables them.
  std::filesystem::path heatmap_dir;
  /// Model snapshot written after the last frame; empty disables it.
  std::filesystem::path snapshot_out;
};

struct RunConfig {
  /// Directory holding <class>/<8-digit frame>.pbm; unused with a scenario.
  std::filesystem::path input;
  std::optional<Scenario> scenario;
  /// Resume from this snapshot instead of building a fresh model. The
  /// snapshot's grid configuration replaces `grid`.
  std::filesystem::path snapshot_in;
  GridConfig grid;
  /// Take frame size and class count from the input rather than `grid`.
  bool infer_frame_size = true;
  bool infer_class_count = true;
  RunOutputs outputs;
  bool learn = true;
  /// Leading frames that train the model but emit no output. They always
  /// learn, and smoothing restarts once they are over.
  std::size_t calibration_frames = 0;
  bool parallel = true;

  /// Every problem found, one message each; empty when valid.
  std::vector<std::string> validate() const;
};

struct RunSummary {
  std::size_t frames_processed = 0;
  std::size_t rows_written = 0;
};

/// Random-access frames from a PBM directory or a scenario. Directory
/// frames are read lazily.
class FrameSource {
 public:
  /// Scans `<dir>/<k>/<8 digits>.pbm`. Class directories are numbered from
  /// 0; without `class_count` every consecutive one is used. Every class
  /// must hold frames 0..N-1. Throws IoError naming the offending path.
  static FrameSource open_directory(const std::filesystem::path& dir, std::optional<std::size_t> class_count = {});
  static FrameSource from_scenario(Scenario scenario);

  CellCoord frame_size() const noexcept { return frame_size_; }
  std::size_t class_count() const noexcept { return class_count_; }
  std::size_t size() const noexcept { return frame_count_; }

  Frame read(std::size_t index) const;

 private:
  FrameSource() = default;

  std::filesystem::path dir_;
  std::optional<Scenario> scenario_;
  std::vector<std::uint64_t> scene_times_;
  CellCoord frame_size_;
  std::size_t class_count_ = 0;
  std::size_t frame_count_ = 0;
};

/// Writes every class plane of one frame as `<dir>/<k>/<8 digits>.pbm`.
void write_frame(const std::filesystem::path& dir, std::uint64_t index, const Frame& frame);

/// CSV header for a grid, with per-cell columns when requested.
std::string score_csv_header(CellCoord grid_size, bool cell_scores);
std::string score_csv_row(const FrameResult& result, bool cell_scores);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

/// Streams the input through the model and writes the requested outputs.
/// Configuration problems are all reported in one ConfigError before any
/// frame is processed; unreadable inputs raise IoError.
RunSummary run(const RunConfig& config);

}  // namespace gridhtm
