#include "gridhtm/runner.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <system_error>

#include "gridhtm/errors.hpp"
#include "gridhtm/heatmap.hpp"
#include "gridhtm/image_io.hpp"

namespace gridhtm {

namespace fs = std::filesystem;

namespace {

bool is_frame_name(const std::string& name) {
  if (name.size() != 12 || name.substr(8) != ".pbm") return false;
  for (std::size_t i = 0; i < 8; ++i) {
    if (name[i] < '0' || name[i] > '9') return false;
  }
  return true;
}

std::set<std::uint64_t> scan_frames(const fs::path& class_dir) {
  std::set<std::uint64_t> found;
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(class_dir, ec)) {
    const std::string name = entry.path().filename().string();
    if (entry.is_regular_file() && is_frame_name(name)) found.insert(std::stoull(name.substr(0, 8)));
  }
  if (ec) throw IoError("cannot list " + class_dir.string() + ": " + ec.message());
  return found;
}

fs::path frame_path(const fs::path& dir, std::size_t class_index, std::uint64_t index, const char* ext) {
  return dir / std::to_string(class_index) / (frame_stem(index) + ext);
}

std::string join(const std::vector<std::string>& lines) {
  std::string msg = "invalid run configuration:";
  for (const auto& line : lines) msg += "\n  " + line;
  return msg;
}

}  // namespace

std::vector<std::string> RunConfig::validate() const {
  std::vector<std::string> errors;
  if (scenario && !input.empty()) errors.emplace_back("run.input and scenario.* are mutually exclusive");
  if (!scenario && input.empty()) errors.emplace_back("no input: set run.input or describe a scenario");
  if (!input.empty() && !fs::is_directory(input)) errors.push_back("input directory does not exist: " + input.string());
  if (scenario) {
    for (const auto& e : scenario->validate()) errors.push_back("scenario: " + e);
  }
  if (!snapshot_in.empty() && !fs::is_regular_file(snapshot_in)) {
    errors.push_back("snapshot does not exist: " + snapshot_in.string());
  }
  if (snapshot_in.empty()) {
    if (grid.smoothing_window < 1) errors.emplace_back("run.smoothing_window must be >= 1");
    // geometry taken from the input is checked once the input is open
    GridConfig probe = grid;
    if (infer_frame_size) {
      // smallest grid that holds every override; the real bound is checked against the input
      CellCoord cells{1, 1};
      for (const auto& entry : probe.per_cell_overrides) {
        cells.row = std::max(cells.row, entry.first.row + 1);
        cells.col = std::max(cells.col, entry.first.col + 1);
      }
      probe.encoder.frame_size = {probe.encoder.cell_size.row * cells.row, probe.encoder.cell_size.col * cells.col};
    }
    try {
      probe.validate();
    } catch (const ConfigError& e) {
      errors.emplace_back(e.what());
    }
  }
  return errors;
}

FrameSource FrameSource::open_directory(const fs::path& dir, std::optional<std::size_t> class_count) {
  if (!fs::is_directory(dir)) throw IoError("input directory does not exist: " + dir.string());
  FrameSource source;
  source.dir_ = dir;
  if (class_count) {
    source.class_count_ = *class_count;
  } else {
    while (fs::is_directory(dir / std::to_string(source.class_count_))) ++source.class_count_;
  }
  if (source.class_count_ == 0) throw IoError("no class directory " + (dir / "0").string());

  std::set<std::uint64_t> frames;
  for (std::size_t k = 0; k < source.class_count_; ++k) {
    const fs::path class_dir = dir / std::to_string(k);
    if (!fs::is_directory(class_dir)) throw IoError("missing class directory " + class_dir.string());
    const std::set<std::uint64_t> found = scan_frames(class_dir);
    if (k == 0) {
      frames = found;
      std::uint64_t expected = 0;
      for (std::uint64_t f : frames) {
        if (f != expected) throw IoError("missing frame " + frame_path(dir, 0, expected, ".pbm").string());
        ++expected;
      }
    } else if (found != frames) {
      for (std::uint64_t f : frames) {
        if (!found.contains(f)) throw IoError("missing frame " + frame_path(dir, k, f, ".pbm").string());
      }
      for (std::uint64_t f : found) {
        if (!frames.contains(f)) throw IoError("unexpected frame " + frame_path(dir, k, f, ".pbm").string());
      }
    }
  }
  if (frames.empty()) throw IoError("no frames in " + (dir / "0").string());
  source.frame_count_ = frames.size();
  const Bitmap first = read_pbm(frame_path(dir, 0, 0, ".pbm"));
  source.frame_size_ = {first.rows(), first.cols()};
  return source;
}

FrameSource FrameSource::from_scenario(Scenario scenario) {
  const std::vector<std::string> errors = scenario.validate();
  if (!errors.empty()) {
    std::string msg = "invalid scenario:";
    for (const auto& e : errors) msg += "\n  " + e;
    throw ConfigError(msg);
  }
  FrameSource source;
  source.scene_times_ = scene_times(scenario);
  source.frame_size_ = scenario.frame_size;
  source.class_count_ = scenario.class_count;
  source.frame_count_ = scenario.frame_count;
  source.scenario_ = std::move(scenario);
  return source;
}

Frame FrameSource::read(std::size_t index) const {
  detail::require(index < frame_count_, "FrameSource::read: frame " + std::to_string(index) + " out of range");
  if (scenario_) return render_scene(*scenario_, scene_times_[index]);
  Frame frame;
  frame.reserve(class_count_);
  for (std::size_t k = 0; k < class_count_; ++k) {
    const fs::path path = frame_path(dir_, k, index, ".pbm");
    Bitmap plane = read_pbm(path);
    if (plane.rows() != frame_size_.row || plane.cols() != frame_size_.col) {
      throw IoError(path.string() + ": expected " + std::to_string(frame_size_.col) + "x" +
                    std::to_string(frame_size_.row) + " pixels, found " + std::to_string(plane.cols()) + "x" +
                    std::to_string(plane.rows()));
    }
    frame.push_back(std::move(plane));
  }
  return frame;
}

void write_frame(const fs::path& dir, std::uint64_t index, const Frame& frame) {
  for (std::size_t k = 0; k < frame.size(); ++k) {
    const fs::path path = frame_path(dir, k, index, ".pbm");
    fs::create_directories(path.parent_path());
    write_pbm(path, frame[k]);
  }
}

std::string format_double(double value) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  (void)ec;
  return std::string(buf, end);
}

std::string score_csv_header(CellCoord grid_size, bool cell_scores) {
  std::string line = "frame,aggregate,aggregate_smoothed";
  if (cell_scores) {
    for (std::size_t r = 0; r < grid_size.row; ++r) {
      for (std::size_t c = 0; c < grid_size.col; ++c) {
        line += ",cell_r" + std::to_string(r) + "_c" + std::to_string(c);
      }
    }
  }
  return line + "\n";
}

std::string score_csv_row(const FrameResult& result, bool cell_scores) {
  std::string line = std::to_string(result.frame_index) + "," + format_double(result.aggregate) + "," +
                     format_double(result.aggregate_smoothed);
  if (cell_scores) {
    for (double s : result.reported_scores.values()) line += "," + format_double(s);
  }
  return line + "\n";
}

RunSummary run(const RunConfig& config) {
  const std::vector<std::string> errors = config.validate();
  if (!errors.empty()) throw ConfigError(join(errors));

  const FrameSource source =
      config.scenario ? FrameSource::from_scenario(*config.scenario)
                      : FrameSource::open_directory(config.input, config.infer_class_count
                                                                      ? std::nullopt
                                                                      : std::optional(config.grid.encoder.class_count));

  std::optional<GridModel> model;
  if (!config.snapshot_in.empty()) {
    const std::string bytes = read_file(config.snapshot_in);
    model.emplace(GridModel::restore(std::as_bytes(std::span(bytes.data(), bytes.size()))));
  } else {
    GridConfig grid = config.grid;
    if (config.infer_frame_size) grid.encoder.frame_size = source.frame_size();
    if (config.infer_class_count) grid.encoder.class_count = source.class_count();
    try {
      model.emplace(std::move(grid));
    } catch (const ConfigError& e) {
      throw ConfigError(join({e.what()}));
    }
  }
  const EncoderConfig& encoder = model->config().encoder;
  if (encoder.frame_size != source.frame_size() || encoder.class_count != source.class_count()) {
    throw ConfigError(join({"input has " + std::to_string(source.class_count()) + " class plane(s) of " +
                            std::to_string(source.frame_size().col) + "x" + std::to_string(source.frame_size().row) +
                            " pixels but the model expects " + std::to_string(encoder.class_count) + " of " +
                            std::to_string(encoder.frame_size.col) + "x" + std::to_string(encoder.frame_size.row)}));
  }
  model->set_parallel(config.parallel);

  const RunOutputs& out = config.outputs;
  std::ofstream csv;
  if (!out.scores_csv.empty()) {
    if (out.scores_csv.has_parent_path()) fs::create_directories(out.scores_csv.parent_path());
    csv.open(out.scores_csv, std::ios::binary | std::ios::trunc);
    if (!csv) throw IoError("cannot create " + out.scores_csv.string());
    csv << score_csv_header(model->grid_size(), out.cell_scores);
  }
  if (!out.heatmap_dir.empty()) fs::create_directories(out.heatmap_dir);

  RunSummary summary;
  for (std::size_t i = 0; i < source.size(); ++i) {
    const Frame frame = source.read(i);
    const bool calibrating = i < config.calibration_frames;
    const FrameResult result = model->step(frame, config.learn || calibrating);
    ++summary.frames_processed;
    if (calibrating) {
      if (i + 1 == config.calibration_frames) model->reset_smoothing();
      continue;
    }
    if (csv.is_open()) {
      csv << score_csv_row(result, out.cell_scores);
      if (!csv) throw IoError("cannot write " + out.scores_csv.string());
    }
    if (!out.heatmap_dir.empty()) {
      write_ppm(out.heatmap_dir / (frame_stem(result.frame_index) + ".ppm"), render_heatmap(result, encoder.cell_size));
    }
    ++summary.rows_written;
  }
  if (csv.is_open()) {
    csv.close();
    if (!csv) throw IoError("cannot write " + out.scores_csv.string());
  }

  if (!out.snapshot_out.empty()) {
    if (out.snapshot_out.has_parent_path()) fs::create_directories(out.snapshot_out.parent_path());
    const std::vector<std::byte> bytes = model->snapshot();
    write_file(out.snapshot_out, std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
  }
  return summary;
}

}  // namespace gridhtm
