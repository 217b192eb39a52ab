#include "cli.hpp"

#include <algorithm>
#include <map>
#include <optional>

#if __has_include(<CLI/CLI.hpp>)
#include <CLI/CLI.hpp>
#else
#include <CLI11.hpp>
#endif

#include "gridhtm/config.hpp"
#include "gridhtm/errors.hpp"
#include "gridhtm/grid_encoder.hpp"
#include "gridhtm/image_io.hpp"
#include "gridhtm/runner.hpp"
#include "gridhtm/snapshot.hpp"
#include "gridhtm/spatial_pooler.hpp"
#include "gridhtm/temporal_memory.hpp"

namespace gridhtm::cli {

namespace {

// Settings shared by every subcommand that reads a configuration.
struct ConfigOptions {
  std::string file;
  std::vector<std::string> sets;
  // flag value by config key, applied last
  std::map<std::string, std::string> flags;

  void add_to(CLI::App& cmd) {
    cmd.add_option("-c,--config", file, "Configuration file (key = value lines)")->check(CLI::ExistingFile);
    cmd.add_option("--set", sets, "Override one setting, KEY=VALUE; repeatable");
  }

  void flag(CLI::App& cmd, const std::string& name, const std::string& key, const std::string& help) {
    cmd.add_option_function<std::string>(name, [this, key](const std::string& v) { flags[key] = v; }, help + " [" + key + "]");
  }

  void toggle(CLI::App& cmd, const std::string& name, const std::string& key, const std::string& value,
              const std::string& help) {
    cmd.add_flag_callback(name, [this, key, value] { flags[key] = value; }, help + " [" + key + "]");
  }

  ConfigMap load() const {
    ConfigMap map = file.empty() ? ConfigMap{} : load_config(file);
    for (const std::string& s : sets) set_config_value(map, s, "--set");
    for (const auto& [key, value] : flags) set_config_value(map, key + "=" + value, "command line");
    return map;
  }
};

std::span<const std::byte> as_bytes(const std::string& s) { return std::as_bytes(std::span(s.data(), s.size())); }

int do_run(const ConfigOptions& opts, std::ostream& out) {
  const RunConfig config = make_run_config(opts.load());
  const RunSummary summary = run(config);
  out << "processed " << summary.frames_processed << " frames, wrote " << summary.rows_written << " score rows\n";
  return 0;
}

int do_generate(const ConfigOptions& opts, const std::string& out_dir, std::ostream& out) {
  const RunConfig config = make_run_config(opts.load());
  if (!config.scenario) throw ConfigError("generate needs scenario.* settings");
  const FrameSource source = FrameSource::from_scenario(*config.scenario);
  for (std::size_t i = 0; i < source.size(); ++i) write_frame(out_dir, i, source.read(i));
  out << "wrote " << source.size() << " frames x " << source.class_count() << " class plane(s) to " << out_dir << "\n";
  return 0;
}

void describe_sp(const SpParams& p, std::ostream& out, const std::string& indent) {
  out << indent << "input_width " << p.input_width << ", columns " << p.column_count << ", active " << p.active_columns
      << ", boosting " << (p.boosting_enabled ? "on" : "off") << "\n";
}

void describe_tm(const TemporalMemory& tm, std::ostream& out, const std::string& indent) {
  const TmParams& p = tm.params();
  out << indent << "columns " << p.column_count << ", cells/column " << p.cells_per_column << ", segments "
      << tm.segment_count() << ", synapses " << tm.synapse_count() << "\n";
}

int do_snapshot_info(const std::string& path, std::ostream& out) {
  const std::string bytes = read_file(path);
  const SnapshotHeader header = read_snapshot_header(as_bytes(bytes));
  out << "magic " << header.magic << "\nversion " << header.version << "\npayload_bytes " << header.payload_bytes
      << "\ncrc32 " << header.checksum << "\n";
  if (header.magic == "GHSP") {
    const SpatialPooler sp = SpatialPooler::restore(as_bytes(bytes));
    out << "spatial pooler:\n";
    describe_sp(sp.params(), out, "  ");
  } else if (header.magic == "GHTM") {
    const TemporalMemory tm = TemporalMemory::restore(as_bytes(bytes));
    out << "temporal memory:\n";
    describe_tm(tm, out, "  ");
  } else {
    const GridModel model = GridModel::restore(as_bytes(bytes));
    const GridConfig& g = model.config();
    std::size_t segments = 0;
    std::size_t synapses = 0;
    for (std::size_t r = 0; r < model.grid_size().row; ++r) {
      for (std::size_t c = 0; c < model.grid_size().col; ++c) {
        segments += model.cell({r, c}).tm.segment_count();
        synapses += model.cell({r, c}).tm.synapse_count();
      }
    }
    out << "grid model:\n"
        << "  frame_size " << g.encoder.frame_size.row << "x" << g.encoder.frame_size.col << "\n"
        << "  cell_size " << g.encoder.cell_size.row << "x" << g.encoder.cell_size.col << "\n"
        << "  grid " << model.grid_size().row << "x" << model.grid_size().col << "\n"
        << "  class_count " << g.encoder.class_count << "\n"
        << "  multistep_n " << g.multistep_n << "\n"
        << "  suppression " << (g.suppression_enabled ? "on" : "off") << "\n"
        << "  aggregation " << to_string(g.aggregation) << "\n"
        << "  smoothing_window " << g.smoothing_window << "\n"
        << "  cell_overrides " << g.per_cell_overrides.size() << "\n"
        << "  frames_seen " << model.frames_seen() << "\n"
        << "  tm_segments " << segments << "\n"
        << "  tm_synapses " << synapses << "\n";
  }
  return 0;
}

int do_stats(const ConfigOptions& opts, const std::vector<std::size_t>& only, std::ostream& out) {
  const RunConfig config = make_run_config(opts.load());
  if (config.scenario && !config.input.empty()) throw ConfigError("run.input and scenario.* are mutually exclusive");
  const FrameSource source =
      config.scenario ? FrameSource::from_scenario(*config.scenario) : FrameSource::open_directory(config.input);
  EncoderConfig encoder = config.grid.encoder;
  if (config.infer_frame_size) encoder.frame_size = source.frame_size();
  if (config.infer_class_count) encoder.class_count = source.class_count();
  encoder.validate();

  std::vector<Frame> frames;
  frames.reserve(source.size());
  for (std::size_t i = 0; i < source.size(); ++i) frames.push_back(source.read(i));

  const CellCoord grid = encoder.grid_size();
  if (!only.empty() && (only[0] >= grid.row || only[1] >= grid.col)) {
    throw ConfigError("cell " + std::to_string(only[0]) + "," + std::to_string(only[1]) + " is outside the " +
                      std::to_string(grid.row) + "x" + std::to_string(grid.col) + " grid");
  }
  out << "row,col,mean,std_dev\n";
  for (std::size_t r = 0; r < grid.row; ++r) {
    for (std::size_t c = 0; c < grid.col; ++c) {
      if (!only.empty() && (r != only[0] || c != only[1])) continue;
      const PixelStats s = active_pixel_stats(encoder, frames, {r, c});
      out << r << "," << c << "," << format_double(s.mean) << "," << format_double(s.std_dev) << "\n";
    }
  }
  return 0;
}

}  // namespace

int main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Grid HTM anomaly detection over binary mask streams", "gridhtm"};
  app.require_subcommand(1);

  ConfigOptions run_opts;
  CLI::App* run_cmd = app.add_subcommand("run", "Stream frames through the model and write scores");
  run_opts.add_to(*run_cmd);
  run_opts.flag(*run_cmd, "-i,--input", "run.input", "Input directory of <class>/<frame>.pbm files");
  run_opts.flag(*run_cmd, "-o,--scores", "run.scores_csv", "Score CSV output path");
  run_opts.toggle(*run_cmd, "--cell-scores", "run.cell_scores", "true", "Add per-cell score columns");
  run_opts.flag(*run_cmd, "--heatmaps", "run.heatmap_dir", "Directory for PPM heatmap frames");
  run_opts.flag(*run_cmd, "--snapshot-out", "run.snapshot_out", "Write the final model here");
  run_opts.flag(*run_cmd, "--snapshot-in", "run.snapshot_in", "Resume from this model snapshot");
  run_opts.flag(*run_cmd, "--calibration", "run.calibration_frames", "Leading frames that only train");
  run_opts.toggle(*run_cmd, "--no-learn", "run.learn", "false", "Disable learning after calibration");
  run_opts.toggle(*run_cmd, "--sequential", "run.parallel", "false", "Process cells on one thread");
  run_opts.flag(*run_cmd, "--aggregation", "run.aggregation", "mean or nonzero_mean");
  run_opts.flag(*run_cmd, "--smoothing", "run.smoothing_window", "Moving-average window");
  run_opts.flag(*run_cmd, "--multistep", "grid.multistep_n", "Frames concatenated into each TM input");
  run_opts.flag(*run_cmd, "--seed", "grid.seed", "Model seed");

  ConfigOptions gen_opts;
  std::string gen_out;
  CLI::App* gen_cmd = app.add_subcommand("generate", "Render a synthetic scenario to PBM files");
  gen_opts.add_to(*gen_cmd);
  gen_cmd->add_option("-o,--out", gen_out, "Output directory")->required();
  gen_opts.flag(*gen_cmd, "--frames", "scenario.frame_count", "Number of frames");
  gen_opts.flag(*gen_cmd, "--seed", "scenario.seed", "Noise seed");

  std::string snapshot_path;
  CLI::App* info_cmd = app.add_subcommand("snapshot-info", "Describe a model snapshot");
  info_cmd->add_option("snapshot", snapshot_path, "Snapshot file")->required()->check(CLI::ExistingFile);

  ConfigOptions stats_opts;
  std::vector<std::size_t> stats_cell;
  CLI::App* stats_cmd = app.add_subcommand("stats", "Report per-cell active-pixel mean and standard deviation");
  stats_opts.add_to(*stats_cmd);
  stats_opts.flag(*stats_cmd, "-i,--input", "run.input", "Input directory of <class>/<frame>.pbm files");
  stats_cmd->add_option("--cell", stats_cell, "Restrict to one cell: ROW COL")->expected(2);

  // CLI11 consumes arguments from the back; args[0] is the program name
  std::vector<std::string> reversed;
  if (!args.empty()) reversed.assign(args.rbegin(), args.rend() - 1);
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (*run_cmd) return do_run(run_opts, out);
    if (*gen_cmd) return do_generate(gen_opts, gen_out, out);
    if (*info_cmd) return do_snapshot_info(snapshot_path, out);
    if (*stats_cmd) return do_stats(stats_opts, stats_cell, out);
  } catch (const std::exception& e) {
    err << "gridhtm: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace gridhtm::cli
