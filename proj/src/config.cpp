#include "gridhtm/config.hpp"

#include <charconv>
#include <set>
#include <sstream>

#include "gridhtm/errors.hpp"
#include "gridhtm/image_io.hpp"

namespace gridhtm {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) return parts;
    start = pos + 1;
  }
}

template <typename T>
bool parse_number(std::string_view text, T& out) {
  const std::string t = trim(text);
  if (t.empty() || t.front() == '+') return false;
  const auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
  return ec == std::errc{} && end == t.data() + t.size();
}

bool parse_bool(std::string_view text, bool& out) {
  const std::string t = trim(text);
  if (t == "true" || t == "1" || t == "yes" || t == "on") {
    out = true;
    return true;
  }
  if (t == "false" || t == "0" || t == "no" || t == "off") {
    out = false;
    return true;
  }
  return false;
}

// "RxC", rows first.
bool parse_dims(std::string_view text, CellCoord& out) {
  const auto parts = split(text, 'x');
  return parts.size() == 2 && parse_number(parts[0], out.row) && parse_number(parts[1], out.col);
}

// "R,C", signed.
bool parse_position(std::string_view text, Position& out) {
  const auto parts = split(text, ',');
  return parts.size() == 2 && parse_number(parts[0], out.row) && parse_number(parts[1], out.col);
}

// Tracks which keys were consumed and accumulates every error.
class Reader {
 public:
  explicit Reader(const ConfigMap& map) : map_(map) {}

  const ConfigValue* find(const std::string& key) {
    const auto it = map_.find(key);
    if (it == map_.end()) return nullptr;
    used_.insert(key);
    return &it->second;
  }

  bool has(const std::string& key) const { return map_.contains(key); }

  void error(const std::string& key, const std::string& what) {
    const auto it = map_.find(key);
    const std::string where = it != map_.end() ? it->second.origin + ": " : std::string{};
    errors_.push_back(where + key + ": " + what);
  }
  void error(const std::string& what) { errors_.push_back(what); }

  template <typename T, typename Parse>
  void read(const std::string& key, T& out, Parse parse, const char* expected) {
    const ConfigValue* v = find(key);
    if (v == nullptr) return;
    T value{};
    if (parse(v->text, value)) {
      out = value;
    } else {
      error(key, "expected " + std::string(expected) + ", got '" + v->text + "'");
    }
  }

  void size(const std::string& key, std::size_t& out) { read(key, out, parse_number<std::size_t>, "a non-negative integer"); }
  void u64(const std::string& key, std::uint64_t& out) { read(key, out, parse_number<std::uint64_t>, "a non-negative integer"); }
  void real(const std::string& key, double& out) { read(key, out, parse_number<double>, "a number"); }
  void flag(const std::string& key, bool& out) { read(key, out, parse_bool, "true or false"); }
  void dims(const std::string& key, CellCoord& out) { read(key, out, parse_dims, "ROWSxCOLS"); }
  void position(const std::string& key, Position& out) { read(key, out, parse_position, "ROW,COL"); }
  void text(const std::string& key, std::string& out) {
    if (const ConfigValue* v = find(key)) out = v->text;
  }
  void path(const std::string& key, std::filesystem::path& out) {
    if (const ConfigValue* v = find(key)) out = v->text;
  }

  /// Keys sharing `prefix`, in map order.
  std::vector<std::string> keys_with_prefix(std::string_view prefix) const {
    std::vector<std::string> keys;
    for (auto it = map_.lower_bound(prefix); it != map_.end() && it->first.starts_with(prefix); ++it) {
      keys.push_back(it->first);
    }
    return keys;
  }

  void reject_unused() {
    for (const auto& [key, value] : map_) {
      if (!used_.contains(key)) errors_.push_back(value.origin + ": unknown key '" + key + "'");
    }
  }

  void throw_if_errors(const std::string& what) const {
    if (errors_.empty()) return;
    std::string msg = what + ":";
    for (const auto& e : errors_) msg += "\n  " + e;
    throw ConfigError(msg);
  }

 private:
  const ConfigMap& map_;
  std::set<std::string, std::less<>> used_;
  std::vector<std::string> errors_;
};

void read_sp(Reader& in, const std::string& prefix, SpParams& p) {
  in.size(prefix + "column_count", p.column_count);
  in.size(prefix + "active_columns", p.active_columns);
  in.real(prefix + "potential_fraction", p.potential_fraction);
  in.real(prefix + "connected_threshold", p.connected_threshold);
  in.real(prefix + "permanence_increment", p.permanence_increment);
  in.real(prefix + "permanence_decrement", p.permanence_decrement);
  in.real(prefix + "initial_permanence_band", p.initial_permanence_band);
  in.size(prefix + "stimulus_threshold", p.stimulus_threshold);
  in.flag(prefix + "boosting_enabled", p.boosting_enabled);
  in.real(prefix + "boost_strength", p.boost_strength);
  in.size(prefix + "duty_cycle_period", p.duty_cycle_period);
  in.u64(prefix + "seed", p.seed);
}

void read_tm(Reader& in, const std::string& prefix, TmParams& p) {
  in.size(prefix + "cells_per_column", p.cells_per_column);
  in.size(prefix + "max_segments_per_cell", p.max_segments_per_cell);
  in.size(prefix + "max_synapses_per_segment", p.max_synapses_per_segment);
  in.real(prefix + "initial_permanence", p.initial_permanence);
  in.real(prefix + "connected_threshold", p.connected_threshold);
  in.real(prefix + "permanence_increment", p.permanence_increment);
  in.real(prefix + "permanence_decrement", p.permanence_decrement);
  in.real(prefix + "predicted_decrement", p.predicted_decrement);
  in.size(prefix + "activation_threshold", p.activation_threshold);
  in.size(prefix + "min_threshold", p.min_threshold);
  in.size(prefix + "new_synapse_count", p.new_synapse_count);
  in.u64(prefix + "seed", p.seed);
}

// Numeric middle part of `<prefix><index>.<rest>`, collected once per index.
std::set<std::size_t> indexed(Reader& in, const std::string& prefix) {
  std::set<std::size_t> found;
  for (const std::string& key : in.keys_with_prefix(prefix)) {
    const std::string rest = key.substr(prefix.size());
    std::size_t index = 0;
    if (parse_number(rest.substr(0, rest.find('.')), index)) found.insert(index);
  }
  return found;
}

void read_object(Reader& in, std::size_t index, ObjectTrack& o) {
  const std::string p = "scenario.object." + std::to_string(index) + ".";
  in.dims(p + "shape", o.shape);
  in.size(p + "class", o.class_index);
  std::string kind = "stationary";
  in.text(p + "path", kind);
  if (kind == "loop") {
    LinearLoop loop;
    if (!in.has(p + "start")) in.error(p + "path: a loop needs " + p + "start");
    if (!in.has(p + "velocity")) in.error(p + "path: a loop needs " + p + "velocity");
    in.position(p + "start", loop.start);
    in.position(p + "velocity", loop.velocity);
    o.path = loop;
  } else if (kind == "stationary") {
    Stationary still;
    in.position(p + "position", still.position);
    o.path = still;
  } else if (kind == "scripted") {
    Scripted script;
    if (const ConfigValue* v = in.find(p + "positions")) {
      for (const std::string& item : split(v->text, ';')) {
        Position pos;
        if (parse_position(item, pos)) {
          script.positions.push_back(pos);
        } else {
          in.error(p + "positions", "expected ROW,COL;ROW,COL;..., got '" + v->text + "'");
          break;
        }
      }
    } else {
      in.error(p + "path: a scripted path needs " + p + "positions");
    }
    o.path = script;
  } else {
    in.error(p + "path", "expected loop, stationary or scripted, got '" + kind + "'");
  }
}

void read_event(Reader& in, std::size_t index, std::vector<Event>& events) {
  const std::string key = "scenario.event." + std::to_string(index);
  const ConfigValue* v = in.find(key);
  if (v == nullptr) {
    in.error("scenario.event." + std::to_string(index) + " has sub-keys; write it as '" + key +
             " = repeat START DURATION' or 'skip AT COUNT'");
    return;
  }
  std::istringstream words(v->text);
  std::string kind;
  std::string a;
  std::string b;
  std::string extra;
  words >> kind >> a >> b >> extra;
  std::size_t x = 0;
  std::size_t y = 0;
  if (!extra.empty() || !parse_number(a, x) || !parse_number(b, y)) {
    in.error(key, "expected 'repeat START DURATION' or 'skip AT COUNT', got '" + v->text + "'");
  } else if (kind == "repeat") {
    events.push_back(FrameRepeat{x, y});
  } else if (kind == "skip") {
    events.push_back(FrameSkip{x, y});
  } else {
    in.error(key, "unknown event kind '" + kind + "'");
  }
}

Scenario read_scenario(Reader& in) {
  Scenario s;
  in.dims("scenario.frame_size", s.frame_size);
  in.size("scenario.frame_count", s.frame_count);
  in.size("scenario.class_count", s.class_count);
  in.u64("scenario.seed", s.seed);
  in.real("scenario.noise.pixel_flip", s.noise.pixel_flip_probability);
  in.real("scenario.noise.dropout", s.noise.object_dropout_probability);
  for (std::size_t i : indexed(in, "scenario.object.")) {
    read_object(in, i, s.objects.emplace_back());
  }
  for (std::size_t i : indexed(in, "scenario.event.")) read_event(in, i, s.events);
  return s;
}

void check_key_syntax(const std::string& key, const std::string& origin, std::vector<std::string>& errors) {
  if (key.empty()) {
    errors.push_back(origin + ": missing key before '='");
    return;
  }
  for (char c : key) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' || c == '.';
    if (!ok) {
      errors.push_back(origin + ": invalid character in key '" + key + "'");
      return;
    }
  }
}

}  // namespace

ConfigMap parse_config(std::string_view text, const std::string& source) {
  ConfigMap map;
  std::vector<std::string> errors;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = text.find('\n', start);
    const std::string line = trim(text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start));
    ++line_no;
    start = end == std::string_view::npos ? text.size() + 1 : end + 1;
    if (line.empty() || line.front() == '#') continue;

    const std::string origin = source + ":" + std::to_string(line_no);
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      errors.push_back(origin + ": expected 'key = value'");
      continue;
    }
    const std::string key = trim(std::string_view(line).substr(0, eq));
    check_key_syntax(key, origin, errors);
    if (const auto it = map.find(key); it != map.end()) {
      errors.push_back(origin + ": duplicate key '" + key + "' (first set at " + it->second.origin + ")");
      continue;
    }
    map[key] = ConfigValue{trim(std::string_view(line).substr(eq + 1)), origin};
  }
  if (!errors.empty()) {
    std::string msg = "malformed configuration:";
    for (const auto& e : errors) msg += "\n  " + e;
    throw ConfigError(msg);
  }
  return map;
}

ConfigMap load_config(const std::filesystem::path& path) { return parse_config(read_file(path), path.string()); }

void set_config_value(ConfigMap& config, std::string_view assignment, const std::string& origin) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) throw ConfigError(origin + ": expected key=value, got '" + std::string(assignment) + "'");
  const std::string key = trim(assignment.substr(0, eq));
  std::vector<std::string> errors;
  check_key_syntax(key, origin, errors);
  if (!errors.empty()) throw ConfigError(errors.front());
  config[key] = ConfigValue{trim(assignment.substr(eq + 1)), origin};
}

bool has_scenario(const ConfigMap& config) {
  const auto it = config.lower_bound(std::string_view("scenario."));
  return it != config.end() && it->first.starts_with("scenario.");
}

Scenario make_scenario(const ConfigMap& config) {
  Reader in(config);
  Scenario s = read_scenario(in);
  in.reject_unused();
  in.throw_if_errors("invalid scenario configuration");
  return s;
}

RunConfig make_run_config(const ConfigMap& config) {
  Reader in(config);
  RunConfig rc;
  GridConfig& g = rc.grid;

  EncoderConfig& e = g.encoder;
  rc.infer_frame_size = !in.has("encoder.frame_size");
  rc.infer_class_count = !in.has("encoder.class_count");
  in.dims("encoder.frame_size", e.frame_size);
  in.dims("encoder.cell_size", e.cell_size);
  in.size("encoder.class_count", e.class_count);
  in.size("encoder.min_sparsity", e.min_sparsity);
  in.size("encoder.empty_pattern_sparsity", e.empty_pattern_sparsity);
  in.u64("encoder.seed", e.seed);

  in.size("grid.multistep_n", g.multistep_n);
  in.flag("grid.suppression", g.suppression_enabled);
  in.u64("grid.seed", g.seed);

  read_sp(in, "sp.", g.default_sp);
  read_tm(in, "tm.", g.default_tm);

  // cell.R.C.sp.* and cell.R.C.tm.* start from the grid-wide parameters
  for (const std::string& key : in.keys_with_prefix("cell.")) {
    const auto parts = split(key, '.');
    CellCoord coord;
    if (parts.size() != 5 || !parse_number(parts[1], coord.row) || !parse_number(parts[2], coord.col) ||
        (parts[3] != "sp" && parts[3] != "tm")) {
      in.error(key, "expected cell.ROW.COL.sp.FIELD or cell.ROW.COL.tm.FIELD");
      in.find(key);
      continue;
    }
    CellOverride& o = g.per_cell_overrides[coord];
    const std::string prefix = "cell." + parts[1] + "." + parts[2] + "." + parts[3] + ".";
    if (parts[3] == "sp" && !o.sp) {
      o.sp = g.default_sp;
      read_sp(in, prefix, *o.sp);
    } else if (parts[3] == "tm" && !o.tm) {
      o.tm = g.default_tm;
      read_tm(in, prefix, *o.tm);
    }
  }

  in.path("run.input", rc.input);
  in.path("run.snapshot_in", rc.snapshot_in);
  in.path("run.scores_csv", rc.outputs.scores_csv);
  in.flag("run.cell_scores", rc.outputs.cell_scores);
  in.path("run.heatmap_dir", rc.outputs.heatmap_dir);
  in.path("run.snapshot_out", rc.outputs.snapshot_out);
  in.flag("run.learn", rc.learn);
  in.size("run.calibration_frames", rc.calibration_frames);
  in.flag("run.parallel", rc.parallel);
  in.size("run.smoothing_window", g.smoothing_window);
  if (const ConfigValue* v = in.find("run.aggregation")) {
    if (const auto kind = parse_aggregation(v->text)) {
      g.aggregation = *kind;
    } else {
      in.error("run.aggregation", "expected mean or nonzero_mean, got '" + v->text + "'");
    }
  }

  if (has_scenario(config)) rc.scenario = read_scenario(in);

  in.reject_unused();
  in.throw_if_errors("invalid configuration");
  return rc;
}

}  // namespace gridhtm
