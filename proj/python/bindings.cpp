#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gridhtm/aggregation.hpp"
#include "gridhtm/config.hpp"
#include "gridhtm/errors.hpp"
#include "gridhtm/grid_encoder.hpp"
#include "gridhtm/grid_model.hpp"
#include "gridhtm/heatmap.hpp"
#include "gridhtm/runner.hpp"
#include "gridhtm/sdr.hpp"
#include "gridhtm/spatial_pooler.hpp"
#include "gridhtm/synthetic.hpp"
#include "gridhtm/temporal_memory.hpp"

namespace py = pybind11;
using namespace gridhtm;

namespace {

using Pixels = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>;
using Coord = std::pair<std::size_t, std::size_t>;

Coord to_pair(CellCoord c) { return {c.row, c.col}; }
CellCoord to_coord(const Coord& c) { return {c.first, c.second}; }

// Accepts (rows, cols) for one class or (classes, rows, cols).
Frame to_frame(const Pixels& pixels) {
  const auto view = pixels.unchecked();
  std::size_t classes = 1;
  std::size_t rows = 0;
  std::size_t cols = 0;
  if (pixels.ndim() == 2) {
    rows = pixels.shape(0);
    cols = pixels.shape(1);
  } else if (pixels.ndim() == 3) {
    classes = pixels.shape(0);
    rows = pixels.shape(1);
    cols = pixels.shape(2);
  } else {
    throw py::value_error("frame must have shape (rows, cols) or (classes, rows, cols)");
  }
  Frame frame(classes, Bitmap(rows, cols));
  const std::uint8_t* data = view.data();
  for (std::size_t k = 0; k < classes; ++k) {
    auto& values = frame[k].values();
    for (std::size_t i = 0; i < rows * cols; ++i) values[i] = data[k * rows * cols + i] != 0 ? 1 : 0;
  }
  return frame;
}

template <typename T>
py::array_t<T> to_array(const Grid<T>& grid) {
  py::array_t<T> out({grid.rows(), grid.cols()});
  std::copy(grid.values().begin(), grid.values().end(), out.mutable_data());
  return out;
}

py::bytes to_bytes(const std::vector<std::byte>& bytes) {
  return py::bytes(reinterpret_cast<const char*>(bytes.data()), bytes.size());
}

std::span<const std::byte> as_span(std::string_view s) { return std::as_bytes(std::span(s.data(), s.size())); }

ConfigMap config_from(const std::string& text, const std::vector<std::string>& overrides) {
  ConfigMap map = parse_config(text, "<config>");
  for (const auto& o : overrides) set_config_value(map, o, "override");
  return map;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Grid HTM anomaly detection over binary mask streams.";

  auto config_error = py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);
  auto snapshot_error = py::register_exception<SnapshotError>(m, "SnapshotError", PyExc_ValueError);
  py::register_exception<UnsupportedVersionError>(m, "UnsupportedVersionError", snapshot_error.ptr());
  py::register_exception<ContractError>(m, "ContractError", PyExc_ValueError);
  (void)config_error;

  py::class_<Sdr>(m, "Sdr")
      .def(py::init<std::size_t>(), py::arg("width"))
      .def(py::init<std::size_t, std::vector<BitIndex>>(), py::arg("width"), py::arg("active"))
      .def_property_readonly("width", &Sdr::width)
      .def_property_readonly("active", [](const Sdr& s) { return std::vector<BitIndex>(s.active().begin(), s.active().end()); })
      .def_property_readonly("sparsity", &Sdr::sparsity)
      .def("__len__", &Sdr::active_count)
      .def("__contains__", &Sdr::test)
      .def("__eq__", [](const Sdr& a, const Sdr& b) { return a == b; })
      .def("__repr__", [](const Sdr& s) {
        return "Sdr(width=" + std::to_string(s.width()) + ", active=" + std::to_string(s.active_count()) + ")";
      });
  m.def("overlap", &overlap, py::arg("a"), py::arg("b"));
  m.def("concatenate", [](const std::vector<Sdr>& parts) { return concatenate(parts); }, py::arg("parts"));

  py::enum_<AggregationKind>(m, "AggregationKind")
      .value("MEAN", AggregationKind::Mean)
      .value("NONZERO_MEAN", AggregationKind::NonZeroMean);
  m.def("aggregate_mean", [](const std::vector<double>& s) { return aggregate_mean(s); }, py::arg("scores"));
  m.def("aggregate_nonzero_mean", [](const std::vector<double>& s) { return aggregate_nonzero_mean(s); }, py::arg("scores"));
  m.def("aggregate", [](AggregationKind k, const std::vector<double>& s) { return aggregate(k, s); }, py::arg("kind"),
        py::arg("scores"));
  m.def("moving_average", [](const std::vector<double>& s, std::size_t w) { return moving_average(s, w); },
        py::arg("series"), py::arg("window"));

  py::class_<SpParams>(m, "SpParams")
      .def(py::init<>())
      .def_readwrite("input_width", &SpParams::input_width)
      .def_readwrite("column_count", &SpParams::column_count)
      .def_readwrite("active_columns", &SpParams::active_columns)
      .def_readwrite("potential_fraction", &SpParams::potential_fraction)
      .def_readwrite("connected_threshold", &SpParams::connected_threshold)
      .def_readwrite("permanence_increment", &SpParams::permanence_increment)
      .def_readwrite("permanence_decrement", &SpParams::permanence_decrement)
      .def_readwrite("initial_permanence_band", &SpParams::initial_permanence_band)
      .def_readwrite("stimulus_threshold", &SpParams::stimulus_threshold)
      .def_readwrite("boosting_enabled", &SpParams::boosting_enabled)
      .def_readwrite("boost_strength", &SpParams::boost_strength)
      .def_readwrite("duty_cycle_period", &SpParams::duty_cycle_period)
      .def_readwrite("seed", &SpParams::seed);

  py::class_<TmParams>(m, "TmParams")
      .def(py::init<>())
      .def_readwrite("column_count", &TmParams::column_count)
      .def_readwrite("cells_per_column", &TmParams::cells_per_column)
      .def_readwrite("max_segments_per_cell", &TmParams::max_segments_per_cell)
      .def_readwrite("max_synapses_per_segment", &TmParams::max_synapses_per_segment)
      .def_readwrite("initial_permanence", &TmParams::initial_permanence)
      .def_readwrite("connected_threshold", &TmParams::connected_threshold)
      .def_readwrite("permanence_increment", &TmParams::permanence_increment)
      .def_readwrite("permanence_decrement", &TmParams::permanence_decrement)
      .def_readwrite("predicted_decrement", &TmParams::predicted_decrement)
      .def_readwrite("activation_threshold", &TmParams::activation_threshold)
      .def_readwrite("min_threshold", &TmParams::min_threshold)
      .def_readwrite("new_synapse_count", &TmParams::new_synapse_count)
      .def_readwrite("seed", &TmParams::seed);

  py::class_<SpatialPooler>(m, "SpatialPooler")
      .def(py::init<const SpParams&>(), py::arg("params"))
      .def("compute", &SpatialPooler::compute, py::arg("input"), py::arg("learn") = true)
      .def_property_readonly("params", &SpatialPooler::params)
      .def("snapshot", [](const SpatialPooler& sp) { return to_bytes(sp.snapshot()); })
      .def_static("restore", [](const py::bytes& b) { return SpatialPooler::restore(as_span(b)); }, py::arg("data"))
      .def("__eq__", [](const SpatialPooler& a, const SpatialPooler& b) { return a == b; });

  py::class_<TmStepResult>(m, "TmStepResult")
      .def_readonly("anomaly_score", &TmStepResult::anomaly_score)
      .def_readonly("predictive_column_count", &TmStepResult::predictive_column_count)
      .def_readonly("active_column_count", &TmStepResult::active_column_count);

  py::class_<TemporalMemory>(m, "TemporalMemory")
      .def(py::init<const TmParams&>(), py::arg("params"))
      .def("compute", &TemporalMemory::compute, py::arg("active_columns"), py::arg("learn") = true)
      .def("reset", &TemporalMemory::reset)
      .def_property_readonly("params", &TemporalMemory::params)
      .def_property_readonly("segment_count", [](const TemporalMemory& tm) { return tm.segment_count(); })
      .def_property_readonly("synapse_count", &TemporalMemory::synapse_count)
      .def("predictive_cells", &TemporalMemory::predictive_cells)
      .def("snapshot", [](const TemporalMemory& tm) { return to_bytes(tm.snapshot()); })
      .def_static("restore", [](const py::bytes& b) { return TemporalMemory::restore(as_span(b)); }, py::arg("data"))
      .def("__eq__", [](const TemporalMemory& a, const TemporalMemory& b) { return a == b; });

  py::class_<EncoderConfig>(m, "EncoderConfig")
      .def(py::init<>())
      .def_property(
          "frame_size", [](const EncoderConfig& e) { return to_pair(e.frame_size); },
          [](EncoderConfig& e, const Coord& c) { e.frame_size = to_coord(c); })
      .def_property(
          "cell_size", [](const EncoderConfig& e) { return to_pair(e.cell_size); },
          [](EncoderConfig& e, const Coord& c) { e.cell_size = to_coord(c); })
      .def_readwrite("class_count", &EncoderConfig::class_count)
      .def_readwrite("min_sparsity", &EncoderConfig::min_sparsity)
      .def_readwrite("empty_pattern_sparsity", &EncoderConfig::empty_pattern_sparsity)
      .def_readwrite("seed", &EncoderConfig::seed)
      .def_property_readonly("grid_size", [](const EncoderConfig& e) { return to_pair(e.grid_size()); });

  m.def(
      "encode_cell",
      [](const EncoderConfig& e, const Pixels& frame, const Coord& cell) {
        const CellInput in = encode_cell(e, to_frame(frame), to_coord(cell));
        return py::make_tuple(in.per_class, std::vector<bool>(in.was_empty.begin(), in.was_empty.end()));
      },
      py::arg("config"), py::arg("frame"), py::arg("cell"), "Returns (per-class SDRs, per-class emptiness).");
  m.def(
      "active_pixel_stats",
      [](const EncoderConfig& e, const std::vector<Pixels>& frames, const Coord& cell) {
        std::vector<Frame> converted;
        for (const auto& f : frames) converted.push_back(to_frame(f));
        const PixelStats s = active_pixel_stats(e, converted, to_coord(cell));
        return py::make_tuple(s.mean, s.std_dev);
      },
      py::arg("config"), py::arg("frames"), py::arg("cell"), "Returns (mean, std_dev) of encoded active bits.");

  py::class_<CellOverride>(m, "CellOverride")
      .def(py::init<>())
      .def_readwrite("sp", &CellOverride::sp)
      .def_readwrite("tm", &CellOverride::tm);

  py::class_<GridConfig>(m, "GridConfig")
      .def(py::init<>())
      .def_readwrite("encoder", &GridConfig::encoder)
      .def_readwrite("multistep_n", &GridConfig::multistep_n)
      .def_readwrite("default_sp", &GridConfig::default_sp)
      .def_readwrite("default_tm", &GridConfig::default_tm)
      .def_readwrite("suppression_enabled", &GridConfig::suppression_enabled)
      .def_readwrite("aggregation", &GridConfig::aggregation)
      .def_readwrite("smoothing_window", &GridConfig::smoothing_window)
      .def_readwrite("seed", &GridConfig::seed)
      .def(
          "set_override",
          [](GridConfig& g, const Coord& cell, const CellOverride& o) { g.per_cell_overrides[to_coord(cell)] = o; },
          py::arg("cell"), py::arg("override"))
      .def("overrides",
           [](const GridConfig& g) {
             std::map<Coord, CellOverride> out;
             for (const auto& [c, o] : g.per_cell_overrides) out[to_pair(c)] = o;
             return out;
           })
      .def("validate", &GridConfig::validate);

  py::class_<FrameResult>(m, "FrameResult")
      .def_readonly("frame_index", &FrameResult::frame_index)
      .def_property_readonly("raw_scores", [](const FrameResult& r) { return to_array(r.raw_scores); })
      .def_property_readonly("reported_scores", [](const FrameResult& r) { return to_array(r.reported_scores); })
      .def_property_readonly("certainty", [](const FrameResult& r) { return to_array(r.certainty); })
      .def_readonly("aggregate", &FrameResult::aggregate)
      .def_readonly("aggregate_smoothed", &FrameResult::aggregate_smoothed);

  py::class_<GridModel>(m, "GridModel")
      .def(py::init<GridConfig>(), py::arg("config"))
      .def(
          "step", [](GridModel& g, const Pixels& frame, bool learn) { return g.step(to_frame(frame), learn); },
          py::arg("frame"), py::arg("learn") = true, "Frame shape is (rows, cols) or (classes, rows, cols).")
      .def_property_readonly("config", &GridModel::config)
      .def_property_readonly("grid_size", [](const GridModel& g) { return to_pair(g.grid_size()); })
      .def_property_readonly("frames_seen", &GridModel::frames_seen)
      .def_property("parallel", &GridModel::parallel, &GridModel::set_parallel)
      .def("reset_smoothing", &GridModel::reset_smoothing)
      .def("snapshot", [](const GridModel& g) { return to_bytes(g.snapshot()); })
      .def_static("restore", [](const py::bytes& b) { return GridModel::restore(as_span(b)); }, py::arg("data"))
      .def("__eq__", [](const GridModel& a, const GridModel& b) { return a == b; });

  m.def(
      "render_heatmap",
      [](const FrameResult& r, const Coord& cell_size) {
        const RgbImage img = render_heatmap(r, to_coord(cell_size));
        py::array_t<std::uint8_t> out({img.rows(), img.cols(), std::size_t{3}});
        std::uint8_t* data = out.mutable_data();
        for (const Rgb& px : img.values()) {
          *data++ = px.r;
          *data++ = px.g;
          *data++ = px.b;
        }
        return out;
      },
      py::arg("result"), py::arg("cell_size"), "Returns an RGB array of shape (rows, cols, 3).");

  py::class_<Scenario>(m, "Scenario")
      .def_property_readonly("frame_size", [](const Scenario& s) { return to_pair(s.frame_size); })
      .def_readwrite("frame_count", &Scenario::frame_count)
      .def_readonly("class_count", &Scenario::class_count)
      .def_readwrite("seed", &Scenario::seed)
      .def_property_readonly("object_count", [](const Scenario& s) { return s.objects.size(); })
      .def_property_readonly("event_count", [](const Scenario& s) { return s.events.size(); });
  m.def(
      "scenario_from_config", [](const std::string& text) { return make_scenario(parse_config(text, "<config>")); },
      py::arg("text"), "Builds a scenario from scenario.* key = value lines.");
  m.def(
      "generate",
      [](const Scenario& s) {
        const std::vector<Frame> frames = generate(s);
        py::array_t<std::uint8_t> out({s.frame_count, s.class_count, s.frame_size.row, s.frame_size.col});
        std::uint8_t* data = out.mutable_data();
        for (const Frame& f : frames) {
          for (const Bitmap& plane : f) data = std::copy(plane.values().begin(), plane.values().end(), data);
        }
        return out;
      },
      py::arg("scenario"), "Returns frames as an array of shape (frames, classes, rows, cols).");

  m.def(
      "run",
      [](const std::string& text, const std::vector<std::string>& overrides) {
        const RunConfig config = make_run_config(config_from(text, overrides));
        RunSummary summary;
        {
          py::gil_scoped_release release;
          summary = run(config);
        }
        return py::dict(py::arg("frames_processed") = summary.frames_processed,
                        py::arg("rows_written") = summary.rows_written);
      },
      py::arg("config_text"), py::arg("overrides") = std::vector<std::string>{},
      "Runs the pipeline described by key = value configuration text.");
}
