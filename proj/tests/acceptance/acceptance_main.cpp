// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "gridhtm/aggregation.hpp"
#include "gridhtm/errors.hpp"
#include "gridhtm/grid_encoder.hpp"
#include "gridhtm/grid_model.hpp"
#include "gridhtm/image_io.hpp"
#include "gridhtm/runner.hpp"
#include "gridhtm/synthetic.hpp"
#include "test_support.hpp"

namespace {

using namespace gridhtm;
using testing::kTrafficPeriod;
using testing::traffic;
using testing::traffic_grid;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Linear interpolation between closest ranks.
double percentile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

double cell_mean(const Grid<double>& g) { return aggregate_mean(g.values()); }

// Frames 0 .. kWarmFrames-1 cover 50 cycles of the traffic scene.
constexpr std::size_t kCycles = 50;
constexpr std::size_t kWarmFrames = kCycles * kTrafficPeriod;
constexpr std::size_t kEventFrame = kWarmFrames + 5;

// Model trained on frames 0 .. kEventFrame-1 of the traffic scene.
const GridModel& warm_model(std::size_t multistep_n) {
  static std::map<std::size_t, GridModel> cache;
  auto it = cache.find(multistep_n);
  if (it == cache.end()) {
    GridConfig g = traffic_grid();
    g.multistep_n = multistep_n;
    GridModel m(g);
    const Scenario s = traffic(kEventFrame);
    for (const Frame& f : generate(s)) m.step(f, true);
    it = cache.emplace(multistep_n, std::move(m)).first;
  }
  return it->second;
}

Outcome aggregation_formulas() {
  const std::vector<double> example{0.0, 0.0, 0.5, 1.0};
  const bool mean_ok = aggregate_mean(example) == 0.375;
  const bool nzm_ok = aggregate_nonzero_mean(example) == 0.75;
  const bool zero_ok = aggregate_nonzero_mean(std::vector<double>(7, 0.0)) == 0.0;

  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<std::size_t> len(1, 40);
  std::uniform_real_distribution<double> val(0.0, 1.0);
  std::bernoulli_distribution zero(0.4);
  std::size_t dominance_failures = 0;
  std::size_t invariance_failures = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> s(len(rng));
    for (double& x : s) x = zero(rng) ? 0.0 : val(rng);
    if (aggregate_nonzero_mean(s) < aggregate_mean(s)) ++dominance_failures;
    std::vector<double> padded = s;
    padded.resize(s.size() + len(rng), 0.0);
    if (aggregate_nonzero_mean(padded) != aggregate_nonzero_mean(s)) ++invariance_failures;
  }
  return {mean_ok && nzm_ok && zero_ok && dominance_failures == 0 && invariance_failures == 0,
          "mean=" + fmt(aggregate_mean(example)) + " nonzero_mean=" + fmt(aggregate_nonzero_mean(example)) +
              " all_zero=" + fmt(aggregate_nonzero_mean(std::vector<double>(7, 0.0))) +
              " dominance_failures=" + std::to_string(dominance_failures) + "/1000" +
              " invariance_failures=" + std::to_string(invariance_failures) + "/1000"};
}

Outcome noisy_vs_clean() {
  constexpr std::size_t frames = 20 * kTrafficPeriod;
  constexpr std::size_t settle = 10 * kTrafficPeriod;
  const auto series = [&](double flip) {
    Scenario s = traffic(frames);
    s.noise.pixel_flip_probability = flip;
    GridModel m(traffic_grid());
    std::vector<double> nzm;
    std::vector<double> mean;
    for (const Frame& f : generate(s)) {
      const FrameResult r = m.step(f, true);
      if (r.frame_index < settle) continue;
      nzm.push_back(aggregate_nonzero_mean(r.reported_scores.values()));
      mean.push_back(aggregate_mean(r.reported_scores.values()));
    }
    return std::pair{median(nzm), median(mean)};
  };
  const auto [nzm_clean, mean_clean] = series(0.0);
  const auto [nzm_noisy, mean_noisy] = series(0.03);
  const double nzm_shift = nzm_noisy - nzm_clean;
  const double mean_shift = std::abs(mean_noisy - mean_clean);
  const bool pass = nzm_noisy > nzm_clean && nzm_shift > 2.0 * mean_shift;
  return {pass, "median nonzero_mean clean=" + fmt(nzm_clean) + " noisy=" + fmt(nzm_noisy) + "; median mean clean=" +
                    fmt(mean_clean) + " noisy=" + fmt(mean_noisy) + "; shift ratio=" +
                    (mean_shift > 0.0 ? fmt(nzm_shift / mean_shift) : std::string("inf"))};
}

Outcome sequence_convergence() {
  GridModel m(traffic_grid());
  const auto frames = generate(traffic(kWarmFrames));
  std::vector<double> cycle_mean(kCycles, 0.0);
  double frame0 = 0.0;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const FrameResult r = m.step(frames[i], true);
    const double mean = cell_mean(r.raw_scores);
    if (i == 0) frame0 = mean;
    cycle_mean[i / kTrafficPeriod] += mean / static_cast<double>(kTrafficPeriod);
  }
  const double first = cycle_mean.front();
  const double last = cycle_mean.back();
  const bool pass = frame0 == 1.0 && last < 0.1 && first > last;
  return {pass, "frame 0 mean=" + fmt(frame0) + " first cycle mean=" + fmt(first) + " final cycle mean=" + fmt(last)};
}

// Max reported score over the grid rows the objects travel along, within
// the repeat window.
double repeat_window_max(std::size_t multistep_n, bool with_repeat) {
  constexpr std::size_t duration = 20;
  GridModel m = warm_model(multistep_n);
  Scenario s = traffic(kEventFrame + duration);
  if (with_repeat) s.events.push_back(FrameRepeat{kEventFrame, duration});
  const auto frames = generate(s);
  double best = 0.0;
  for (std::size_t i = kEventFrame; i < frames.size(); ++i) {
    const FrameResult r = m.step(frames[i], true);
    for (std::size_t row : {std::size_t{0}, std::size_t{2}}) {
      for (std::size_t c = 0; c < m.grid_size().col; ++c) best = std::max(best, r.reported_scores.at(row, c));
    }
  }
  return best;
}

Outcome frame_repeat() {
  const double repeat2 = repeat_window_max(2, true);
  const double control2 = repeat_window_max(2, false);
  const double repeat1 = repeat_window_max(1, true);
  const double control1 = repeat_window_max(1, false);
  const double margin2 = repeat2 - control2;
  return {margin2 >= 0.3, "n=2 repeat max=" + fmt(repeat2) + " control max=" + fmt(control2) +
                              " margin=" + fmt(margin2) + "; n=1 (recorded) repeat max=" + fmt(repeat1) +
                              " control max=" + fmt(control1) + " margin=" + fmt(repeat1 - control1)};
}

Outcome frame_skip() {
  constexpr std::size_t skipped = 100;
  constexpr std::size_t window = 200;
  GridConfig g = traffic_grid();
  GridModel m(g);
  Scenario s = traffic(kEventFrame + 1);
  s.events.push_back(FrameSkip{kEventFrame, skipped});
  const auto frames = generate(s);
  std::vector<double> before;
  double at_skip = 0.0;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const FrameResult r = m.step(frames[i], true);
    if (i + window >= kEventFrame && i < kEventFrame) before.push_back(r.aggregate);
    if (i == kEventFrame) at_skip = r.aggregate;
  }
  const double p95 = percentile(before, 0.95);
  return {at_skip >= 2.0 * p95, "skip-frame aggregate=" + fmt(at_skip) + " p95 of previous " +
                                    std::to_string(before.size()) + " frames=" + fmt(p95) +
                                    (p95 > 0.0 ? " ratio=" + fmt(at_skip / p95) : std::string(" ratio=inf"))};
}

Outcome transition_suppression() {
  Scenario s = traffic(400);
  s.noise.object_dropout_probability = 0.1;
  const auto frames = generate(s);
  GridConfig on = traffic_grid();
  GridConfig off = traffic_grid();
  off.suppression_enabled = false;
  GridModel with(on);
  GridModel without(off);

  std::size_t transitions = 0;
  std::size_t nonzero_reported = 0;
  std::size_t raw_positive_without = 0;
  Grid<CellInput> prev;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const Grid<CellInput> now = encode_frame(on.encoder, frames[i]);
    const FrameResult a = with.step(frames[i], true);
    const FrameResult b = without.step(frames[i], true);
    if (i > 0) {
      for (std::size_t k = 0; k < now.size(); ++k) {
        bool entered = false;
        for (std::size_t c = 0; c < now.values()[k].was_empty.size(); ++c) {
          entered = entered || (prev.values()[k].was_empty[c] != 0 && now.values()[k].was_empty[c] == 0);
        }
        if (!entered) continue;
        ++transitions;
        if (a.reported_scores.values()[k] != 0.0) ++nonzero_reported;
        if (b.raw_scores.values()[k] > 0.0) ++raw_positive_without;
      }
    }
    prev = now;
  }
  return {transitions > 0 && nonzero_reported == 0 && raw_positive_without > 0,
          std::to_string(transitions) + " transitions, " + std::to_string(nonzero_reported) +
              " reported nonzero with suppression, " + std::to_string(raw_positive_without) +
              " with raw > 0 when disabled"};
}

Outcome active_pixel_variance() {
  const auto frames = generate(traffic(10 * kTrafficPeriod));
  EncoderConfig enabled = traffic_grid().encoder;
  EncoderConfig disabled = enabled;
  disabled.min_sparsity = 0;
  disabled.empty_pattern_sparsity = 0;
  const CellCoord cell{0, 3};
  const PixelStats a = active_pixel_stats(enabled, frames, cell);
  const PixelStats b = active_pixel_stats(disabled, frames, cell);
  return {a.std_dev < b.std_dev, "cell (0,3) std with empty pattern=" + fmt(a.std_dev) + " without=" + fmt(b.std_dev)};
}

Outcome determinism() {
  testing::TempDir dir;
  const auto config = [&](const std::string& tag, bool parallel) {
    RunConfig rc;
    rc.scenario = traffic(240);
    rc.scenario->noise.pixel_flip_probability = 0.01;
    rc.grid = traffic_grid();
    rc.parallel = parallel;
    rc.outputs.scores_csv = dir / (tag + ".csv");
    rc.outputs.cell_scores = true;
    rc.outputs.heatmap_dir = dir / (tag + "_heat");
    return rc;
  };
  run(config("a", true));
  run(config("b", true));
  run(config("seq", false));
  const auto same = [&](const std::string& x, const std::string& y) {
    if (read_file(dir / (x + ".csv")) != read_file(dir / (y + ".csv"))) return false;
    for (std::size_t i = 0; i < 240; ++i) {
      const std::string name = frame_stem(i) + ".ppm";
      if (read_file(dir / (x + "_heat") / name) != read_file(dir / (y + "_heat") / name)) return false;
    }
    return true;
  };
  const bool rerun = same("a", "b");
  const bool parallel = same("a", "seq");
  return {rerun && parallel, std::string("rerun identical=") + (rerun ? "yes" : "no") +
                                 " parallel==sequential=" + (parallel ? "yes" : "no") + " (240 frames, CSV + PPM)"};
}

Outcome locality() {
  const auto base = generate(traffic(300));
  std::vector<Frame> changed = base;
  // cell (1,1) lies between the two roads; flash a blob there
  for (std::size_t i = 0; i < changed.size(); ++i) {
    if (i % 5 < 2) testing::fill(changed[i], 0, {14, 15}, {6, 5});
  }
  GridModel a(traffic_grid());
  GridModel b(traffic_grid());
  std::size_t mismatches = 0;
  std::size_t a_cell_differs = 0;
  for (std::size_t i = 0; i < base.size(); ++i) {
    const FrameResult ra = a.step(base[i], true);
    const FrameResult rb = b.step(changed[i], true);
    for (std::size_t r = 0; r < a.grid_size().row; ++r) {
      for (std::size_t c = 0; c < a.grid_size().col; ++c) {
        const bool is_a = r == 1 && c == 1;
        if (is_a) {
          a_cell_differs += ra.raw_scores.at(r, c) != rb.raw_scores.at(r, c) ? 1 : 0;
        } else {
          mismatches += ra.raw_scores.at(r, c) != rb.raw_scores.at(r, c) ? 1 : 0;
        }
      }
    }
  }
  return {mismatches == 0, std::to_string(mismatches) + " differing raw scores outside cell A over 300 frames (cell A "
                               "itself differed on " + std::to_string(a_cell_differs) + " frames)"};
}

Outcome snapshot_round_trip() {
  Scenario s = traffic(250);
  s.noise.pixel_flip_probability = 0.01;
  const auto frames = generate(s);
  GridModel original(traffic_grid());
  for (std::size_t i = 0; i < 150; ++i) original.step(frames[i], true);
  GridModel restored = GridModel::restore(original.snapshot());
  std::size_t mismatches = 0;
  for (std::size_t i = 150; i < frames.size(); ++i) {
    mismatches += original.step(frames[i], true) == restored.step(frames[i], true) ? 0 : 1;
  }
  const bool state = original == restored;
  return {mismatches == 0 && state, std::to_string(mismatches) + " differing FrameResults over 100 frames; final state " +
                                        (state ? "equal" : "different")};
}

Outcome dilution() {
  constexpr std::size_t step = 200;
  std::string detail;
  bool pass = true;
  for (std::size_t n : {std::size_t{2}, std::size_t{3}}) {
    const Scenario s = traffic(step + 1);
    auto clean = generate(s);
    Scenario without_first = s;
    without_first.objects.erase(without_first.objects.begin());
    std::vector<Frame> dropped = clean;
    dropped[step] = render_scene(without_first, step);

    GridConfig g = traffic_grid();
    g.multistep_n = n;
    GridModel a(g);
    GridModel b(g);
    for (std::size_t i = 0; i <= step; ++i) {
      a.step(clean[i], true);
      b.step(dropped[i], true);
    }
    double worst = 0.0;
    std::size_t affected = 0;
    for (std::size_t r = 0; r < a.grid_size().row; ++r) {
      for (std::size_t c = 0; c < a.grid_size().col; ++c) {
        const Sdr& x = a.tm_input({r, c});
        const Sdr& y = b.tm_input({r, c});
        if (x.active_count() == 0) continue;
        const double lost = static_cast<double>(x.active_count() - overlap(x, y)) / static_cast<double>(x.active_count());
        if (lost > 0.0) ++affected;
        worst = std::max(worst, lost);
      }
    }
    const double bound = 1.0 / static_cast<double>(n);
    pass = pass && affected > 0 && worst <= bound;
    detail += (detail.empty() ? "" : "; ") + std::string("n=") + std::to_string(n) + " worst changed fraction=" +
              fmt(worst) + " bound=" + fmt(bound) + " cells affected=" + std::to_string(affected);
  }
  return {pass, detail};
}

}  // namespace

// With a 1-based criterion number as argument, runs only that criterion.
int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"aggregation formulas", aggregation_formulas},
      {"noisy vs clean aggregation contrast", noisy_vs_clean},
      {"sequence learning convergence", sequence_convergence},
      {"frame-repeat detection", frame_repeat},
      {"frame-skip detection", frame_skip},
      {"transition suppression", transition_suppression},
      {"active-pixel variance reduction", active_pixel_variance},
      {"determinism and parallel equivalence", determinism},
      {"locality", locality},
      {"snapshot round-trip", snapshot_round_trip},
      {"temporal-noise dilution", dilution},
  };
  std::size_t first = 0;
  std::size_t last = criteria.size();
  if (argc > 1) {
    const std::size_t only = std::stoul(argv[1]);
    if (only < 1 || only > criteria.size()) {
      std::cerr << "criterion number must be 1.." << criteria.size() << "\n";
      return 2;
    }
    first = only - 1;
    last = only;
  }
  int failures = 0;
  for (std::size_t i = first; i < last; ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << i + 1 << " " << criteria[i].first << ": " << o.detail
              << " [" << fmt(secs) << " s]" << std::endl;
    failures += o.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
