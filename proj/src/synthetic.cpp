#include "gridhtm/synthetic.hpp"

#include "gridhtm/errors.hpp"
#include "gridhtm/random.hpp"

namespace gridhtm {

namespace {

constexpr std::uint64_t kDropoutSalt = 0xD0D0;
constexpr std::uint64_t kFlipSalt = 0xF11F;

std::int64_t wrap(std::int64_t v, std::size_t n) {
  const auto m = static_cast<std::int64_t>(n);
  return ((v % m) + m) % m;
}

bool fits(Position p, CellCoord shape, CellCoord frame) {
  return p.row >= 0 && p.col >= 0 && static_cast<std::size_t>(p.row) + shape.row <= frame.row &&
         static_cast<std::size_t>(p.col) + shape.col <= frame.col;
}

std::string label(std::size_t i) { return "object " + std::to_string(i) + ": "; }

}  // namespace

std::vector<std::string> Scenario::validate() const {
  std::vector<std::string> errors;
  if (frame_size.row == 0 || frame_size.col == 0) errors.emplace_back("frame size must be positive");
  if (frame_count == 0) errors.emplace_back("frame_count must be positive");
  if (class_count == 0) errors.emplace_back("class_count must be positive");
  if (!(noise.pixel_flip_probability >= 0.0 && noise.pixel_flip_probability < 1.0)) {
    errors.emplace_back("noise.pixel_flip must be in [0, 1)");
  }
  if (!(noise.object_dropout_probability >= 0.0 && noise.object_dropout_probability < 1.0)) {
    errors.emplace_back("noise.dropout must be in [0, 1)");
  }
  for (std::size_t i = 0; i < objects.size(); ++i) {
    const ObjectTrack& o = objects[i];
    if (o.shape.row == 0 || o.shape.col == 0) errors.push_back(label(i) + "shape must be non-empty");
    if (o.shape.row > frame_size.row || o.shape.col > frame_size.col) {
      errors.push_back(label(i) + "shape is larger than the frame");
    }
    if (o.class_index >= class_count) errors.push_back(label(i) + "class index out of range");
    if (const auto* s = std::get_if<Stationary>(&o.path); s != nullptr && !fits(s->position, o.shape, frame_size)) {
      errors.push_back(label(i) + "stationary position puts the object outside the frame");
    }
    if (const auto* s = std::get_if<Scripted>(&o.path)) {
      if (s->positions.empty()) errors.push_back(label(i) + "scripted path has no positions");
      for (std::size_t k = 0; k < s->positions.size(); ++k) {
        if (!fits(s->positions[k], o.shape, frame_size)) {
          errors.push_back(label(i) + "scripted position " + std::to_string(k) + " is outside the frame");
        }
      }
    }
  }
  for (std::size_t i = 0; i < events.size(); ++i) {
    const std::string tag = "event " + std::to_string(i) + ": ";
    if (const auto* r = std::get_if<FrameRepeat>(&events[i])) {
      if (r->duration == 0) errors.push_back(tag + "repeat duration must be positive");
      if (r->start_frame + r->duration > frame_count) errors.push_back(tag + "repeat window exceeds frame_count");
    } else {
      const auto& s = std::get<FrameSkip>(events[i]);
      if (s.skipped_count == 0) errors.push_back(tag + "skip count must be positive");
      if (s.at_frame >= frame_count) errors.push_back(tag + "skip frame exceeds frame_count");
    }
  }
  return errors;
}

std::vector<std::uint64_t> scene_times(const Scenario& scenario) {
  std::vector<std::uint64_t> times(scenario.frame_count);
  std::uint64_t scene = 0;
  for (std::size_t i = 0; i < scenario.frame_count; ++i) {
    bool repeated = false;
    std::size_t repeat_start = 0;
    for (const Event& e : scenario.events) {
      if (const auto* s = std::get_if<FrameSkip>(&e); s != nullptr && s->at_frame == i) scene += s->skipped_count;
      if (const auto* r = std::get_if<FrameRepeat>(&e);
          r != nullptr && i > r->start_frame && i < r->start_frame + r->duration) {
        repeated = true;
        repeat_start = r->start_frame;
      }
    }
    if (repeated) {
      times[i] = times[repeat_start];
    } else {
      times[i] = scene++;
    }
  }
  return times;
}

Frame render_scene(const Scenario& scenario, std::uint64_t scene_time) {
  const CellCoord size = scenario.frame_size;
  Frame frame(scenario.class_count, Bitmap(size.row, size.col, 0));
  const auto t = static_cast<std::int64_t>(scene_time);

  for (std::size_t i = 0; i < scenario.objects.size(); ++i) {
    const ObjectTrack& o = scenario.objects[i];
    if (scenario.noise.object_dropout_probability > 0.0) {
      Rng rng(mix_seed(mix_seed(scenario.seed, kDropoutSalt + i), scene_time));
      if (rng.uniform() < scenario.noise.object_dropout_probability) continue;
    }
    Position p;
    if (const auto* loop = std::get_if<LinearLoop>(&o.path)) {
      p = {loop->start.row + loop->velocity.row * t, loop->start.col + loop->velocity.col * t};
    } else if (const auto* still = std::get_if<Stationary>(&o.path)) {
      p = still->position;
    } else {
      const auto& list = std::get<Scripted>(o.path).positions;
      p = list[scene_time % list.size()];
    }
    Bitmap& plane = frame[o.class_index];
    for (std::size_t r = 0; r < o.shape.row; ++r) {
      for (std::size_t c = 0; c < o.shape.col; ++c) {
        const auto pr = static_cast<std::size_t>(wrap(p.row + static_cast<std::int64_t>(r), size.row));
        const auto pc = static_cast<std::size_t>(wrap(p.col + static_cast<std::int64_t>(c), size.col));
        plane.at(pr, pc) = 1;
      }
    }
  }

  if (scenario.noise.pixel_flip_probability > 0.0) {
    for (std::size_t k = 0; k < frame.size(); ++k) {
      Rng rng(mix_seed(mix_seed(scenario.seed, kFlipSalt + k), scene_time));
      for (auto& px : frame[k].values()) {
        if (rng.uniform() < scenario.noise.pixel_flip_probability) px = px != 0 ? 0 : 1;
      }
    }
  }
  return frame;
}

std::vector<Frame> generate(const Scenario& scenario) {
  const std::vector<std::string> errors = scenario.validate();
  if (!errors.empty()) {
    std::string msg = "invalid scenario:";
    for (const auto& e : errors) msg += "\n  " + e;
    throw ConfigError(msg);
  }
  std::vector<Frame> frames;
  frames.reserve(scenario.frame_count);
  for (std::uint64_t t : scene_times(scenario)) frames.push_back(render_scene(scenario, t));
  return frames;
}

}  // namespace gridhtm
