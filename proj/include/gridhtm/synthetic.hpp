#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "gridhtm/bitmap.hpp"

namespace gridhtm {

/// Signed pixel position of an object's top-left corner.
struct Position {
  std::int64_t row = 0;
  std::int64_t col = 0;
  friend bool operator==(const Position&, const Position&) = default;
};

/// Moves by `velocity` pixels per frame and wraps around the frame edges
/// (pixels wrap too), so the scene is periodic.
struct LinearLoop {
  Position start;
  Position velocity;
  friend bool operator==(const LinearLoop&, const LinearLoop&) = default;
};

struct Stationary {
  Position position;
  friend bool operator==(const Stationary&, const Stationary&) = default;
};

/// Explicit per-frame positions, cycled when the list runs out.
struct Scripted {
  std::vector<Position> positions;
  friend bool operator==(const Scripted&, const Scripted&) = default;
};

using ObjectPath = std::variant<LinearLoop, Stationary, Scripted>;

/// Solid rectangle of set pixels on one class plane.
struct ObjectTrack {
  CellCoord shape{8, 8};
  ObjectPath path = Stationary{};
  std::size_t class_index = 0;
  friend bool operator==(const ObjectTrack&, const ObjectTrack&) = default;
};

/// Frames start_frame .. start_frame + duration - 1 all show the scene at
/// start_frame; scene time resumes afterwards.
struct FrameRepeat {
  std::size_t start_frame = 0;
  std::size_t duration = 1;
  friend bool operator==(const FrameRepeat&, const FrameRepeat&) = default;
};

/// Scene time jumps ahead by skipped_count frames at output frame at_frame.
struct FrameSkip {
  std::size_t at_frame = 0;
  std::size_t skipped_count = 1;
  friend bool operator==(const FrameSkip&, const FrameSkip&) = default;
};

using Event = std::variant<FrameRepeat, FrameSkip>;

struct NoiseSpec {
  double pixel_flip_probability = 0.0;
  /// Chance that an object vanishes for a single frame.
  double object_dropout_probability = 0.0;
  friend bool operator==(const NoiseSpec&, const NoiseSpec&) = default;
};

struct Scenario {
  CellCoord frame_size{120, 120};
  std::size_t frame_count = 1;
  std::size_t class_count = 1;
  std::vector<ObjectTrack> objects;
  std::vector<Event> events;
  NoiseSpec noise;
  std::uint64_t seed = 0;

  /// Every violated constraint, one message each; empty when valid.
  std::vector<std::string> validate() const;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// Scene time shown by every output frame, after applying events.
std::vector<std::uint64_t> scene_times(const Scenario& scenario);

/// Renders the scenario. Noise is seeded per scene time, so repeated frames
/// stay identical and skipped frames are exactly removed. Throws
/// ConfigError listing every violation of an invalid scenario.
std::vector<Frame> generate(const Scenario& scenario);

/// Renders the scene at one scene time.
Frame render_scene(const Scenario& scenario, std::uint64_t scene_time);

}  // namespace gridhtm
