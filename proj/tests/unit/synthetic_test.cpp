#include "gridhtm/synthetic.hpp"

#include <gtest/gtest.h>

#include "gridhtm/errors.hpp"

namespace gridhtm {
namespace {

Scenario moving(std::size_t frames) {
  Scenario s;
  s.frame_size = {40, 40};
  s.frame_count = frames;
  s.seed = 11;
  s.objects.push_back(ObjectTrack{{5, 5}, LinearLoop{{1, 2}, {1, 3}}, 0});
  return s;
}

std::size_t set_pixels(const Frame& f) {
  std::size_t n = 0;
  for (const Bitmap& b : f) {
    for (auto v : b.values()) n += v != 0 ? 1 : 0;
  }
  return n;
}

TEST(Synthetic, NoObjectsNoNoiseIsBlank) {
  Scenario s;
  s.frame_size = {16, 24};
  s.frame_count = 10;
  s.class_count = 2;
  const auto frames = generate(s);
  ASSERT_EQ(frames.size(), 10u);
  for (const Frame& f : frames) {
    ASSERT_EQ(f.size(), 2u);
    EXPECT_EQ(f[0].rows(), 16u);
    EXPECT_EQ(f[0].cols(), 24u);
    EXPECT_EQ(set_pixels(f), 0u);
  }
}

TEST(Synthetic, StationaryObjectGivesIdenticalFrames) {
  Scenario s;
  s.frame_size = {20, 20};
  s.frame_count = 8;
  s.objects.push_back(ObjectTrack{{4, 3}, Stationary{{5, 6}}, 0});
  const auto frames = generate(s);
  for (const Frame& f : frames) EXPECT_EQ(f, frames[0]);
  EXPECT_EQ(set_pixels(frames[0]), 12u);
  EXPECT_EQ(frames[0][0].at(5, 6), 1);
  EXPECT_EQ(frames[0][0].at(8, 8), 1);
  EXPECT_EQ(frames[0][0].at(9, 8), 0);
}

TEST(Synthetic, LinearLoopWraps) {
  Scenario s;
  s.frame_size = {10, 10};
  s.frame_count = 12;
  s.objects.push_back(ObjectTrack{{2, 2}, LinearLoop{{0, 0}, {0, 3}}, 0});
  const auto frames = generate(s);
  EXPECT_EQ(frames[3][0].at(0, 9), 1);
  EXPECT_EQ(frames[3][0].at(0, 0), 1);
  EXPECT_EQ(set_pixels(frames[3]), 4u);
  EXPECT_EQ(frames[10], frames[0]);
}

TEST(Synthetic, ScriptedPathCycles) {
  Scenario s;
  s.frame_size = {10, 10};
  s.frame_count = 5;
  s.objects.push_back(ObjectTrack{{1, 1}, Scripted{{{0, 0}, {4, 4}}}, 0});
  const auto frames = generate(s);
  EXPECT_EQ(frames[1][0].at(4, 4), 1);
  EXPECT_EQ(frames[2], frames[0]);
  EXPECT_EQ(frames[3], frames[1]);
}

TEST(Synthetic, ObjectsDrawOnTheirClassPlane) {
  Scenario s;
  s.frame_size = {10, 10};
  s.class_count = 2;
  s.objects.push_back(ObjectTrack{{2, 2}, Stationary{{1, 1}}, 1});
  const Frame f = generate(s)[0];
  EXPECT_EQ(set_pixels(Frame{f[0]}), 0u);
  EXPECT_EQ(set_pixels(Frame{f[1]}), 4u);
}

TEST(Synthetic, RepeatFreezesTheScene) {
  Scenario s = moving(200);
  s.events.push_back(FrameRepeat{100, 20});
  const auto frames = generate(s);
  for (std::size_t i = 100; i < 120; ++i) EXPECT_EQ(frames[i], frames[100]) << i;
  EXPECT_NE(frames[120], frames[100]);
  const auto plain = generate(moving(200));
  EXPECT_EQ(frames[100], plain[100]);
  EXPECT_EQ(frames[120], plain[101]);
}

TEST(Synthetic, SkipRemovesFrames) {
  Scenario s = moving(100);
  s.noise.pixel_flip_probability = 0.02;
  s.events.push_back(FrameSkip{30, 7});
  const auto skipped = generate(s);
  Scenario full = s;
  full.events.clear();
  full.frame_count = 107;
  const auto reference = generate(full);
  for (std::size_t i = 0; i < 30; ++i) EXPECT_EQ(skipped[i], reference[i]);
  for (std::size_t i = 30; i < 100; ++i) EXPECT_EQ(skipped[i], reference[i + 7]) << i;
}

TEST(Synthetic, SceneTimes) {
  Scenario s = moving(10);
  s.events.push_back(FrameRepeat{2, 3});
  s.events.push_back(FrameSkip{6, 4});
  const std::vector<std::uint64_t> expected{0, 1, 2, 2, 2, 3, 8, 9, 10, 11};
  EXPECT_EQ(scene_times(s), expected);
}

TEST(Synthetic, DeterministicPerSeed) {
  Scenario s = moving(50);
  s.noise.pixel_flip_probability = 0.05;
  s.noise.object_dropout_probability = 0.1;
  EXPECT_EQ(generate(s), generate(s));
  Scenario other = s;
  other.seed = 12;
  EXPECT_NE(generate(s), generate(other));
}

TEST(Synthetic, NoiseIsRoughlyCalibrated) {
  Scenario s;
  s.frame_size = {100, 100};
  s.frame_count = 20;
  s.noise.pixel_flip_probability = 0.03;
  std::size_t total = 0;
  for (const Frame& f : generate(s)) total += set_pixels(f);
  const double rate = static_cast<double>(total) / (100.0 * 100.0 * 20.0);
  EXPECT_NEAR(rate, 0.03, 0.005);
}

TEST(Synthetic, DropoutHidesWholeObjects) {
  Scenario s = moving(400);
  s.noise.object_dropout_probability = 0.25;
  std::size_t hidden = 0;
  for (const Frame& f : generate(s)) {
    const std::size_t n = set_pixels(f);
    ASSERT_TRUE(n == 0 || n == 25);
    hidden += n == 0 ? 1 : 0;
  }
  EXPECT_GT(hidden, 60u);
  EXPECT_LT(hidden, 140u);
}

TEST(Synthetic, ValidationListsEveryProblem) {
  Scenario s;
  s.frame_size = {10, 10};
  s.frame_count = 5;
  s.noise.pixel_flip_probability = 1.5;
  s.objects.push_back(ObjectTrack{{20, 2}, Stationary{}, 3});
  s.events.push_back(FrameRepeat{4, 5});
  const auto errors = s.validate();
  EXPECT_GE(errors.size(), 4u);
  try {
    generate(s);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    const std::string what = e.what();
    for (const auto& msg : errors) EXPECT_NE(what.find(msg), std::string::npos) << msg;
  }
}

}  // namespace
}  // namespace gridhtm
