// Copyright 2026 The EgoDemo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <fstream>
#include <set>

#include <gtest/gtest.h>
#include <json.hpp>

#include "egodemo/checksum.hpp"
#include "egodemo/episode.hpp"
#include "egodemo/imageops.hpp"
#include "egodemo/mixing.hpp"
#include "egodemo/pipeline.hpp"
#include "egodemo/png_io.hpp"
#include "egodemo/rendering.hpp"
#include "egodemo/synthetic.hpp"
#include "test_support.hpp"

namespace egodemo {
namespace {

namespace fs = std::filesystem;
using testing::dual_arm;
using testing::TempDir;

CameraModel small_camera() { return testing::sim_camera().resized(80, 60); }

Episode small_episode(std::size_t frames, std::uint64_t seed = 1) {
  const JointTrajectory traj = synthetic_trajectory(dual_arm(), frames, seed);
  return make_synthetic_episode(dual_arm(), small_camera(), traj, "ep" + std::to_string(seed),
                                testing::dual_arm_config().string());
}

void expect_same_episode(const Episode& a, const Episode& b) {
  EXPECT_EQ(a.id, b.id);
  EXPECT_EQ(a.camera, b.camera);
  EXPECT_EQ(a.trajectory, b.trajectory);
  ASSERT_EQ(a.frames.size(), b.frames.size());
  for (std::size_t t = 0; t < a.frames.size(); ++t) EXPECT_EQ(a.frames[t], b.frames[t]) << "frame " << t;
  EXPECT_EQ(a.robot_masks, b.robot_masks);
  EXPECT_EQ(a.robot_config, b.robot_config);
  EXPECT_EQ(a.provenance, b.provenance);
  EXPECT_EQ(a.config_json, b.config_json);
}

TEST(Checksum, KnownVectors) {
  EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Png, RoundTripsEveryKind) {
  TempDir dir("png");
  Rng rng(81);
  const RgbImage rgb = testing::random_rgb(13, 7, rng);
  write_png_rgb(dir / "a.png", rgb);
  EXPECT_EQ(read_png_rgb(dir / "a.png"), rgb);
  DepthImage d(13, 7, 1);
  for (auto& v : d.data()) v = static_cast<std::uint16_t>(rng());
  write_png_gray16(dir / "d.png", d);
  EXPECT_EQ(read_png_gray16(dir / "d.png"), d);
  MaskImage m = make_mask(13, 7);
  m(3, 4) = 1;
  write_png_mask(dir / "m.png", m);
  EXPECT_EQ(read_png_mask(dir / "m.png"), m);
  EXPECT_EQ(read_png_gray8(dir / "m.png")(3, 4), 255);
  EXPECT_THROW(read_png_rgb(dir / "d.png"), DataError);
  EXPECT_THROW(read_png_rgb(dir / "missing.png"), Error);
}

TEST(Trajectory, CsvRoundTripIsExact) {
  JointTrajectory t = synthetic_trajectory(dual_arm(), 7, 3);
  t.frame(2)[0] = 0.1 + 0.2;  // not representable in short decimal form
  EXPECT_EQ(trajectory_from_csv(trajectory_to_csv(t)), t);
  JointTrajectory plain;
  plain.push_back(std::vector<double>(14, 0.25));
  EXPECT_EQ(trajectory_from_csv(trajectory_to_csv(plain)), plain);
  EXPECT_THROW(trajectory_from_csv("left_joint1,bogus\n1,2\n"), ParseError);
  EXPECT_THROW(trajectory_from_csv(""), ParseError);
}

TEST(Trajectory, ValidationReportsFrame) {
  JointTrajectory t = synthetic_trajectory(dual_arm(), 5, 4);
  t.frame(3)[2] = 99.0;
  try {
    validate_trajectory(dual_arm(), t);
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("frame 3"), std::string::npos) << e.what();
  }
  EXPECT_THROW(validate_trajectory(dual_arm(), JointTrajectory()), DataError);
}

TEST(Episode, SaveLoadRoundTrip) {
  TempDir dir("episode");
  Episode ep = small_episode(6);
  ep.provenance = {EpisodeKind::kGenerated, "src", EgoMotion{-0.05, 0.02, 0.1}, 42, ""};
  ep.config_json = R"({"k":1})";
  save_episode(ep, dir / "e");
  EXPECT_TRUE(fs::exists(dir / "e" / "episode.json"));
  expect_same_episode(ep, load_episode(dir / "e"));
}

TEST(Episode, FortyNineFrameSegment) {
  TempDir dir("episode49");
  const Episode ep = small_episode(49, 2);
  save_episode(ep, dir / "e");
  const Episode back = load_episode(dir / "e");
  EXPECT_EQ(back.frame_count(), 49u);
  EXPECT_EQ(back.trajectory.size(), 49u);
}

TEST(Episode, LengthMismatchNamesBothCounts) {
  Episode ep = small_episode(4);
  ep.frames.pop_back();
  try {
    ep.validate();
    FAIL();
  } catch (const DataError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find('4'), std::string::npos) << what;
    EXPECT_NE(what.find('3'), std::string::npos) << what;
  }
  TempDir dir("mismatch");
  EXPECT_THROW(save_episode(ep, dir / "e"), DataError);
}

TEST(Episode, TamperedFileFailsChecksum) {
  TempDir dir("tamper");
  save_episode(small_episode(3), dir / "e");
  {
    std::ofstream out(dir / "e" / "trajectory.csv", std::ios::app);
    out << "\n";
  }
  EXPECT_THROW(load_episode(dir / "e"), DataError);
}

TEST(Episode, MissingCalibrationIsDataError) {
  TempDir dir("nocal");
  save_episode(small_episode(3), dir / "e");
  fs::remove(dir / "e" / "camera.json");
  EXPECT_THROW(load_episode(dir / "e"), DataError);
  EXPECT_THROW(load_episode(dir / "nothing_here"), DataError);
}

TEST(Episode, SchemaVersionMismatchIsRejected) {
  TempDir dir("schema");
  save_episode(small_episode(2), dir / "e");
  std::ifstream in(dir / "e" / "episode.json");
  nlohmann::json j = nlohmann::json::parse(in);
  in.close();
  j["schema_version"] = kEpisodeSchemaVersion + 1;
  std::ofstream(dir / "e" / "episode.json") << j.dump();
  EXPECT_THROW(load_episode(dir / "e"), DataError);
}

TEST(Pipeline, IdentityMotionOnlyChangesRobotRegion) {
  const Episode src = small_episode(5, 3);
  const NovelEpisode out = generate_novel_episode(src, dual_arm(), {}, {}, 7, "novel");
  ASSERT_EQ(out.episode.frame_count(), 5u);
  EXPECT_EQ(out.bundle.frame_count(), 5u);
  for (std::size_t t = 0; t < 5; ++t) {
    // The cut uses the full source silhouette, occluded parts included.
    const MaskImage region =
        dilate_disc(rasterize_robot(dual_arm(), src.trajectory.frame(t), src.camera).mask, 2);
    const RenderedRobotFrame& robot = out.bundle.robot[t];
    for (int y = 0; y < region.height(); ++y)
      for (int x = 0; x < region.width(); ++x) {
        if (region(x, y) || robot.mask(x, y)) continue;
        for (int c = 0; c < 3; ++c) ASSERT_EQ(out.episode.frames[t].rgb(x, y, c), src.frames[t].rgb(x, y, c));
      }
  }
  EXPECT_EQ(out.episode.provenance.kind, EpisodeKind::kGenerated);
  EXPECT_EQ(out.episode.provenance.source_id, src.id);
  EXPECT_EQ(out.episode.provenance.motion, EgoMotion{});
}

TEST(Pipeline, NovelEpisodeReplaysAndReproduces) {
  const Episode src = small_episode(8, 4);
  const EgoMotion motion{-0.05, 0.05, deg_to_rad(5.0)};
  PipelineConfig config;
  const NovelEpisode a = generate_novel_episode(src, dual_arm(), motion, config, 11, "novel");
  const ReplayReport replay = replay_consistency_check(dual_arm(), src.trajectory, a.episode.trajectory, motion);
  EXPECT_GE(replay.fraction_within, 0.95);
  // Re-running retargeting from the stored motion reproduces the trajectory.
  ASSERT_TRUE(a.episode.provenance.motion.has_value());
  config.jobs = 3;
  const NovelEpisode b =
      generate_novel_episode(src, dual_arm(), *a.episode.provenance.motion, config, 11, "novel");
  EXPECT_EQ(a.episode.trajectory, b.episode.trajectory);
  for (std::size_t t = 0; t < 8; ++t) {
    EXPECT_EQ(a.episode.frames[t], b.episode.frames[t]);
    EXPECT_EQ(a.bundle.scene[t], b.bundle.scene[t]);
    EXPECT_EQ(a.bundle.robot[t], b.bundle.robot[t]);
  }
}

TEST(Pipeline, BundleAttachHandshake) {
  TempDir dir("bundle");
  const Episode src = small_episode(4, 5);
  const NovelEpisode novel = generate_novel_episode(src, dual_arm(), {-0.03, 0.0, 0.05}, {}, 3, "novel");
  save_bundle(novel.bundle, dir / "bundle");
  const ConditioningBundle bundle = load_bundle(dir / "bundle");
  EXPECT_EQ(bundle.frame_count(), novel.episode.frame_count());
  EXPECT_EQ(bundle.scene, novel.bundle.scene);
  EXPECT_EQ(bundle.motion, novel.bundle.motion);
  for (std::size_t t = 0; t < 4; ++t) EXPECT_EQ(bundle.robot[t].mask, novel.bundle.robot[t].mask);

  // Identity repair reproduces the naive composition.
  const RepairedVideo identity = identity_repair(bundle);
  EXPECT_EQ(identity.model, "identity");
  save_repaired_video(identity, dir / "repaired");
  const RepairedVideo loaded = load_repaired_video(dir / "repaired");
  const Episode attached = attach_repaired_video(novel.episode, loaded);
  EXPECT_EQ(attached.provenance.repair, "identity");
  save_episode(attached, dir / "final");
  const Episode back = load_episode(dir / "final");
  ASSERT_EQ(back.frame_count(), 4u);
  for (std::size_t t = 0; t < 4; ++t) EXPECT_EQ(back.frames[t].rgb, loaded.frames[t]);

  // Any length-matching video closes the handshake.
  RepairedVideo other{"my-model", loaded.frames};
  other.frames[0](0, 0, 0) ^= 1;
  EXPECT_EQ(attach_repaired_video(novel.episode, other).provenance.repair, "my-model");

  RepairedVideo short_video = loaded;
  short_video.frames.pop_back();
  EXPECT_THROW(attach_repaired_video(novel.episode, short_video), Error);
  RepairedVideo wrong_size = loaded;
  wrong_size.frames[1] = make_rgb(10, 10);
  EXPECT_THROW(attach_repaired_video(novel.episode, wrong_size), Error);
}

TEST(Pipeline, BundleChecksumsAreVerified) {
  TempDir dir("bundle_sum");
  const NovelEpisode novel = generate_novel_episode(small_episode(2, 6), dual_arm(), {}, {}, 1, "n");
  save_bundle(novel.bundle, dir / "b");
  write_png_rgb(dir / "b" / "scene" / frame_file_name(1), make_rgb(80, 60, 9));
  EXPECT_THROW(load_bundle(dir / "b"), DataError);
}

TEST(TrainingPairs, TargetsAreSourceFramesAndSeedsAreStable) {
  const Episode src = small_episode(3, 7);
  const ViewpointRange range = ViewpointRange::simulation();
  EXPECT_TRUE(make_training_pairs(src, dual_arm(), range, 0, 1, {}).empty());
  const auto a = make_training_pairs(src, dual_arm(), range, 2, 5, {});
  const auto b = make_training_pairs(src, dual_arm(), range, 2, 5, {});
  ASSERT_EQ(a.size(), 2u);
  EXPECT_NE(a[0].motion, a[1].motion);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(a[i].motion, b[i].motion);
    EXPECT_EQ(a[i].scene, b[i].scene);
    EXPECT_TRUE(range.dx.contains(a[i].motion.dx) && range.dy.contains(a[i].motion.dy) &&
                range.dtheta.contains(a[i].motion.dtheta));
    ASSERT_EQ(a[i].target.size(), 3u);
    ASSERT_EQ(a[i].scene.size(), 3u);
    ASSERT_EQ(a[i].robot.size(), 3u);
    for (std::size_t t = 0; t < 3; ++t) {
      EXPECT_EQ(a[i].target[t], src.frames[t].rgb);
      // Full silhouette of the source pose; the episode mask only has the visible part.
      const RenderedRobotFrame r = rasterize_robot(dual_arm(), src.trajectory.frame(t), src.camera);
      EXPECT_EQ(a[i].robot[t].mask, r.mask);
      for (std::size_t k = 0; k < r.mask.data().size(); ++k)
        if (src.robot_masks[t].data()[k]) {
          EXPECT_TRUE(r.mask.data()[k]);
        }
    }
  }
}

TEST(Split, NineToOneCounts) {
  std::vector<int> items(380);
  for (int i = 0; i < 380; ++i) items[i] = i;
  const auto [train, val] = split_train_val(items, 3);
  EXPECT_EQ(train.size(), 342u);
  EXPECT_EQ(val.size(), 38u);
  std::set<int> all(train.begin(), train.end());
  all.insert(val.begin(), val.end());
  EXPECT_EQ(all.size(), 380u);
  EXPECT_EQ(split_train_val(items, 3), split_train_val(items, 3));
  const auto [t10, v10] = split_train_val(std::vector<int>(10, 1), 1);
  EXPECT_EQ(t10.size(), 9u);
  EXPECT_EQ(v10.size(), 1u);
}

std::vector<std::string> names(const std::string& prefix, int n) {
  std::vector<std::string> out;
  for (int i = 0; i < n; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

TEST(Mixing, RatioCounts) {
  const auto standard = names("s", 50);
  const auto generated = names("g", 200);
  for (auto [ratio, expected] : {std::pair{"1:0", 0}, {"1:0.5", 25}, {"1:1", 50}, {"1:3", 150}}) {
    const MixManifest m = mix_datasets(standard, generated, MixRatio::parse(ratio), 9);
    EXPECT_EQ(m.count(MixGroup::kStandard), 50u) << ratio;
    EXPECT_EQ(m.count(MixGroup::kGenerated), static_cast<std::size_t>(expected)) << ratio;
    EXPECT_NO_THROW(validate_manifest(m));
    const MixManifest back = MixManifest::from_json(m.to_json());
    EXPECT_EQ(back.entries, m.entries);
    EXPECT_EQ(back.ratio, m.ratio);
  }
}

TEST(Mixing, FloorsFractionalCounts) {
  EXPECT_EQ(MixRatio::parse("1:0.5").generated_count(7), 3u);
  EXPECT_EQ(MixRatio::parse("2:1").generated_count(7), 3u);
  EXPECT_EQ(MixRatio::parse("1:0.1").generated_count(30), 3u);  // exact, no binary rounding
  EXPECT_THROW(MixRatio::parse("1"), InvalidArgument);
  EXPECT_THROW(MixRatio::parse("0:1"), InvalidArgument);
  EXPECT_THROW(MixRatio::parse("1:-1"), InvalidArgument);
}

TEST(Mixing, ShortfallIsReported) {
  try {
    mix_datasets(names("s", 50), names("g", 100), MixRatio::parse("1:3"), 1);
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("50"), std::string::npos) << e.what();
  }
}

TEST(Mixing, ValidationCatchesTampering) {
  MixManifest m = mix_datasets(names("s", 10), names("g", 10), MixRatio::parse("1:1"), 2);
  MixManifest dup = m;
  dup.entries.back().episode = dup.entries.front().episode;
  EXPECT_THROW(validate_manifest(dup), DataError);
  MixManifest short_m = m;
  short_m.entries.pop_back();
  EXPECT_THROW(validate_manifest(short_m), DataError);
}

}  // namespace
}  // namespace egodemo
