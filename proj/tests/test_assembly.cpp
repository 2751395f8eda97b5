/*
 * Copyright 2026 The dashrestream Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "dashrestream/assembly.hpp"

#include <gtest/gtest.h>

#include <set>

#include "support/media_fixture.hpp"
#include "support/temp_dir.hpp"

namespace dashrestream {
namespace {

namespace fs = std::filesystem;

VideoLog MakeLog(std::vector<std::pair<Kbps, double>> rows) {
  std::vector<SegmentRecord> recs;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    SegmentRecord r;
    r.index = static_cast<SegmentIndex>(i + 1);
    r.rep_level = rows[i].first;
    r.stall_duration_ms = rows[i].second;
    recs.push_back(r);
  }
  return VideoLog(std::move(recs), "t");
}

std::vector<StagedSegment> StageFromTree(const VideoLog& log, const fs::path& root) {
  std::vector<StagedSegment> out;
  for (const auto& r : log.records()) {
    const auto dir = root / std::to_string(r.rep_level);
    const auto seg = "seg_" + std::to_string(r.index) + ".m4s";
    out.push_back({r, (dir / seg).string(), (root / "audio" / seg).string(),
                   (dir / "init.mp4").string(), (root / "audio" / "init.mp4").string()});
  }
  return out;
}

constexpr media::Rational k24{24, 1};

// ---------------------------------------------------------------- planning

TEST(PlanTest, NativeKeepsSourceResolution) {
  auto log = MakeLog({{235, 0}, {2350, 0}, {235, 500}});
  auto plan = Plan(log, DatasetLadder(), ScalePolicy::Native(), "g.gif", "out.mkv",
                   StageFromTree(log, "/c"), k24);
  ASSERT_EQ(plan.jobs.size(), 3u);
  for (const auto& j : plan.jobs) EXPECT_EQ(j.target_resolution, j.source_resolution);
  EXPECT_EQ(plan.jobs[1].source_resolution, (Resolution{1280, 582}));
}

TEST(PlanTest, HighestInLogUsesLargestRung) {
  auto log = MakeLog({{235, 0}, {2350, 0}, {235, 0}});
  auto plan = Plan(log, DatasetLadder(), ScalePolicy::HighestInLog(), "g.gif", "o.mkv",
                   StageFromTree(log, "/c"), k24);
  for (const auto& j : plan.jobs) EXPECT_EQ(j.target_resolution, (Resolution{1280, 582}));
}

TEST(PlanTest, FixedUsesRequestedResolution) {
  auto log = MakeLog({{235, 0}, {2350, 0}});
  auto plan = Plan(log, DatasetLadder(), ScalePolicy::Fixed({1920, 1080}), "g.gif", "o.mkv",
                   StageFromTree(log, "/c"), k24);
  for (const auto& j : plan.jobs) EXPECT_EQ(j.target_resolution, (Resolution{1920, 1080}));
}

TEST(PlanTest, FixedWithoutResolutionIsConfigError) {
  auto log = MakeLog({{235, 0}});
  EXPECT_THROW(Plan(log, DatasetLadder(), ScalePolicy{ScaleMode::kFixed, std::nullopt}, "g",
                    "o", StageFromTree(log, "/c"), k24),
               ConfigError);
}

TEST(PlanTest, StallTailsAndOverlayFollowLog) {
  auto log = MakeLog({{235, 0}, {375, 2000}, {375, 0}, {560, 1234.5}});
  auto plan = Plan(log, DatasetLadder(), ScalePolicy::Native(), "spin.gif", "o.mkv",
                   StageFromTree(log, "/c"), k24);
  for (std::size_t i = 0; i < log.size(); ++i) {
    EXPECT_EQ(plan.jobs[i].index, log.records()[i].index);
    EXPECT_EQ(plan.jobs[i].stall_tail_ms, log.records()[i].stall_duration_ms);
    EXPECT_EQ(plan.jobs[i].overlay.has_value(), log.records()[i].stall_duration_ms > 0);
  }
  EXPECT_EQ(plan.jobs[1].stall_frames(), 48);
  EXPECT_EQ(plan.jobs[3].stall_frames(), 30);  // 29.628 frames rounds to 30
}

TEST(PlanTest, Deterministic) {
  auto log = MakeLog({{235, 0}, {375, 2000}, {4300, 0}});
  auto a = Plan(log, DatasetLadder(), ScalePolicy::HighestInLog(), "g", "o",
                StageFromTree(log, "/c"), k24);
  auto b = Plan(log, DatasetLadder(), ScalePolicy::HighestInLog(), "g", "o",
                StageFromTree(log, "/c"), k24);
  EXPECT_EQ(a, b);
}

TEST(PlanTest, StagingMustMatchLog) {
  auto log = MakeLog({{235, 0}, {375, 0}});
  auto staged = StageFromTree(log, "/c");
  staged.pop_back();
  EXPECT_THROW(Plan(log, DatasetLadder(), ScalePolicy::Native(), "g", "o", staged, k24),
               AssemblyError);
}

TEST(ScaleResolutionTest, Tokens) {
  const auto ladder = DatasetLadder();
  EXPECT_EQ(ParseScaleResolution("1080p", ladder), (Resolution{1920, 1080}));
  EXPECT_EQ(ParseScaleResolution("2160p", ladder), (Resolution{3840, 2160}));
  EXPECT_EQ(ParseScaleResolution("582p", ladder), (Resolution{1280, 582}));
  EXPECT_EQ(ParseScaleResolution("720p", ladder), (Resolution{1280, 720}));
  EXPECT_EQ(ParseScaleResolution("480p", ladder), (Resolution{854, 480}));
  EXPECT_EQ(ParseScaleResolution("1280x720", ladder), (Resolution{1280, 720}));
  EXPECT_THROW(ParseScaleResolution("hd", ladder), UsageError);
  EXPECT_THROW(ParseScaleResolution("0p", ladder), UsageError);
  EXPECT_THROW(ParseScaleResolution("12x", ladder), UsageError);
  EXPECT_EQ(ParseScaleMode("2"), ScaleMode::kFixed);
  EXPECT_THROW(ParseScaleMode("3"), UsageError);
}

// ------------------------------------------------------------------- media

class MediaTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    tc_ = test::TestToolchain();
    if (!tc_) return;
    dir_ = new test::TempDir();
    test::ContentSpec spec;
    spec.reps = {{235, 320, 146}, {2350, 1280, 582}};
    spec.segments = 3;
    spec.segment_seconds = 4;
    test::GenerateContent(*tc_, fs::path(dir_->path()) / "content", spec);
    test::GenerateOverlay(*tc_, fs::path(dir_->path()) / "spin.gif");
  }
  static void TearDownTestSuite() {
    delete dir_;
    dir_ = nullptr;
  }
  void SetUp() override {
    if (!tc_) GTEST_SKIP() << "media toolchain not available";
    work_ = std::make_unique<test::TempDir>();
  }

  static fs::path Content() { return fs::path(dir_->path()) / "content"; }
  static std::string Overlay() { return (fs::path(dir_->path()) / "spin.gif").string(); }
  std::string Work(const std::string& name) const { return (fs::path(work_->path()) / name).string(); }

  /// Frame count by an independent framecrc pass over a byte-joined file.
  long long RawFrameCount(const std::string& init, const std::string& seg) {
    const auto joined = Work("raw_join.mp4");
    {
      std::ofstream out(joined, std::ios::binary);
      std::ifstream a(init, std::ios::binary), b(seg, std::ios::binary);
      out << a.rdbuf() << b.rdbuf();
    }
    auto r = tc_->Exec({"-i", joined, "-map", "0:v:0", "-f", "framecrc", "-"});
    long long n = 0;
    for (auto line : strings::Split(r.out, '\n'))
      if (!line.empty() && line[0] != '#') ++n;
    return n;
  }

  std::string Muxed(Kbps kbps, int index, std::optional<Resolution> target = std::nullopt) {
    const auto id = std::to_string(kbps) + "_" + std::to_string(index);
    const auto dir = Content() / std::to_string(kbps);
    const auto seg = "seg_" + std::to_string(index) + ".m4s";
    auto v = MergeInit(*tc_, (dir / "init.mp4").string(), (dir / seg).string(),
                       Work("v" + id + ".mkv"), MediaKind::kVideo);
    auto a = MergeInit(*tc_, (Content() / "audio" / "init.mp4").string(),
                       (Content() / "audio" / seg).string(), Work("a" + id + ".avi"),
                       MediaKind::kAudio);
    return MuxAv(*tc_, v, a, target, Work("m" + id + ".mkv"), {}).path;
  }

  static inline std::optional<media::Toolchain> tc_;
  static inline test::TempDir* dir_ = nullptr;
  std::unique_ptr<test::TempDir> work_;
};

TEST_F(MediaTest, MergeInitPreservesFrameCount) {
  const auto dir = Content() / "235";
  const auto init = (dir / "init.mp4").string(), seg = (dir / "seg_2.m4s").string();
  auto out = MergeInit(*tc_, init, seg, Work("v.mkv"), MediaKind::kVideo);
  auto probe = media::ProbeFrames(*tc_, out);
  EXPECT_EQ(static_cast<long long>(probe.frames.size()), RawFrameCount(init, seg));
  EXPECT_EQ(probe.frames.size(), 96u);
  EXPECT_NEAR(probe.duration_s(), 4.0, 1e-9);
}

TEST_F(MediaTest, MergeInitRejectsForeignInit) {
  try {
    MergeInit(*tc_, (Content() / "235" / "init.mp4").string(),
              (Content() / "2350" / "seg_2.m4s").string(), Work("bad.mkv"), MediaKind::kVideo);
    FAIL() << "expected AssemblyError";
  } catch (const AssemblyError& e) {
    EXPECT_FALSE(e.diagnostics().empty());
  }
}

TEST_F(MediaTest, MergeInitAudioIsPcm) {
  auto out = MergeInit(*tc_, (Content() / "audio" / "init.mp4").string(),
                       (Content() / "audio" / "seg_1.m4s").string(), Work("a.avi"),
                       MediaKind::kAudio);
  auto info = media::ProbeStreams(*tc_, out);
  EXPECT_TRUE(info.has_audio);
  EXPECT_EQ(info.audio_codec, "pcm_s16le");
  EXPECT_NEAR(media::ProbeAudio(*tc_, out).duration_s(), 4.0, 1024.0 / 48000 + 1e-9);
}

TEST_F(MediaTest, MuxPreservesDuration) {
  auto m = Muxed(235, 1);
  EXPECT_NEAR(media::ProbeFrames(*tc_, m).duration_s(), 4.0, 1.0 / 24);
  EXPECT_NEAR(media::ProbeAudio(*tc_, m).duration_s(), 4.0, 1.0 / 24);
}

TEST_F(MediaTest, MuxLetterboxesCrossAspect) {
  auto m = Muxed(2350, 1, Resolution{1920, 1080});
  auto info = media::ProbeStreams(*tc_, m);
  EXPECT_EQ(info.resolution, (Resolution{1920, 1080}));
  // 1280x582 fits as 1920x874 (even height), leaving 103 px bands top and bottom.
  auto top = media::ProbeFrames(*tc_, m, "crop=1920:100:0:0");
  auto bottom = media::ProbeFrames(*tc_, m, "crop=1920:100:0:980");
  auto middle = media::ProbeFrames(*tc_, m, "crop=1920:100:0:490");
  ASSERT_FALSE(top.frames.empty());
  for (const auto* p : {&top, &bottom}) {
    EXPECT_NEAR(p->frames.front().mean[0], 16, 0.5);
    EXPECT_NEAR(p->frames.front().mean[1], 128, 0.5);
    EXPECT_NEAR(p->frames.front().mean[2], 128, 0.5);
  }
  EXPECT_GT(std::fabs(middle.frames.front().mean[0] - 16), 5);
}

TEST_F(MediaTest, MuxRejectsDurationMismatch) {
  auto v = Work("v45.mkv"), a = Work("a40.avi");
  ASSERT_TRUE(tc_->Exec({"-y", "-f", "lavfi", "-i", "testsrc2=size=320x146:rate=24:duration=4.5",
                         "-c:v", "libx264", "-preset", "ultrafast", v})
                  .ok());
  ASSERT_TRUE(tc_->Exec({"-y", "-f", "lavfi", "-i", "sine=sample_rate=48000:duration=4", "-c:a",
                         "pcm_s16le", a})
                  .ok());
  try {
    MuxAv(*tc_, v, a, std::nullopt, Work("m.mkv"), {});
    FAIL() << "expected AssemblyError";
  } catch (const AssemblyError& e) {
    EXPECT_NE(std::string(e.what()).find("4.500000"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("4.000000"), std::string::npos) << e.what();
  }
}

TEST_F(MediaTest, StallAppendsClonedFramesUnderOverlay) {
  auto m = Muxed(2350, 2);
  auto s = SynthesizeStall(*tc_, m, 2000, Overlay(), k24, Work("s.mkv"), {});
  // Overlay 40x30 centered in 1280x582 -> (620, 276); mask it with a margin.
  const std::string mask = "drawbox=x=618:y=274:w=44:h=34:color=black:t=fill";
  auto src = media::ProbeFrames(*tc_, m, mask);
  auto out = media::ProbeFrames(*tc_, s, mask);
  ASSERT_EQ(src.frames.size(), 96u);
  ASSERT_EQ(out.frames.size(), 96u + 48u);
  EXPECT_NEAR(out.duration_s(), 6.0, 1e-9);
  for (std::size_t i = 0; i < 96; ++i)
    EXPECT_EQ(out.frames[i].checksum, src.frames[i].checksum) << "frame " << i;
  for (std::size_t i = 96; i < out.frames.size(); ++i)
    EXPECT_EQ(out.frames[i].checksum, src.frames.back().checksum) << "frame " << i;

  // The overlay animates over the tail only.
  auto region = media::ProbeFrames(*tc_, s, "crop=40:30:620:276");
  std::set<std::string> tail;
  for (std::size_t i = 96; i < region.frames.size(); ++i) tail.insert(region.frames[i].checksum);
  EXPECT_GT(tail.size(), 1u);

  // Audio covers the tail with digital silence.
  EXPECT_NEAR(media::ProbeAudio(*tc_, s).duration_s(), 6.0, 1.0 / 24);
  auto r = tc_->Exec({"-i", s, "-map", "0:a:0", "-af", "atrim=start=4.05", "-f", "framecrc", "-"});
  int frames = 0;
  for (auto line : strings::Split(r.out, '\n')) {
    if (line.empty() || line[0] == '#') continue;
    ++frames;
    EXPECT_TRUE(strings::EndsWith(line, "0x00000000")) << line;
  }
  EXPECT_GT(frames, 0);
}

TEST_F(MediaTest, SubFrameStallIsSkippedWithWarning) {
  auto m = Muxed(235, 1);
  std::string warning;
  auto s = SynthesizeStall(*tc_, m, 10, Overlay(), k24, Work("s.mkv"), {},
                           [&](const std::string& w) { warning = w; });
  EXPECT_EQ(s, m);
  EXPECT_FALSE(warning.empty());
}

TEST_F(MediaTest, UnreadableOverlayIsAssemblyError) {
  auto m = Muxed(235, 1);
  std::ofstream(Work("junk.gif")) << "not a gif";
  EXPECT_THROW(SynthesizeStall(*tc_, m, 1000, Work("junk.gif"), k24, Work("s.mkv"), {}),
               AssemblyError);
  EXPECT_THROW(SynthesizeStall(*tc_, m, 1000, Work("missing.gif"), k24, Work("s2.mkv"), {}),
               AssemblyError);
}

TEST_F(MediaTest, AssembleAddsSegmentsAndStalls) {
  for (double stall : {0.0, 2000.0}) {
    auto log = MakeLog({{235, 0}, {2350, stall}, {235, 0}});
    auto out = Work(stall > 0 ? "stall.mkv" : "plain.mkv");
    auto plan = Plan(log, DatasetLadder(), ScalePolicy::HighestInLog(), Overlay(), out,
                     StageFromTree(log, Content()), k24);
    auto result = Assemble(*tc_, plan, fs::path(work_->path()) / "w", {});
    const double want = 12.0 + stall / 1000.0;
    ASSERT_TRUE(result.probed_duration_s.has_value());
    EXPECT_NEAR(*result.probed_duration_s, want, 3.0 / 24);
    auto info = media::ProbeStreams(*tc_, out);
    EXPECT_EQ(info.video_codec, "h264");
    EXPECT_EQ(info.audio_codec, "aac");
  }
}

TEST_F(MediaTest, NativeModeKeepsPerSegmentContent) {
  auto log = MakeLog({{235, 0}, {2350, 0}, {235, 0}});
  auto out = Work("native.mkv");
  auto plan = Plan(log, DatasetLadder(), ScalePolicy::Native(), Overlay(), out,
                   StageFromTree(log, Content()), k24);
  Assemble(*tc_, plan, fs::path(work_->path()) / "w", {});
  auto frames = media::ProbeFrames(*tc_, out).frames;
  ASSERT_EQ(frames.size(), 3u * 96u);
  // Watermark luma at each segment midpoint matches the source rendition.
  // The crop lies inside the smallest rendition's box, hence inside all.
  const auto box = test::WatermarkBox(320, 146);
  const std::string crop = "crop=" + std::to_string(box.w / 2) + ":" + std::to_string(box.h / 2) +
                           ":" + std::to_string(box.w / 4) + ":" + std::to_string(box.h / 4);
  auto got = media::ProbeFrames(*tc_, out, crop);
  ASSERT_EQ(got.frames.size(), 3u * 96u);
  for (std::size_t j = 0; j < 3; ++j) {
    EXPECT_EQ(frames[j * 96 + 48].resolution, plan.jobs[j].target_resolution);
    auto src = media::ProbeFrames(
        *tc_, Muxed(log.records()[j].rep_level, static_cast<int>(j + 1)), crop);
    EXPECT_NEAR(got.frames[j * 96 + 48].mean[0], src.frames[48].mean[0], 1.0) << "segment " << j + 1;
  }
}

TEST_F(MediaTest, EmptyPlanIsAnError) {
  AssemblyPlan plan;
  plan.output_path = Work("empty.mkv");
  EXPECT_THROW(Assemble(*tc_, plan, fs::path(work_->path()) / "w", {}), AssemblyError);
  EXPECT_FALSE(fs::exists(plan.output_path));
}

TEST_F(MediaTest, FailedJobNamesIndex) {
  auto log = MakeLog({{235, 0}, {235, 0}, {235, 0}});
  auto staged = StageFromTree(log, Content());
  staged[1].video_path = Work("nope.m4s");
  auto plan = Plan(log, DatasetLadder(), ScalePolicy::Native(), Overlay(), Work("o.mkv"), staged,
                   k24);
  try {
    Assemble(*tc_, plan, fs::path(work_->path()) / "w", {});
    FAIL() << "expected AssemblyError";
  } catch (const AssemblyError& e) {
    EXPECT_NE(std::string(e.what()).find("segment 2"), std::string::npos) << e.what();
  }
}

}  // namespace
}  // namespace dashrestream
