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

// Turns the staged segment subset into one impaired video.
//
// Per segment:  init + media  -> standalone video (mkv) and audio (avi, pcm)
//               video + audio -> muxed segment, scaled per policy
//               muxed         -> + stall tail (last frame cloned, overlay on top,
//                                  silent audio) when the log reports a stall
// Then all segments are concatenated into one matroska file.
//
// Segments are re-encoded losslessly by default so cloned frames stay
// bit-identical to the frame they freeze and no generation loss is added on
// top of the streamed quality.

#ifndef DASHRESTREAM_ASSEMBLY_HPP
#define DASHRESTREAM_ASSEMBLY_HPP

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "dashrestream/errors.hpp"
#include "dashrestream/log_io.hpp"
#include "dashrestream/manifest.hpp"
#include "dashrestream/media.hpp"
#include "dashrestream/strings.hpp"

namespace dashrestream {

namespace fs = std::filesystem;

enum class ScaleMode : int { kNative = 0, kHighestInLog = 1, kFixed = 2 };

inline const char* ScaleModeName(ScaleMode m) {
  switch (m) {
    case ScaleMode::kNative: return "native";
    case ScaleMode::kHighestInLog: return "highest_in_log";
    case ScaleMode::kFixed: return "fixed";
  }
  return "?";
}

struct ScalePolicy {
  ScaleMode mode = ScaleMode::kNative;
  std::optional<Resolution> fixed_resolution;

  static ScalePolicy Native() { return {}; }
  static ScalePolicy HighestInLog() { return {ScaleMode::kHighestInLog, std::nullopt}; }
  static ScalePolicy Fixed(Resolution r) { return {ScaleMode::kFixed, r}; }

  void Validate() const {
    if (mode == ScaleMode::kFixed && !fixed_resolution)
      throw ConfigError("scale_res", "auto_scale=2 (fixed) requires a scale resolution");
    if (mode != ScaleMode::kFixed && fixed_resolution)
      throw ConfigError("scale_res", "a scale resolution is only meaningful with auto_scale=2");
    if (fixed_resolution && (fixed_resolution->width <= 0 || fixed_resolution->height <= 0))
      throw ConfigError("scale_res", "scale resolution must be positive");
  }

  bool operator==(const ScalePolicy&) const = default;
};

inline ScaleMode ParseScaleMode(std::string_view token) {
  auto v = strings::ParseInt(strings::Trim(token));
  if (!v || *v < 0 || *v > 2)
    throw UsageError(std::string(token), "auto_scale must be 0, 1 or 2, got '" + std::string(token) + "'");
  return static_cast<ScaleMode>(*v);
}

/// "1080p"-style tokens take the width the ladder uses at that height (the
/// widest, if several), otherwise a 16:9 width rounded to even. Explicit
/// "WxH" is passed through.
inline Resolution ParseScaleResolution(std::string_view token, const Ladder& ladder) {
  const auto t = strings::ToLower(strings::Trim(token));
  if (t.find('x') != std::string::npos) {
    auto r = ParseResolution(t);
    if (!r) throw UsageError(std::string(token), "invalid scale resolution '" + std::string(token) + "'");
    return *r;
  }
  if (t.size() < 2 || t.back() != 'p')
    throw UsageError(std::string(token), "invalid scale resolution '" + std::string(token) + "'");
  auto h = strings::ParseInt(std::string_view(t).substr(0, t.size() - 1));
  if (!h || *h <= 0 || *h > 8640)
    throw UsageError(std::string(token), "invalid scale resolution '" + std::string(token) + "'");
  const int height = static_cast<int>(*h);
  int width = 0;
  for (const auto& r : ladder.representations())
    if (r.height == height) width = std::max(width, r.width);
  if (width == 0) {
    width = static_cast<int>(std::lround(height * 16.0 / 9.0));
    width += width % 2;
  }
  return {width, height};
}

/// One staged (record, video, audio) triple as produced by acquisition.
struct StagedSegment {
  SegmentRecord record;
  std::string video_path;
  std::string audio_path;  // empty: no audio content, silence is generated
  std::string video_init;
  std::string audio_init;
};

struct SegmentJob {
  SegmentIndex index = 0;
  Kbps rep_level = 0;
  std::string video_init;
  std::string video_source;
  std::string audio_init;
  std::string audio_source;
  Resolution source_resolution;
  Resolution target_resolution;
  double stall_tail_ms = 0;
  std::optional<std::string> overlay;
  media::Rational fps;

  /// Stall rounded to whole frames.
  long long stall_frames() const {
    return std::llround(stall_tail_ms * static_cast<double>(fps.num) /
                        (1000.0 * static_cast<double>(fps.den)));
  }

  bool operator==(const SegmentJob&) const = default;
};

struct AssemblyPlan {
  std::vector<SegmentJob> jobs;
  std::string output_path;

  bool operator==(const AssemblyPlan&) const = default;
};

inline Resolution TargetFor(const ScalePolicy& policy, Resolution source, Resolution highest) {
  switch (policy.mode) {
    case ScaleMode::kNative: return source;
    case ScaleMode::kHighestInLog: return highest;
    case ScaleMode::kFixed: return *policy.fixed_resolution;
  }
  return source;
}

/// Deterministic plan: one job per staged record, in log order.
inline AssemblyPlan Plan(const VideoLog& log, const Ladder& ladder, const ScalePolicy& policy,
                         const std::string& overlay, const std::string& output,
                         const std::vector<StagedSegment>& staged, media::Rational fps) {
  policy.Validate();
  if (staged.size() != log.size())
    throw AssemblyError("staged " + std::to_string(staged.size()) + " segments for a log of " +
                        std::to_string(log.size()) + " records");
  if (fps.num <= 0 || fps.den <= 0) throw AssemblyError("frame rate must be positive");
  const Resolution highest = HighestResolution(log, ladder);

  AssemblyPlan plan;
  plan.output_path = output;
  for (std::size_t i = 0; i < log.size(); ++i) {
    const auto& rec = log.records()[i];
    const auto& st = staged[i];
    if (st.record.index != rec.index || st.record.rep_level != rec.rep_level)
      throw AssemblyError("staged segment " + std::to_string(st.record.index) +
                          " does not match log record " + std::to_string(rec.index));
    SegmentJob job;
    job.index = rec.index;
    job.rep_level = rec.rep_level;
    job.video_init = st.video_init;
    job.video_source = st.video_path;
    job.audio_init = st.audio_init;
    job.audio_source = st.audio_path;
    job.source_resolution = ResolveRepresentation(ladder, rec.rep_level).resolution();
    job.target_resolution = TargetFor(policy, job.source_resolution, highest);
    job.stall_tail_ms = rec.stall_duration_ms;
    if (job.stall_tail_ms > 0) job.overlay = overlay;
    job.fps = fps;
    plan.jobs.push_back(std::move(job));
  }
  return plan;
}

struct EncoderSettings {
  int crf = 0;  // 0 = lossless
  std::string preset = "ultrafast";
  std::string final_audio_codec = "aac";
  std::string final_audio_bitrate = "192k";
  int silence_sample_rate = 48000;
};

using WarnFn = std::function<void(const std::string&)>;

struct AssemblyOptions {
  EncoderSettings encoder;
  int workers = 4;
  bool verify_output = true;
  WarnFn warn;
};

namespace detail {

inline std::vector<std::string> VideoEncodeArgs(const EncoderSettings& s) {
  return {"-c:v", "libx264", "-preset", s.preset, "-crf", std::to_string(s.crf),
          "-pix_fmt", "yuv420p", "-x264-params", "repeat-headers=1"};
}

inline void ConcatBytes(const std::vector<std::string>& parts, const std::string& out) {
  std::ofstream dst(out, std::ios::binary | std::ios::trunc);
  if (!dst) throw AssemblyError("cannot write '" + out + "'");
  for (const auto& p : parts) {
    std::ifstream src(p, std::ios::binary);
    if (!src) throw AssemblyError("cannot read '" + p + "'");
    dst << src.rdbuf();
  }
  if (!dst) throw AssemblyError("short write to '" + out + "'");
}

inline std::string FmtSeconds(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", s);
  return buf;
}

}  // namespace detail

/// Joins an init header with one media segment into a standalone file:
/// matroska with the video stream copied, or avi with pcm audio.
inline std::string MergeInit(const media::Toolchain& tc, const std::string& init,
                             const std::string& segment, const std::string& out, MediaKind kind) {
  const std::string joined = out + ".joined.mp4";
  detail::ConcatBytes({init, segment}, joined);
  std::vector<std::string> args = {"-v", "error", "-y", "-i", joined};
  if (kind == MediaKind::kAudio) {
    args.insert(args.end(), {"-map", "0:a:0", "-c:a", "pcm_s16le"});
  } else {
    args.insert(args.end(), {"-map", "0:v:0", "-c", "copy"});
  }
  auto bx = media::BitexactFlags();
  args.insert(args.end(), bx.begin(), bx.end());
  args.push_back(out);
  auto r = tc.Exec(args);
  std::error_code ec;
  fs::remove(joined, ec);
  if (!r.ok())
    throw AssemblyError("cannot merge '" + init + "' with '" + segment + "'",
                        media::Toolchain::Tail(r.err));
  if (auto diag = media::DecodeErrors(tc, out))
    throw AssemblyError("merged segment '" + segment + "' does not decode with init '" + init + "'",
                        *diag);
  return out;
}

/// Longest tolerated audio/video length difference: one video frame plus
/// one AAC frame (1024 samples), since audio segments end on codec-frame
/// boundaries rather than on the video frame grid.
inline double MuxTolerance(media::Rational fps, int sample_rate) {
  return 1.0 / fps.value() + (sample_rate > 0 ? 1024.0 / sample_rate : 0.0);
}

struct MuxResult {
  std::string path;
  long long frames = 0;
  int sample_rate = 0;
};

/// Muxes one video and one audio segment, scaling (letterboxed) to `target`
/// when it differs from the source. Audio is padded/trimmed to the video's
/// exact length so segment lengths add up in the final concat.
inline MuxResult MuxAv(const media::Toolchain& tc, const std::string& video,
                       const std::string& audio, std::optional<Resolution> target,
                       const std::string& out, const EncoderSettings& settings) {
  const auto vprobe = media::ProbeFrames(tc, video);
  if (vprobe.frames.empty() || vprobe.frame_rate.num <= 0)
    throw AssemblyError("no video frames in '" + video + "'");
  const double vdur = vprobe.duration_s();
  const Resolution source = vprobe.frames.front().resolution;

  int sample_rate = settings.silence_sample_rate;
  if (!audio.empty()) {
    const auto aprobe = media::ProbeAudio(tc, audio);
    sample_rate = aprobe.sample_rate;
    const double adur = aprobe.duration_s();
    if (std::fabs(adur - vdur) > MuxTolerance(vprobe.frame_rate, sample_rate))
      throw AssemblyError("audio/video duration mismatch: video " + detail::FmtSeconds(vdur) +
                          " s, audio " + detail::FmtSeconds(adur) + " s ('" + video + "', '" +
                          audio + "')");
  }
  const long long end_sample = std::llround(vdur * sample_rate);

  std::string vf = "[0:v]setpts=PTS-STARTPTS";
  if (target && !(*target == source)) {
    const auto w = std::to_string(target->width), h = std::to_string(target->height);
    vf += ",scale=" + w + ":" + h +
          ":force_original_aspect_ratio=decrease:force_divisible_by=2:flags=bicubic"
          ",pad=" + w + ":" + h + ":(ow-iw)/2:(oh-ih)/2:color=black,setsar=1";
  }
  vf += "[v];[1:a]asetpts=PTS-STARTPTS,aresample=" + std::to_string(sample_rate) +
        ",apad,atrim=end_sample=" + std::to_string(end_sample) + "[a]";

  std::vector<std::string> args = {"-v", "error", "-y", "-i", video};
  if (audio.empty()) {
    args.insert(args.end(), {"-f", "lavfi", "-i",
                             "anullsrc=r=" + std::to_string(sample_rate) + ":cl=stereo"});
  } else {
    args.insert(args.end(), {"-i", audio});
  }
  args.insert(args.end(), {"-filter_complex", vf, "-map", "[v]", "-map", "[a]"});
  auto enc = detail::VideoEncodeArgs(settings);
  args.insert(args.end(), enc.begin(), enc.end());
  args.insert(args.end(), {"-c:a", "pcm_s16le"});
  auto bx = media::BitexactFlags();
  args.insert(args.end(), bx.begin(), bx.end());
  args.push_back(out);
  tc.Require(args, "cannot mux '" + video + "' with '" + audio + "'");
  return {out, static_cast<long long>(vprobe.frames.size()), sample_rate};
}

/// Appends round(stall * fps) clones of the last frame with `overlay`
/// (centered, native size, looping) on the appended part only; the audio
/// tail is silence. Returns `segment` unchanged when the stall is shorter
/// than half a frame.
inline std::string SynthesizeStall(const media::Toolchain& tc, const std::string& segment,
                                   double stall_ms, const std::string& overlay,
                                   media::Rational fps, const std::string& out,
                                   const EncoderSettings& settings, const WarnFn& warn = {}) {
  if (!(stall_ms > 0)) throw AssemblyError("stall duration must be positive");
  const long long n = std::llround(stall_ms * static_cast<double>(fps.num) /
                                   (1000.0 * static_cast<double>(fps.den)));
  if (n == 0) {
    if (warn)
      warn("stall of " + strings::FormatDouble(stall_ms) +
           " ms is shorter than one frame period; skipped");
    return segment;
  }
  std::error_code ec;
  if (overlay.empty() || !fs::is_regular_file(overlay, ec))
    throw AssemblyError("overlay '" + overlay + "' is not a readable file");
  try {
    if (!media::ProbeStreams(tc, overlay).has_video) throw AssemblyError("no picture");
  } catch (const AssemblyError& e) {
    throw AssemblyError("overlay '" + overlay + "' is unreadable", e.diagnostics());
  }

  const auto vprobe = media::ProbeFrames(tc, segment);
  const auto aprobe = media::ProbeAudio(tc, segment);
  const long long frames = static_cast<long long>(vprobe.frames.size());
  const double tail_start = static_cast<double>(frames) / fps.value();
  const double total = static_cast<double>(frames + n) / fps.value();
  const long long end_sample = std::llround(total * aprobe.sample_rate);

  const std::string graph =
      "[0:v]tpad=stop_mode=clone:stop=" + std::to_string(n) +
      "[base];[1:v]setpts=PTS-STARTPTS+" + detail::FmtSeconds(tail_start) +
      "/TB[ov];[base][ov]overlay=x=(W-w)/2:y=(H-h)/2:shortest=1:format=yuv420[v];"
      "[0:a]apad,atrim=end_sample=" + std::to_string(end_sample) + "[a]";
  std::vector<std::string> args = {"-v", "error", "-y", "-i", segment, "-stream_loop", "-1",
                                   "-i", overlay, "-filter_complex", graph, "-map", "[v]",
                                   "-map", "[a]", "-frames:v", std::to_string(frames + n)};
  auto enc = detail::VideoEncodeArgs(settings);
  args.insert(args.end(), enc.begin(), enc.end());
  args.insert(args.end(), {"-c:a", "pcm_s16le"});
  auto bx = media::BitexactFlags();
  args.insert(args.end(), bx.begin(), bx.end());
  args.push_back(out);
  tc.Require(args, "cannot synthesize stall for '" + segment + "'");
  return out;
}

/// Concatenates prepared segments (stream copy for video, one audio encode)
/// into the final matroska file.
inline std::string ConcatSegments(const media::Toolchain& tc, const std::vector<std::string>& parts,
                                  const std::string& output, const EncoderSettings& settings) {
  if (parts.empty()) throw AssemblyError("nothing to assemble: the plan is empty");
  const std::string list = output + ".concat.txt";
  {
    std::ofstream f(list, std::ios::trunc);
    if (!f) throw AssemblyError("cannot write '" + list + "'");
    for (const auto& p : parts) {
      std::string quoted;
      for (char c : fs::absolute(p).string()) {
        if (c == '\'')
          quoted += "'\\''";
        else
          quoted += c;
      }
      f << "file '" << quoted << "'\n";
    }
  }
  std::vector<std::string> args = {"-v", "error", "-y", "-f", "concat", "-safe", "0",
                                   "-i", list, "-map", "0:v", "-map", "0:a", "-c:v", "copy",
                                   "-c:a", settings.final_audio_codec};
  if (!settings.final_audio_bitrate.empty())
    args.insert(args.end(), {"-b:a", settings.final_audio_bitrate});
  auto bx = media::BitexactFlags();
  args.insert(args.end(), bx.begin(), bx.end());
  args.insert(args.end(), {"-f", "matroska", output});
  auto r = tc.Exec(args);
  std::error_code ec;
  fs::remove(list, ec);
  if (!r.ok()) throw AssemblyError("cannot concatenate segments into '" + output + "'",
                                   media::Toolchain::Tail(r.err));
  return output;
}

struct JobOutcome {
  SegmentIndex index = 0;
  std::string path;
  long long frames = 0;        // before the stall tail
  long long stall_frames = 0;  // appended
};

/// Runs merge -> mux -> stall for one job inside `workdir`.
inline JobOutcome RunJob(const media::Toolchain& tc, const SegmentJob& job, const fs::path& workdir,
                         const AssemblyOptions& opts) {
  const auto id = std::to_string(job.index);
  const fs::path merged = workdir / "merged";
  const fs::path muxed = workdir / "muxed";
  fs::create_directories(merged);
  fs::create_directories(muxed);

  const auto v = MergeInit(tc, job.video_init, job.video_source,
                           (merged / ("v_" + id + ".mkv")).string(), MediaKind::kVideo);
  std::string a;
  if (!job.audio_source.empty())
    a = MergeInit(tc, job.audio_init, job.audio_source, (merged / ("a_" + id + ".avi")).string(),
                  MediaKind::kAudio);

  std::optional<Resolution> target;
  if (!(job.target_resolution == job.source_resolution)) target = job.target_resolution;
  auto mux = MuxAv(tc, v, a, target, (muxed / (id + ".mkv")).string(), opts.encoder);

  JobOutcome out{job.index, mux.path, mux.frames, 0};
  if (job.stall_tail_ms > 0) {
    out.path = SynthesizeStall(tc, mux.path, job.stall_tail_ms, job.overlay.value_or(""), job.fps,
                               (muxed / (id + "_stall.mkv")).string(), opts.encoder, opts.warn);
    if (out.path != mux.path) out.stall_frames = job.stall_frames();
  }
  return out;
}

struct AssemblyResult {
  std::string output_path;
  std::vector<JobOutcome> jobs;
  double expected_duration_s = 0;
  std::optional<double> probed_duration_s;
};

/// Executes every job (in parallel, up to opts.workers), then concatenates
/// in log order. Any failed job aborts the run with the failing index.
inline AssemblyResult Assemble(const media::Toolchain& tc, const AssemblyPlan& plan,
                               const fs::path& workdir, const AssemblyOptions& opts = {}) {
  if (plan.jobs.empty()) throw AssemblyError("nothing to assemble: the plan is empty");
  for (const auto& job : plan.jobs)
    if (!(job.fps == plan.jobs.front().fps)) throw AssemblyError("mixed frame rates in plan");

  std::vector<JobOutcome> outcomes(plan.jobs.size());
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::exception_ptr failure;
  SegmentIndex failed_index = 0;
  auto worker = [&] {
    for (std::size_t i = next++; i < plan.jobs.size(); i = next++) {
      {
        std::lock_guard<std::mutex> lock(mu);
        if (failure) return;
      }
      try {
        outcomes[i] = RunJob(tc, plan.jobs[i], workdir, opts);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!failure || plan.jobs[i].index < failed_index) {
          failure = std::current_exception();
          failed_index = plan.jobs[i].index;
        }
        return;
      }
    }
  };
  const int n = std::clamp(opts.workers, 1, static_cast<int>(plan.jobs.size()));
  std::vector<std::thread> pool;
  for (int i = 0; i < n; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failure) {
    try {
      std::rethrow_exception(failure);
    } catch (const AssemblyError& e) {
      throw AssemblyError("segment " + std::to_string(failed_index) + ": " + e.what(),
                          e.diagnostics());
    } catch (const std::exception& e) {
      throw AssemblyError("segment " + std::to_string(failed_index) + ": " + e.what());
    }
  }

  std::vector<std::string> parts;
  AssemblyResult result;
  const double fps = plan.jobs.front().fps.value();
  long long total_frames = 0;
  for (const auto& o : outcomes) {
    parts.push_back(o.path);
    total_frames += o.frames + o.stall_frames;
  }
  result.expected_duration_s = static_cast<double>(total_frames) / fps;
  fs::create_directories(fs::absolute(plan.output_path).parent_path());
  result.output_path = ConcatSegments(tc, parts, plan.output_path, opts.encoder);
  result.jobs = std::move(outcomes);

  if (opts.verify_output) {
    const double probed = media::ProbeFrames(tc, result.output_path).duration_s();
    result.probed_duration_s = probed;
    const double tolerance = static_cast<double>(plan.jobs.size()) / fps;
    if (std::fabs(probed - result.expected_duration_s) > tolerance + 1e-9)
      throw AssemblyError("output duration " + detail::FmtSeconds(probed) + " s differs from " +
                          detail::FmtSeconds(result.expected_duration_s) + " s expected");
  }
  return result;
}

}  // namespace dashrestream

#endif  // DASHRESTREAM_ASSEMBLY_HPP
