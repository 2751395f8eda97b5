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

// Thin layer over an ffmpeg-compatible binary: command execution with an
// observer hook, plus probing built on ffmpeg alone (stderr stream banners,
// the showinfo filter and the framecrc muxer), so no ffprobe is required.

#ifndef DASHRESTREAM_MEDIA_HPP
#define DASHRESTREAM_MEDIA_HPP

#include <array>
#include <cstdlib>
#include <functional>
#include <optional>
#include <regex>
#include <string>
#include <system_error>
#include <vector>

#include "dashrestream/errors.hpp"
#include "dashrestream/manifest.hpp"
#include "dashrestream/strings.hpp"
#include "dashrestream/subprocess.hpp"

namespace dashrestream::media {

inline constexpr const char* kToolchainEnv = "DASHRESTREAM_FFMPEG";

struct CommandRecord {
  std::vector<std::string> argv;
  int exit_code = 0;
  double elapsed_ms = 0;
};

class Toolchain {
 public:
  using Observer = std::function<void(const CommandRecord&)>;

  explicit Toolchain(std::string ffmpeg = "ffmpeg") : ffmpeg_(std::move(ffmpeg)) {}

  /// Binary from $DASHRESTREAM_FFMPEG, else "ffmpeg" on PATH.
  static Toolchain FromEnvironment() {
    const char* env = std::getenv(kToolchainEnv);
    return Toolchain(env != nullptr && *env != '\0' ? env : "ffmpeg");
  }

  const std::string& ffmpeg() const { return ffmpeg_; }
  void set_observer(Observer obs) { observer_ = std::move(obs); }

  /// Runs ffmpeg with `args` (banner and stdin interaction disabled).
  process::Result Exec(const std::vector<std::string>& args) const {
    std::vector<std::string> argv = {ffmpeg_, "-hide_banner", "-nostdin", "-nostats"};
    argv.insert(argv.end(), args.begin(), args.end());
    process::Result r;
    try {
      r = process::Run(argv);
    } catch (const std::system_error& e) {
      throw AssemblyError("media toolchain unavailable: " + std::string(e.what()) +
                          " (set " + kToolchainEnv + ")");
    }
    if (observer_) observer_({argv, r.exit_code, r.elapsed_ms});
    return r;
  }

  /// Exec that converts a nonzero exit into an AssemblyError.
  process::Result Require(const std::vector<std::string>& args, const std::string& what) const {
    auto r = Exec(args);
    if (!r.ok()) throw AssemblyError(what + " (exit " + std::to_string(r.exit_code) + ")", Tail(r.err));
    return r;
  }

  bool Available() const {
    try {
      return Exec({"-version"}).ok();
    } catch (const AssemblyError&) {
      return false;
    }
  }

  /// Last lines of tool output, enough to diagnose without flooding.
  static std::string Tail(const std::string& text, std::size_t lines = 12) {
    std::size_t pos = text.size();
    for (std::size_t n = 0; n <= lines && pos > 0; ++n) {
      pos = text.rfind('\n', pos - 1);
      if (pos == std::string::npos) return text;
    }
    return text.substr(pos + 1);
  }

 private:
  std::string ffmpeg_;
  Observer observer_;
};

struct Rational {
  long long num = 0;
  long long den = 1;

  double value() const { return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den); }
  bool operator==(const Rational&) const = default;
};

struct StreamInfo {
  bool has_video = false;
  bool has_audio = false;
  Resolution resolution;
  double fps = 0;  // as printed in the banner (rounded)
  int sample_rate = 0;
  int channels = 0;
  std::string video_codec;
  std::string audio_codec;
};

/// Parses the "Stream #..." banner lines ffmpeg prints for an input.
inline StreamInfo ParseStreamBanner(const std::string& banner) {
  StreamInfo info;
  static const std::regex kVideo(R"(Stream #\d+:\d+.*?: Video: (\w+).*?, (\d+)x(\d+)[ ,])");
  static const std::regex kFps(R"(, ([0-9.]+) fps)");
  static const std::regex kAudio(R"(Stream #\d+:\d+.*?: Audio: (\w+).*?, (\d+) Hz, ([^,]+))");
  for (auto line : strings::Split(banner, '\n')) {
    const std::string l(line);
    std::smatch m;
    if (!info.has_video && std::regex_search(l, m, kVideo)) {
      info.has_video = true;
      info.video_codec = m[1];
      info.resolution = {std::stoi(m[2]), std::stoi(m[3])};
      std::smatch f;
      if (std::regex_search(l, f, kFps)) info.fps = std::stod(f[1]);
    } else if (!info.has_audio && std::regex_search(l, m, kAudio)) {
      info.has_audio = true;
      info.audio_codec = m[1];
      info.sample_rate = std::stoi(m[2]);
      const std::string layout = m[3];
      info.channels = layout == "mono" ? 1 : layout == "stereo" ? 2 : 0;
      if (info.channels == 0 && std::isdigit(static_cast<unsigned char>(layout[0])))
        info.channels = std::atoi(layout.c_str());
    }
  }
  return info;
}

inline StreamInfo ProbeStreams(const Toolchain& tc, const std::string& path) {
  // No output file: ffmpeg exits nonzero after printing the input banner.
  auto r = tc.Exec({"-i", path});
  auto info = ParseStreamBanner(r.err);
  if (!info.has_video && !info.has_audio)
    throw AssemblyError("cannot probe '" + path + "'", Toolchain::Tail(r.err));
  return info;
}

struct FrameInfo {
  long long n = 0;
  double pts_s = 0;
  Resolution resolution;
  std::string checksum;  // Adler-32 of the decoded picture, as printed by showinfo
  std::array<double, 3> mean{};  // per-plane mean sample value
};

struct FrameProbe {
  Rational frame_rate;
  std::vector<FrameInfo> frames;

  double duration_s() const {
    return frame_rate.num > 0 ? static_cast<double>(frames.size()) / frame_rate.value() : 0.0;
  }
};

inline FrameProbe ParseShowinfo(const std::string& log) {
  FrameProbe probe;
  static const std::regex kConfig(R"(config in time_base: \S+, frame_rate: (\d+)/(\d+))");
  static const std::regex kFrame(
      R"(\bn:\s*(\d+) .*?pts_time:(\S+).*? s:(\d+)x(\d+) .*?checksum:([0-9A-Fa-f]+))");
  static const std::regex kMean(R"(mean:\[([0-9.]+) ([0-9.]+) ([0-9.]+)\])");
  for (auto line : strings::Split(log, '\n')) {
    if (line.find("Parsed_showinfo") == std::string_view::npos) continue;
    const bool frame_line = line.find("pts_time:") != std::string_view::npos;
    const bool config_line = line.find("config in") != std::string_view::npos;
    if (!frame_line && !config_line) continue;
    const std::string l(line);
    std::smatch m;
    if (frame_line && std::regex_search(l, m, kFrame)) {
      FrameInfo f;
      f.n = std::stoll(m[1]);
      f.pts_s = strings::ParseDouble(std::string(m[2])).value_or(0.0);
      f.resolution = {std::stoi(m[3]), std::stoi(m[4])};
      f.checksum = m[5];
      std::smatch mm;
      if (std::regex_search(l, mm, kMean))
        for (int p = 0; p < 3; ++p) f.mean[p] = std::stod(mm[p + 1]);
      probe.frames.push_back(std::move(f));
    } else if (probe.frame_rate.num == 0 && std::regex_search(l, m, kConfig)) {
      probe.frame_rate = {std::stoll(m[1]), std::stoll(m[2])};
    }
  }
  return probe;
}

/// Decodes the first video stream frame by frame. `prefilter` (e.g. a crop)
/// runs before hashing. Resolution changes are reported, not rescaled.
inline FrameProbe ProbeFrames(const Toolchain& tc, const std::string& path,
                              const std::string& prefilter = "") {
  const std::string vf = prefilter.empty() ? "showinfo" : prefilter + ",showinfo";
  // Demuxer time base on the null output avoids dts-collision warnings that
  // would interleave with the showinfo lines.
  auto r = tc.Exec({"-i", path, "-map", "0:v:0", "-noautoscale", "-vf", vf, "-fps_mode",
                    "passthrough", "-enc_time_base:v", "demux", "-f", "null", "-"});
  if (!r.ok()) throw AssemblyError("cannot decode video of '" + path + "'", Toolchain::Tail(r.err));
  auto probe = ParseShowinfo(r.err);
  // Numbering restarts at 0 when the graph is rebuilt on a resolution change.
  for (std::size_t i = 0; i < probe.frames.size(); ++i)
    if (probe.frames[i].n != 0 && (i == 0 || probe.frames[i].n != probe.frames[i - 1].n + 1))
      throw AssemblyError("garbled frame probe of '" + path + "' near frame " + std::to_string(i));
  return probe;
}

/// Exact frame rate of the first video stream, read from the filter graph
/// after decoding a single frame.
inline Rational ProbeFrameRate(const Toolchain& tc, const std::string& path) {
  auto r = tc.Exec({"-i", path, "-map", "0:v:0", "-frames:v", "1", "-vf", "showinfo", "-f", "null",
                    "-"});
  if (!r.ok()) throw AssemblyError("cannot decode video of '" + path + "'", Toolchain::Tail(r.err));
  auto probe = ParseShowinfo(r.err);
  if (probe.frame_rate.num <= 0 || probe.frame_rate.den <= 0)
    throw AssemblyError("no frame rate reported for '" + path + "'", Toolchain::Tail(r.err));
  return probe.frame_rate;
}

struct AudioProbe {
  long long samples = 0;
  int sample_rate = 0;

  double duration_s() const {
    return sample_rate > 0 ? static_cast<double>(samples) / sample_rate : 0.0;
  }
};

/// Decoded sample count of the first audio stream (framecrc durations are in
/// 1/sample_rate units for decoded audio).
inline AudioProbe ProbeAudio(const Toolchain& tc, const std::string& path) {
  auto r = tc.Exec({"-i", path, "-map", "0:a:0", "-f", "framecrc", "-"});
  if (!r.ok()) throw AssemblyError("cannot decode audio of '" + path + "'", Toolchain::Tail(r.err));
  AudioProbe probe;
  long long tb_num = 1, tb_den = 0;
  for (auto line : strings::Split(r.out, '\n')) {
    if (strings::StartsWith(line, "#tb 0:")) {
      auto tb = strings::Trim(line.substr(6));
      auto slash = tb.find('/');
      tb_num = strings::ParseInt(tb.substr(0, slash)).value_or(1);
      tb_den = strings::ParseInt(tb.substr(slash + 1)).value_or(0);
    } else if (strings::StartsWith(line, "#sample_rate 0:")) {
      probe.sample_rate = static_cast<int>(
          strings::ParseInt(strings::Trim(line.substr(15))).value_or(0));
    } else if (!line.empty() && line[0] != '#') {
      auto cells = strings::Split(line, ',');
      if (cells.size() >= 4) probe.samples += strings::ParseInt(strings::Trim(cells[3])).value_or(0);
    }
  }
  // Rescale when the time base is not 1/sample_rate.
  if (tb_den > 0 && probe.sample_rate > 0 && tb_den != probe.sample_rate * tb_num)
    probe.samples = probe.samples * tb_num * probe.sample_rate / tb_den;
  return probe;
}

/// Full decode with -xerror; the diagnostics are returned on failure.
inline std::optional<std::string> DecodeErrors(const Toolchain& tc, const std::string& path) {
  auto r = tc.Exec({"-v", "error", "-xerror", "-i", path, "-map", "0", "-f", "null", "-"});
  if (r.ok()) return std::nullopt;
  return Toolchain::Tail(r.err);
}

/// Flags that keep container and encoder output reproducible across runs.
inline std::vector<std::string> BitexactFlags() {
  return {"-fflags", "+bitexact", "-flags:v", "+bitexact", "-flags:a", "+bitexact",
          "-map_metadata", "-1", "-map_chapters", "-1"};
}

}  // namespace dashrestream::media

#endif  // DASHRESTREAM_MEDIA_HPP
