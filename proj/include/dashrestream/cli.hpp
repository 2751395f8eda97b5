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

// Front end: command-line flags and INI configuration files both populate a
// RunConfig, which Run() drives through load -> acquire -> plan -> assemble
// -> metrics.
//
// The two surfaces keep their historical spellings: the command line says
// rep_lvl_col / seg_index_col / stall_dur_col, the config file says
// rep_lvl_column / chunk_index_column / stall_dur_column. Both are routed
// through one field table so they cannot drift apart.

#ifndef DASHRESTREAM_CLI_HPP
#define DASHRESTREAM_CLI_HPP

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <json.hpp>

#include "dashrestream/acquire.hpp"
#include "dashrestream/assembly.hpp"
#include "dashrestream/errors.hpp"
#include "dashrestream/log_io.hpp"
#include "dashrestream/manifest.hpp"
#include "dashrestream/media.hpp"
#include "dashrestream/metrics.hpp"
#include "dashrestream/run_log.hpp"
#include "dashrestream/strings.hpp"

namespace dashrestream {

namespace fs = std::filesystem;

enum class LogLocation { kLocal, kRemote };
enum class ParameterType { kPath, kConfig };

inline const char* LogLocationName(LogLocation l) {
  return l == LogLocation::kLocal ? "local" : "remote";
}
inline const char* ParameterTypeName(ParameterType p) {
  return p == ParameterType::kPath ? "path" : "config";
}

struct RunConfig {
  std::string path_to_log;
  LogSchema schema;
  std::string config_path;
  std::string path_video;
  std::string path_audio;  // empty: video-only content
  std::string gif_path;
  std::string dest_video;
  std::string final_path;
  std::string mpd_path;
  LogLocation log_location = LogLocation::kLocal;
  ParameterType parameter_type = ParameterType::kPath;
  bool cleanup = false;
  ScaleMode auto_scale = ScaleMode::kNative;
  std::string scale_res;

  bool operator==(const RunConfig&) const = default;
};

/// Equal apart from how the settings were supplied.
inline bool SameRun(RunConfig a, RunConfig b) {
  a.parameter_type = b.parameter_type = ParameterType::kPath;
  a.config_path.clear();
  b.config_path.clear();
  return a == b;
}

namespace detail {

// Value rejected by a field setter; callers attach the surface-specific
// flag or key name.
struct BadValue {
  std::string message;
};

inline bool ParseBool(const std::string& v) {
  const auto t = strings::ToLower(strings::Trim(v));
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw BadValue{"expected True or False, got '" + v + "'"};
}

struct Field {
  std::string cli;                // command-line flag name (without dashes)
  std::vector<std::string> keys;  // configuration-file keys
  std::function<void(RunConfig&, const std::string&)> set;
};

inline const std::vector<Field>& Fields() {
  static const std::vector<Field> kFields = {
      {"path_to_log", {"path_to_log"}, [](RunConfig& c, const std::string& v) { c.path_to_log = v; }},
      {"rep_lvl_col", {"rep_lvl_column"},
       [](RunConfig& c, const std::string& v) { c.schema.rep_level_column = v; }},
      {"seg_index_col", {"chunk_index_column"},
       [](RunConfig& c, const std::string& v) { c.schema.index_column = v; }},
      {"stall_dur_col", {"stall_dur_column"},
       [](RunConfig& c, const std::string& v) { c.schema.stall_duration_column = v; }},
      {"log_separator", {"log_separator"},
       [](RunConfig& c, const std::string& v) {
         try {
           c.schema.separator = Separator::Parse(v);
         } catch (const UsageError& e) {
           throw BadValue{e.what()};
         }
       }},
      {"config_path", {}, [](RunConfig& c, const std::string& v) { c.config_path = v; }},
      {"path_video", {"path_video"}, [](RunConfig& c, const std::string& v) { c.path_video = v; }},
      {"path_audio", {"path_audio"}, [](RunConfig& c, const std::string& v) { c.path_audio = v; }},
      {"gif_path", {"gif_path"}, [](RunConfig& c, const std::string& v) { c.gif_path = v; }},
      {"log_location", {"log_location"},
       [](RunConfig& c, const std::string& v) {
         const auto t = strings::ToLower(strings::Trim(v));
         if (t == "local")
           c.log_location = LogLocation::kLocal;
         else if (t == "remote")
           c.log_location = LogLocation::kRemote;
         else
           throw BadValue{"expected local or remote, got '" + v + "'"};
       }},
      {"dest_video", {"dest_video"}, [](RunConfig& c, const std::string& v) { c.dest_video = v; }},
      {"final_path", {"final_path"}, [](RunConfig& c, const std::string& v) { c.final_path = v; }},
      {"parameter_type", {"parameters"},
       [](RunConfig& c, const std::string& v) {
         const auto t = strings::ToLower(strings::Trim(v));
         if (t == "path" || t == "cli" || t == "command-line")
           c.parameter_type = ParameterType::kPath;
         else if (t == "config")
           c.parameter_type = ParameterType::kConfig;
         else
           throw BadValue{"expected path or config, got '" + v + "'"};
       }},
      {"cleanup", {"cleanup"}, [](RunConfig& c, const std::string& v) { c.cleanup = ParseBool(v); }},
      {"auto_scale", {"auto_scale"},
       [](RunConfig& c, const std::string& v) {
         try {
           c.auto_scale = ParseScaleMode(v);
         } catch (const UsageError& e) {
           throw BadValue{e.what()};
         }
       }},
      {"scale_res", {"scale_resolution", "scale_res"},
       [](RunConfig& c, const std::string& v) { c.scale_res = std::string(strings::Trim(v)); }},
      {"mpd_path", {"mpd_path"}, [](RunConfig& c, const std::string& v) { c.mpd_path = v; }},
  };
  return kFields;
}

// Keys every configuration file must carry (the documented example set).
inline const std::vector<std::string>& RequiredConfigKeys() {
  static const std::vector<std::string> kKeys = {
      "path_to_log", "rep_lvl_column", "chunk_index_column", "stall_dur_column",
      "log_separator", "path_audio", "path_video", "dest_video",
      "gif_path", "final_path", "mpd_path", "auto_scale",
      "log_location"};
  return kKeys;
}

// Cross-field rules shared by both surfaces. `fail(name, message)` throws.
// Batch runs supply the log and output per session, so they are optional.
template <typename Fail>
void CheckConsistency(const RunConfig& c, Fail fail, bool cli, bool single_run = true) {
  auto name = [cli](const char* flag, const char* key) { return std::string(cli ? flag : key); };
  if (single_run && c.path_to_log.empty())
    fail(name("--path_to_log", "path_to_log"), "a video log is required");
  if (c.dest_video.empty()) fail(name("--dest_video", "dest_video"), "a working directory is required");
  if (single_run && c.final_path.empty())
    fail(name("--final_path", "final_path"), "an output path is required");
  if (c.log_location == LogLocation::kLocal && c.path_video.empty())
    fail(name("--path_video", "path_video"), "local mode needs the video segment location");
  if (c.log_location == LogLocation::kRemote && c.mpd_path.empty())
    fail(name("--mpd_path", "mpd_path"), "remote mode needs the manifest location");
  if (c.auto_scale == ScaleMode::kFixed && c.scale_res.empty())
    fail(name("--scale_res", "scale_resolution"), "auto_scale 2 needs a scale resolution");
}

}  // namespace detail

/// Reads an INI file whose [parameters] section uses the documented keys.
inline RunConfig ParseConfig(const std::string& path) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::read_ini(path, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError("", "cannot read configuration '" + path + "': " + e.message() +
                              (e.line() ? " (line " + std::to_string(e.line()) + ")" : ""));
  }
  auto section = tree.get_child_optional("parameters");
  if (!section || section->empty())
    throw ConfigError("parameters", "configuration '" + path + "' has no [parameters] section");

  std::map<std::string, const detail::Field*> by_key;
  for (const auto& f : detail::Fields())
    for (const auto& k : f.keys) by_key[k] = &f;

  RunConfig cfg;
  cfg.parameter_type = ParameterType::kConfig;
  cfg.config_path = path;
  std::set<std::string> seen;
  for (const auto& [key, node] : *section) {
    auto it = by_key.find(key);
    if (it == by_key.end())
      throw ConfigError(key, "unknown configuration key '" + key + "' in '" + path + "'");
    try {
      it->second->set(cfg, node.data());
    } catch (const detail::BadValue& e) {
      throw ConfigError(key, "configuration key '" + key + "': " + e.message);
    }
    seen.insert(key);
  }
  for (const auto& key : detail::RequiredConfigKeys())
    if (!seen.count(key))
      throw ConfigError(key, "configuration '" + path + "' lacks key '" + key + "'");
  detail::CheckConsistency(
      cfg, [](const std::string& key, const std::string& msg) { throw ConfigError(key, msg + " (" + key + ")"); },
      false);
  return cfg;
}

/// Registers the run flags on `app`; the returned map holds their raw values.
inline std::shared_ptr<std::map<std::string, std::string>> AddRunFlags(CLI::App& app) {
  auto values = std::make_shared<std::map<std::string, std::string>>();
  static const std::map<std::string, std::string> kHelp = {
      {"path_to_log", "Location of video log"},
      {"rep_lvl_col", "Column name used in video log for bitrate"},
      {"seg_index_col", "Column name used in video log for segment index"},
      {"stall_dur_col", "Column name used in video log for stall duration"},
      {"log_separator", "Separator used in video log (example: tab)"},
      {"config_path", "Location of config file"},
      {"path_video", "Location of video segments"},
      {"path_audio", "Location of audio segments"},
      {"gif_path", "Location of gif file"},
      {"log_location", "Location of segments: local or remote"},
      {"dest_video", "Where to save intermediate files (segments)"},
      {"final_path", "Where the final video is saved (file or directory)"},
      {"parameter_type", "Use command-line arguments (path) or a config file (config)"},
      {"cleanup", "Remove intermediate files (True/False)"},
      {"auto_scale", "0 native, 1 highest resolution in log, 2 fixed (scale_res)"},
      {"scale_res", "Fixed output resolution, e.g. 1080p or 1920x1080"},
      {"mpd_path", "Manifest URL or path (remote mode)"},
  };
  for (const auto& f : detail::Fields()) {
    std::string names = "--" + f.cli;
    if (f.cli == "scale_res") names += ",--scale_resolution";
    // A repeated flag takes its last value, as with most option parsers.
    app.add_option(names, (*values)[f.cli], kHelp.at(f.cli))
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  }
  return values;
}

/// Builds a RunConfig from parsed flag values (only flags given on the
/// command line are applied). With parameter_type config, the file named by
/// config_path supplies the settings and explicit flags override it.
inline RunConfig ConfigFromFlags(const CLI::App& app,
                                 const std::map<std::string, std::string>& values,
                                 bool single_run = true) {
  auto given = [&](const std::string& name) { return app.count("--" + name) > 0; };
  auto apply = [&](RunConfig& cfg, bool skip_type) {
    for (const auto& f : detail::Fields()) {
      if (!given(f.cli) || (skip_type && f.cli == "parameter_type")) continue;
      try {
        f.set(cfg, values.at(f.cli));
      } catch (const detail::BadValue& e) {
        throw UsageError(values.at(f.cli), "--" + f.cli + ": " + e.message);
      }
    }
  };
  RunConfig cfg;
  apply(cfg, false);
  if (cfg.parameter_type == ParameterType::kConfig) {
    if (cfg.config_path.empty())
      throw UsageError("--parameter_type", "--parameter_type config needs --config_path");
    const std::string config_path = cfg.config_path;
    cfg = ParseConfig(config_path);
    apply(cfg, true);
    cfg.parameter_type = ParameterType::kConfig;
    cfg.config_path = config_path;
  }
  detail::CheckConsistency(
      cfg,
      [](const std::string& flag, const std::string& msg) {
        throw UsageError(flag, "missing or inconsistent flag " + flag + ": " + msg);
      },
      true, single_run);
  return cfg;
}

/// Parses a full argument vector (argv[0] is the program name).
inline RunConfig ParseArgs(const std::vector<std::string>& argv) {
  CLI::App app("Re-create a streamed session as one impaired video", "dashrestream");
  auto values = AddRunFlags(app);
  std::vector<std::string> rev(argv.rbegin(), argv.rend() - (argv.empty() ? 0 : 1));
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    std::string token;
    if (!rev.empty()) {
      // The first token the parser did not consume, when it reports one.
      const std::string what = e.what();
      auto colon = what.rfind(": ");
      token = colon == std::string::npos ? what : what.substr(colon + 2);
    }
    throw UsageError(token, e.what());
  }
  return ConfigFromFlags(app, *values);
}

// ---------------------------------------------------------------- run

struct RunOptions {
  std::optional<media::Toolchain> toolchain;  // defaults to FromEnvironment()
  FetchOptions fetch;
  AssemblyOptions assembly;
  QoEParams qoe;
  ImpairmentMapping impairments;
  bool write_run_log = true;
  std::function<void(const std::string&)> progress;  // human-readable stage lines
};

struct RunResult {
  std::string output_path;
  std::string report_path;
  std::string run_log_path;
  SessionReport report;
  AssemblyPlan plan;
  double probed_duration_s = 0;
};

/// Final video location: a directory (existing, or spelled with a trailing
/// separator) receives "<log stem>.mkv".
inline std::string ResolveOutputPath(const RunConfig& cfg) {
  const std::string& p = cfg.final_path;
  std::error_code ec;
  const bool dir = fs::is_directory(p, ec) || strings::EndsWith(p, "/");
  if (dir) return (fs::path(p) / (fs::path(cfg.path_to_log).stem().string() + ".mkv")).string();
  return p;
}

/// Existence checks for every path the run will read.
inline void ValidatePaths(const RunConfig& cfg) {
  std::error_code ec;
  if (!fs::is_regular_file(cfg.path_to_log, ec))
    throw ConfigError("path_to_log", "video log '" + cfg.path_to_log + "' does not exist");
  if (!cfg.gif_path.empty() && !fs::is_regular_file(cfg.gif_path, ec))
    throw ConfigError("gif_path", "overlay '" + cfg.gif_path + "' does not exist");
  if (cfg.log_location == LogLocation::kLocal) {
    if (!fs::is_directory(cfg.path_video, ec))
      throw ConfigError("path_video", "video segments '" + cfg.path_video + "' do not exist");
    if (!cfg.path_audio.empty() && !fs::is_directory(cfg.path_audio, ec))
      throw ConfigError("path_audio", "audio segments '" + cfg.path_audio + "' do not exist");
    if (!cfg.mpd_path.empty() && !url::IsHttp(cfg.mpd_path) && !fs::is_regular_file(cfg.mpd_path, ec))
      throw ConfigError("mpd_path", "manifest '" + cfg.mpd_path + "' does not exist");
  }
}

namespace detail {

class StageTimer {
 public:
  StageTimer(RunLog& log, const RunOptions& opts, std::string stage)
      : log_(log), opts_(opts), stage_(std::move(stage)), t0_(std::chrono::steady_clock::now()) {
    log_.Stage(stage_, "start");
    if (opts_.progress) opts_.progress(stage_);
  }
  void Done(nlohmann::json detail = nullptr) {
    log_.Stage(stage_, "done", Elapsed(), std::move(detail));
    done_ = true;
  }
  ~StageTimer() {
    if (!done_) log_.Stage(stage_, "failed", Elapsed());
  }

 private:
  double Elapsed() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0_).count();
  }
  RunLog& log_;
  const RunOptions& opts_;
  std::string stage_;
  std::chrono::steady_clock::time_point t0_;
  bool done_ = false;
};

}  // namespace detail

/// Intermediate files created by a run inside the working directory.
inline std::vector<fs::path> IntermediatePaths(const RunConfig& cfg, const std::string& output) {
  const fs::path w = cfg.dest_video;
  return {w / "video", w / "audio", w / "merged", w / "muxed", w / "probe",
          fs::path(output + ".concat.txt")};
}

inline RunResult Run(const RunConfig& cfg, const RunOptions& opts = {}) {
  ValidatePaths(cfg);
  media::Toolchain tc = opts.toolchain ? *opts.toolchain : media::Toolchain::FromEnvironment();

  RunResult result;
  result.output_path = ResolveOutputPath(cfg);
  fs::create_directories(fs::absolute(result.output_path).parent_path());
  fs::create_directories(cfg.dest_video);
  const fs::path out = result.output_path;
  const std::string stem = (out.parent_path() / out.stem()).string();

  RunLog runlog;
  if (opts.write_run_log) {
    result.run_log_path = stem + ".run.jsonl";
    runlog.Open(result.run_log_path);
  }
  tc.set_observer([&runlog](const media::CommandRecord& c) { runlog.Command(c); });
  runlog.Write({{"event", "config"},
                {"path_to_log", cfg.path_to_log},
                {"log_location", LogLocationName(cfg.log_location)},
                {"auto_scale", static_cast<int>(cfg.auto_scale)},
                {"scale_res", cfg.scale_res},
                {"output", result.output_path},
                {"toolchain", tc.ffmpeg()}});

  std::optional<VideoLog> log;
  {
    detail::StageTimer t(runlog, opts, "log");
    log = LoadLog(cfg.path_to_log, cfg.schema);
    t.Done({{"records", log->size()}});
  }
  if (!log->stalls().empty() && cfg.gif_path.empty())
    throw ConfigError("gif_path", "the log reports stalls but no overlay (gif_path) was given");

  Ladder ladder;
  std::optional<Manifest> manifest;
  {
    detail::StageTimer t(runlog, opts, "manifest");
    if (!cfg.mpd_path.empty()) {
      manifest = LoadManifest(cfg.mpd_path, opts.fetch);
      ladder = manifest->ladder;
    } else {
      ladder = ProbeLocalLadder(tc, cfg.path_video, UsedRepLevels(*log));
    }
    ValidateAgainstLadder(*log, ladder);
    t.Done({{"representations", ladder.size()}});
  }

  std::vector<StagedSegment> staged;
  {
    detail::StageTimer t(runlog, opts, "acquire");
    if (cfg.log_location == LogLocation::kRemote)
      staged = AcquireRemote(*log, *manifest, cfg.dest_video, opts.fetch);
    else
      staged = AcquireLocal(*log, cfg.path_video, cfg.path_audio, cfg.dest_video);
    t.Done({{"segments", staged.size()}});
  }

  {
    detail::StageTimer t(runlog, opts, "assembly");
    const fs::path probe_dir = fs::path(cfg.dest_video) / "probe";
    fs::create_directories(probe_dir);
    const std::string probe = (probe_dir / "first.mp4").string();
    detail::ConcatBytes({staged.front().video_init, staged.front().video_path}, probe);
    const media::Rational fps = media::ProbeFrameRate(tc, probe);

    ScalePolicy policy;
    policy.mode = cfg.auto_scale;
    if (cfg.auto_scale == ScaleMode::kFixed)
      policy.fixed_resolution = ParseScaleResolution(cfg.scale_res, ladder);
    result.plan = Plan(*log, ladder, policy, cfg.gif_path, result.output_path, staged, fps);

    AssemblyOptions aopts = opts.assembly;
    auto user_warn = aopts.warn;
    aopts.warn = [&runlog, user_warn](const std::string& w) {
      runlog.Warning(w);
      if (user_warn) user_warn(w);
    };
    auto assembled = Assemble(tc, result.plan, cfg.dest_video, aopts);
    result.probed_duration_s = assembled.probed_duration_s.value_or(assembled.expected_duration_s);
    t.Done({{"fps", std::to_string(fps.num) + "/" + std::to_string(fps.den)},
            {"expected_duration_s", assembled.expected_duration_s},
            {"probed_duration_s", result.probed_duration_s}});
  }

  {
    detail::StageTimer t(runlog, opts, "metrics");
    result.report.log = cfg.path_to_log;
    result.report.group = fs::path(cfg.path_to_log).parent_path().filename().string();
    result.report.qos = ComputeQoS(*log);
    result.report.qoe = QoeScore(opts.qoe, opts.impairments(result.report.qos));
    nlohmann::json j = ToJson(result.report);
    j["output"] = result.output_path;
    j["duration_s"] = result.probed_duration_s;
    result.report_path = stem + ".report.json";
    std::ofstream(result.report_path) << j.dump(2) << '\n';
    t.Done();
  }

  if (cfg.cleanup) {
    detail::StageTimer t(runlog, opts, "cleanup");
    std::error_code ec;
    for (const auto& p : IntermediatePaths(cfg, result.output_path)) fs::remove_all(p, ec);
    t.Done();
  }
  return result;
}

}  // namespace dashrestream

#endif  // DASHRESTREAM_CLI_HPP
