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

// Stages exactly the streamed subset of a session into a working directory:
//
//   <workdir>/video/<index>.m4s       <workdir>/audio/<index>.m4s
//   <workdir>/video/init_<kbps>.mp4   <workdir>/audio/init.mp4
//
// Sources are either a local content tree (one directory per bitrate) or the
// segment addresses of a parsed manifest, fetched over HTTP(S) or copied when
// they are plain paths.

#ifndef DASHRESTREAM_ACQUIRE_HPP
#define DASHRESTREAM_ACQUIRE_HPP

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>

#include "dashrestream/assembly.hpp"
#include "dashrestream/errors.hpp"
#include "dashrestream/log_io.hpp"
#include "dashrestream/manifest.hpp"
#include "dashrestream/media.hpp"
#include "dashrestream/strings.hpp"
#include "dashrestream/url.hpp"

namespace dashrestream {

namespace fs = std::filesystem;

/// Where staged files live inside the working directory.
struct StagingLayout {
  fs::path workdir;

  fs::path video_dir() const { return workdir / "video"; }
  fs::path audio_dir() const { return workdir / "audio"; }
  fs::path video(SegmentIndex i) const { return video_dir() / (std::to_string(i) + ".m4s"); }
  fs::path audio(SegmentIndex i) const { return audio_dir() / (std::to_string(i) + ".m4s"); }
  fs::path video_init(Kbps kbps) const {
    return video_dir() / ("init_" + std::to_string(kbps) + ".mp4");
  }
  fs::path audio_init() const { return audio_dir() / "init.mp4"; }
};

/// On-disk convention of local content: one directory per bitrate (named by
/// its kbps value) holding an init file and numbered segments; audio in a
/// separate directory with the same file naming.
struct LocalLayout {
  std::string init_name = "init.mp4";
  std::string segment_prefix = "seg_";
  std::string segment_suffix = ".m4s";

  fs::path rep_dir(const fs::path& root, Kbps kbps) const { return root / std::to_string(kbps); }
  fs::path video_init(const fs::path& root, Kbps kbps) const {
    return rep_dir(root, kbps) / init_name;
  }
  fs::path video_segment(const fs::path& root, Kbps kbps, SegmentIndex i) const {
    return rep_dir(root, kbps) / (segment_prefix + std::to_string(i) + segment_suffix);
  }
  fs::path audio_init(const fs::path& root) const { return root / init_name; }
  fs::path audio_segment(const fs::path& root, SegmentIndex i) const {
    return root / (segment_prefix + std::to_string(i) + segment_suffix);
  }
};

namespace detail {

// Copy through a temporary so an interrupted run never leaves a torn file
// under the final name.
inline void CopyFileAtomically(const fs::path& source, const fs::path& dest) {
  std::error_code ec;
  fs::create_directories(dest.parent_path(), ec);
  const fs::path tmp = dest.string() + ".part";
  fs::copy_file(source, tmp, fs::copy_options::overwrite_existing, ec);
  if (!ec) fs::rename(tmp, dest, ec);
  if (ec) {
    fs::remove(tmp);
    throw AcquisitionError("cannot copy '" + source.string() + "' to '" + dest.string() +
                           "': " + ec.message());
  }
}

inline void WriteFileAtomically(const fs::path& dest, const std::string& body) {
  std::error_code ec;
  fs::create_directories(dest.parent_path(), ec);
  const fs::path tmp = dest.string() + ".part";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(body.data(), static_cast<std::streamsize>(body.size()));
    if (!out) throw AcquisitionError("cannot write '" + tmp.string() + "'");
  }
  fs::rename(tmp, dest, ec);
  if (ec) throw AcquisitionError("cannot write '" + dest.string() + "': " + ec.message());
}

}  // namespace detail

/// Byte-identical copy of an init file into `workdir` (under `name`, or the
/// source's own file name). Overwrites a previous copy.
inline std::string CopyInit(const std::string& source, const std::string& workdir,
                            const std::string& name = "") {
  std::error_code ec;
  if (!fs::is_regular_file(source, ec))
    throw AcquisitionError("init file '" + source + "' does not exist");
  const fs::path dest = fs::path(workdir) / (name.empty() ? fs::path(source).filename() : fs::path(name));
  detail::CopyFileAtomically(source, dest);
  return dest.string();
}

/// Distinct bitrates of a log, ascending.
inline std::vector<Kbps> UsedRepLevels(const VideoLog& log) {
  std::set<Kbps> s;
  for (const auto& r : log.records()) s.insert(r.rep_level);
  return {s.begin(), s.end()};
}

/// Stages the logged subset from a local content tree. `audio_root` may be
/// empty for video-only content (assembly then generates silence).
inline std::vector<StagedSegment> AcquireLocal(const VideoLog& log, const std::string& video_root,
                                               const std::string& audio_root,
                                               const std::string& workdir,
                                               const LocalLayout& layout = {}) {
  const StagingLayout stage{workdir};
  std::error_code ec;
  if (!fs::is_directory(video_root, ec))
    throw AcquisitionError("video content directory '" + video_root + "' does not exist");
  if (!audio_root.empty() && !fs::is_directory(audio_root, ec))
    throw AcquisitionError("audio content directory '" + audio_root + "' does not exist");

  std::map<Kbps, std::string> inits;
  for (Kbps kbps : UsedRepLevels(log)) {
    const fs::path dir = layout.rep_dir(video_root, kbps);
    if (!fs::is_directory(dir, ec))
      throw AcquisitionError("rep_level " + std::to_string(kbps) + " kbps has no content folder '" +
                             dir.string() + "'");
    const fs::path src = layout.video_init(video_root, kbps);
    if (!fs::is_regular_file(src, ec))
      throw AcquisitionError("rep_level " + std::to_string(kbps) + " kbps: init file '" +
                             src.string() + "' does not exist");
    detail::CopyFileAtomically(src, stage.video_init(kbps));
    inits[kbps] = stage.video_init(kbps).string();
  }
  std::string audio_init;
  if (!audio_root.empty()) {
    const fs::path src = layout.audio_init(audio_root);
    if (!fs::is_regular_file(src, ec))
      throw AcquisitionError("audio init file '" + src.string() + "' does not exist");
    detail::CopyFileAtomically(src, stage.audio_init());
    audio_init = stage.audio_init().string();
  }

  std::vector<StagedSegment> staged;
  staged.reserve(log.size());
  for (const auto& rec : log.records()) {
    const auto what = "segment " + std::to_string(rec.index) + " (rep_level " +
                      std::to_string(rec.rep_level) + " kbps)";
    const fs::path v = layout.video_segment(video_root, rec.rep_level, rec.index);
    if (!fs::is_regular_file(v, ec))
      throw AcquisitionError(what + ": missing file '" + v.string() + "'");
    detail::CopyFileAtomically(v, stage.video(rec.index));
    StagedSegment s{rec, stage.video(rec.index).string(), "", inits.at(rec.rep_level), audio_init};
    if (!audio_root.empty()) {
      const fs::path a = layout.audio_segment(audio_root, rec.index);
      if (!fs::is_regular_file(a, ec))
        throw AcquisitionError("audio of " + what + ": missing file '" + a.string() + "'");
      detail::CopyFileAtomically(a, stage.audio(rec.index));
      s.audio_path = stage.audio(rec.index).string();
    }
    staged.push_back(std::move(s));
  }
  return staged;
}

struct RetryPolicy {
  int attempts = 3;
  std::chrono::milliseconds initial_backoff{500};  // doubled after each failure
};

struct FetchOptions {
  RetryPolicy retry;
  int max_concurrent = 4;
  std::chrono::seconds connect_timeout{10};
  std::chrono::seconds read_timeout{30};
  /// Called once per finished transfer (url, bytes, attempts used).
  std::function<void(const std::string&, std::size_t, int)> on_transfer;
};

struct FetchFailure {
  int status = 0;  // HTTP status, 0 when no response arrived
  std::string reason;
  bool retryable = true;
};

namespace detail {

inline std::optional<FetchFailure> HttpGet(const std::string& address, const FetchOptions& opts,
                                           std::string& body) {
  auto u = url::Parse(address);
  if (!u) return FetchFailure{0, "malformed URL", false};
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
  if (u->scheme == "https") return FetchFailure{0, "built without TLS support", false};
#endif
  httplib::Client client(u->origin());
  client.set_connection_timeout(opts.connect_timeout);
  client.set_read_timeout(opts.read_timeout);
  client.set_follow_location(true);
  auto res = client.Get(u->target);
  if (!res) return FetchFailure{0, httplib::to_string(res.error()), true};
  if (res->status != 200) {
    const bool retryable = res->status >= 500 || res->status == 408 || res->status == 429;
    return FetchFailure{res->status, "HTTP " + std::to_string(res->status), retryable};
  }
  body = std::move(res->body);
  return std::nullopt;
}

}  // namespace detail

/// Fetches one address (http, https or a filesystem path) into `dest`,
/// retrying transient failures. Empty bodies are integrity errors.
inline int FetchTo(const std::string& address, const fs::path& dest, const std::string& what,
                   const FetchOptions& opts = {}) {
  if (!url::IsHttp(address)) {
    std::string path = address;
    if (strings::StartsWith(path, "file://")) path = path.substr(7);
    std::error_code ec;
    if (!fs::is_regular_file(path, ec))
      throw AcquisitionError(what + ": '" + address + "' does not exist");
    if (fs::file_size(path, ec) == 0)
      throw IntegrityError(what + ": '" + address + "' is empty");
    detail::CopyFileAtomically(path, dest);
    if (opts.on_transfer) opts.on_transfer(address, fs::file_size(dest, ec), 1);
    return 1;
  }
  auto backoff = opts.retry.initial_backoff;
  const int attempts = std::max(1, opts.retry.attempts);
  FetchFailure last;
  for (int attempt = 1; attempt <= attempts; ++attempt) {
    std::string body;
    auto failure = detail::HttpGet(address, opts, body);
    if (!failure) {
      if (body.empty()) throw IntegrityError(what + ": '" + address + "' returned an empty body");
      detail::WriteFileAtomically(dest, body);
      if (opts.on_transfer) opts.on_transfer(address, body.size(), attempt);
      return attempt;
    }
    last = *failure;
    if (!last.retryable) break;
    if (attempt < attempts) {
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
  }
  throw AcquisitionError(what + ": GET '" + address + "' failed" +
                         (last.status ? " with status " + std::to_string(last.status)
                                      : " (" + last.reason + ")") +
                         (last.retryable ? " after " + std::to_string(attempts) + " attempts" : ""));
}

struct Transfer {
  std::string address;
  fs::path dest;
  std::string what;
};

/// Runs transfers with at most opts.max_concurrent in flight. The first
/// failure (in list order) is rethrown after in-flight transfers finish.
inline void FetchAll(const std::vector<Transfer>& transfers, const FetchOptions& opts = {}) {
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::exception_ptr failure;
  std::size_t failed_at = transfers.size();
  auto worker = [&] {
    for (std::size_t i = next++; i < transfers.size(); i = next++) {
      {
        std::lock_guard<std::mutex> lock(mu);
        if (failure) return;
      }
      try {
        FetchTo(transfers[i].address, transfers[i].dest, transfers[i].what, opts);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (i < failed_at) {
          failure = std::current_exception();
          failed_at = i;
        }
      }
    }
  };
  const int n = std::clamp(opts.max_concurrent, 1, std::max(1, static_cast<int>(transfers.size())));
  std::vector<std::thread> pool;
  for (int i = 0; i < n; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

/// The transfers needed for a log: one init per bitrate used, one segment per
/// record, plus the matching audio when the manifest has audio.
inline std::vector<Transfer> PlanTransfers(const VideoLog& log, const Manifest& manifest,
                                           const std::string& workdir) {
  const StagingLayout stage{workdir};
  const auto& index = manifest.index;
  auto pick = [&](const std::vector<std::string>& urls, const SegmentRecord& rec,
                  const std::string& what) -> const std::string& {
    const long long pos = rec.index - index.start_number;
    if (pos < 0 || pos >= static_cast<long long>(urls.size()))
      throw AcquisitionError(what + " is outside the manifest (" + std::to_string(urls.size()) +
                             " segments from number " + std::to_string(index.start_number) + ")");
    return urls[static_cast<std::size_t>(pos)];
  };

  std::vector<Transfer> out;
  for (Kbps kbps : UsedRepLevels(log)) {
    const auto& rep = ResolveRepresentation(manifest.ladder, kbps);
    out.push_back({index.init_urls.at(rep.id), stage.video_init(kbps),
                   "init of rep_level " + std::to_string(kbps) + " kbps"});
  }
  const std::string* audio_id = index.selected_audio ? &*index.selected_audio : nullptr;
  if (audio_id) out.push_back({index.init_urls.at(*audio_id), stage.audio_init(), "audio init"});
  for (const auto& rec : log.records()) {
    const auto what = "segment " + std::to_string(rec.index) + " (rep_level " +
                      std::to_string(rec.rep_level) + " kbps)";
    const auto& rep = ResolveRepresentation(manifest.ladder, rec.rep_level);
    out.push_back({pick(index.video_urls.at(rep.id), rec, what), stage.video(rec.index), what});
    if (audio_id)
      out.push_back({pick(index.audio_urls.at(*audio_id), rec, "audio of " + what),
                     stage.audio(rec.index), "audio of " + what});
  }
  return out;
}

/// Downloads only the logged subset named by the manifest.
inline std::vector<StagedSegment> AcquireRemote(const VideoLog& log, const Manifest& manifest,
                                                const std::string& workdir,
                                                const FetchOptions& opts = {}) {
  try {
    ValidateAgainstLadder(log, manifest.ladder);
  } catch (const UnknownBitrateError& e) {
    throw AcquisitionError(std::string("log does not match the manifest: ") + e.what());
  }
  FetchAll(PlanTransfers(log, manifest, workdir), opts);
  const StagingLayout stage{workdir};
  const bool audio = manifest.index.selected_audio.has_value();
  std::vector<StagedSegment> staged;
  for (const auto& rec : log.records())
    staged.push_back({rec, stage.video(rec.index).string(),
                      audio ? stage.audio(rec.index).string() : "",
                      stage.video_init(rec.rep_level).string(),
                      audio ? stage.audio_init().string() : ""});
  return staged;
}

/// Reads a manifest from a URL or a file; relative addresses resolve against
/// its location.
inline Manifest LoadManifest(const std::string& location, const FetchOptions& opts = {}) {
  std::string text;
  if (url::IsHttp(location)) {
    auto backoff = opts.retry.initial_backoff;
    std::optional<FetchFailure> failure;
    for (int attempt = 1; attempt <= std::max(1, opts.retry.attempts); ++attempt) {
      failure = detail::HttpGet(location, opts, text);
      if (!failure || !failure->retryable) break;
      if (attempt < opts.retry.attempts) {
        std::this_thread::sleep_for(backoff);
        backoff *= 2;
      }
    }
    if (failure)
      throw AcquisitionError("cannot fetch manifest '" + location + "': " + failure->reason);
  } else {
    auto body = strings::ReadFile(location);
    if (!body) throw ManifestError("cannot read manifest '" + location + "'");
    text = std::move(*body);
  }
  std::string anchor = location;
  if (!url::IsHttp(location)) anchor = fs::absolute(location).lexically_normal().string();
  return ParseManifest(text, anchor);
}

/// Ladder of a local content tree, built by probing each used bitrate's init
/// segment for its picture size.
inline Ladder ProbeLocalLadder(const media::Toolchain& tc, const std::string& video_root,
                               const std::vector<Kbps>& levels, const LocalLayout& layout = {}) {
  std::vector<Representation> reps;
  for (Kbps kbps : levels) {
    const fs::path init = layout.video_init(video_root, kbps);
    std::error_code ec;
    if (!fs::is_regular_file(init, ec))
      throw AcquisitionError("rep_level " + std::to_string(kbps) + " kbps: init file '" +
                             init.string() + "' does not exist");
    media::StreamInfo info;
    try {
      info = media::ProbeStreams(tc, init.string());
    } catch (const AssemblyError& e) {
      throw AcquisitionError("rep_level " + std::to_string(kbps) + " kbps: " + e.what());
    }
    if (!info.has_video)
      throw AcquisitionError("rep_level " + std::to_string(kbps) + " kbps: no video stream in '" +
                             init.string() + "'");
    reps.push_back({std::to_string(kbps), kbps, info.resolution.width, info.resolution.height,
                    MediaKind::kVideo});
  }
  return Ladder(std::move(reps));
}

}  // namespace dashrestream

#endif  // DASHRESTREAM_ACQUIRE_HPP
