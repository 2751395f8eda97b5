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

// Structured run log: one JSON object per line (stage boundaries, toolchain
// commands, warnings). Safe to call from assembly worker threads.

#ifndef DASHRESTREAM_RUN_LOG_HPP
#define DASHRESTREAM_RUN_LOG_HPP

#include <chrono>
#include <fstream>
#include <mutex>
#include <string>

#include <json.hpp>

#include "dashrestream/media.hpp"
#include "dashrestream/subprocess.hpp"

namespace dashrestream {

class RunLog {
 public:
  RunLog() = default;
  explicit RunLog(const std::string& path) { Open(path); }

  void Open(const std::string& path) {
    std::lock_guard<std::mutex> lock(mu_);
    out_.open(path, std::ios::trunc);
    path_ = path;
  }
  bool is_open() const { return out_.is_open(); }
  const std::string& path() const { return path_; }

  void Write(nlohmann::json record) {
    record["t_ms"] = std::chrono::duration<double, std::milli>(Clock::now() - start_).count();
    std::lock_guard<std::mutex> lock(mu_);
    if (out_.is_open()) out_ << record.dump() << '\n' << std::flush;
  }

  void Stage(const std::string& stage, const std::string& status, double elapsed_ms = 0,
             nlohmann::json detail = nullptr) {
    nlohmann::json r = {{"event", "stage"}, {"stage", stage}, {"status", status}};
    if (elapsed_ms > 0) r["elapsed_ms"] = elapsed_ms;
    if (!detail.is_null()) r["detail"] = std::move(detail);
    Write(std::move(r));
  }

  void Command(const media::CommandRecord& c) {
    Write({{"event", "command"},
           {"argv", process::FormatCommand(c.argv)},
           {"exit_code", c.exit_code},
           {"elapsed_ms", c.elapsed_ms}});
  }

  void Warning(const std::string& message) {
    Write({{"event", "warning"}, {"message", message}});
  }

 private:
  using Clock = std::chrono::steady_clock;
  std::mutex mu_;
  std::ofstream out_;
  std::string path_;
  Clock::time_point start_ = Clock::now();
};

}  // namespace dashrestream

#endif  // DASHRESTREAM_RUN_LOG_HPP
