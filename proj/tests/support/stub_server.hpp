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

// Loopback HTTP server over a directory tree that records every request
// path. Individual paths can be made to fail with a fixed status, either
// always or for their first N requests.

#ifndef DASHRESTREAM_TESTS_SUPPORT_STUB_SERVER_HPP
#define DASHRESTREAM_TESTS_SUPPORT_STUB_SERVER_HPP

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>

namespace dashrestream::test {

class StubServer {
 public:
  explicit StubServer(std::filesystem::path root) : root_(std::move(root)) {
    server_.Get(R"(/.*)", [this](const httplib::Request& req, httplib::Response& res) {
      Handle(req, res);
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    if (port_ <= 0) throw std::runtime_error("stub server cannot bind");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~StubServer() {
    server_.stop();
    if (thread_.joinable()) thread_.join();
  }
  StubServer(const StubServer&) = delete;
  StubServer& operator=(const StubServer&) = delete;

  int port() const { return port_; }
  std::string base() const { return "http://127.0.0.1:" + std::to_string(port_) + "/"; }

  /// Answers `status` for `path` (forever when times < 0).
  void Fail(const std::string& path, int status, int times = -1) {
    std::lock_guard<std::mutex> lock(mu_);
    faults_[path] = {status, times};
  }

  std::vector<std::string> requests() const {
    std::lock_guard<std::mutex> lock(mu_);
    return requests_;
  }
  void ClearRequests() {
    std::lock_guard<std::mutex> lock(mu_);
    requests_.clear();
  }
  int max_in_flight() const {
    std::lock_guard<std::mutex> lock(mu_);
    return max_in_flight_;
  }
  /// Artificial per-request latency, to make concurrency observable.
  void set_latency(std::chrono::milliseconds d) { latency_ms_ = d.count(); }

 private:
  struct Fault {
    int status;
    int remaining;
  };

  void Handle(const httplib::Request& req, httplib::Response& res) {
    {
      std::lock_guard<std::mutex> lock(mu_);
      requests_.push_back(req.path);
      max_in_flight_ = std::max(max_in_flight_, ++in_flight_);
      auto it = faults_.find(req.path);
      if (it != faults_.end() && it->second.remaining != 0) {
        if (it->second.remaining > 0) --it->second.remaining;
        res.status = it->second.status;
        --in_flight_;
        return;
      }
    }
    if (latency_ms_ > 0) std::this_thread::sleep_for(std::chrono::milliseconds(latency_ms_.load()));
    const auto file = root_ / req.path.substr(1);
    std::ifstream in(file, std::ios::binary);
    if (req.path.find("..") != std::string::npos || !in) {
      res.status = 404;
    } else {
      std::ostringstream body;
      body << in.rdbuf();
      res.set_content(body.str(), "application/octet-stream");
    }
    std::lock_guard<std::mutex> lock(mu_);
    --in_flight_;
  }

  std::filesystem::path root_;
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  mutable std::mutex mu_;
  std::vector<std::string> requests_;
  std::map<std::string, Fault> faults_;
  int in_flight_ = 0;
  int max_in_flight_ = 0;
  std::atomic<long long> latency_ms_{0};
};

}  // namespace dashrestream::test

#endif  // DASHRESTREAM_TESTS_SUPPORT_STUB_SERVER_HPP
