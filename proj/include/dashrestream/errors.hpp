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

#ifndef DASHRESTREAM_ERRORS_HPP
#define DASHRESTREAM_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dashrestream {

/// Stage family an error belongs to. Doubles as the process exit code.
enum class Stage : int {
  kUsage = 2,
  kLog = 3,
  kManifest = 4,
  kAcquire = 5,
  kAssembly = 6,
  kMetrics = 7,
  kSimulation = 8,
};

inline const char* StageName(Stage stage) {
  switch (stage) {
    case Stage::kUsage: return "usage";
    case Stage::kLog: return "log";
    case Stage::kManifest: return "manifest";
    case Stage::kAcquire: return "acquire";
    case Stage::kAssembly: return "assembly";
    case Stage::kMetrics: return "metrics";
    case Stage::kSimulation: return "simulate";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Stage stage, const std::string& what)
      : std::runtime_error(what), stage_(stage) {}

  Stage stage() const { return stage_; }
  int exit_code() const { return static_cast<int>(stage_); }

 private:
  Stage stage_;
};

// log-io
class SchemaError : public Error {
 public:
  SchemaError(std::string column, const std::string& what)
      : Error(Stage::kLog, what), column_(std::move(column)) {}
  const std::string& column() const { return column_; }

 private:
  std::string column_;
};

class RowError : public Error {
 public:
  RowError(std::size_t line, const std::string& what)
      : Error(Stage::kLog,
              "line " + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class EmptyLogError : public Error {
 public:
  explicit EmptyLogError(const std::string& what) : Error(Stage::kLog, what) {}
};

class StructuralError : public Error {
 public:
  explicit StructuralError(const std::string& what)
      : Error(Stage::kLog, what) {}
};

// manifest
class ManifestError : public Error {
 public:
  explicit ManifestError(const std::string& what)
      : Error(Stage::kManifest, what) {}
};

class UnsupportedError : public ManifestError {
 public:
  explicit UnsupportedError(const std::string& what)
      : ManifestError("unsupported: " + what) {}
};

class UnknownBitrateError : public ManifestError {
 public:
  UnknownBitrateError(long long kbps, const std::string& what)
      : ManifestError(what), kbps_(kbps) {}
  long long kbps() const { return kbps_; }

 private:
  long long kbps_;
};

// acquire
class AcquisitionError : public Error {
 public:
  explicit AcquisitionError(const std::string& what)
      : Error(Stage::kAcquire, what) {}
};

class IntegrityError : public AcquisitionError {
 public:
  explicit IntegrityError(const std::string& what) : AcquisitionError(what) {}
};

// assembly
class AssemblyError : public Error {
 public:
  explicit AssemblyError(const std::string& what, std::string diagnostics = {})
      : Error(Stage::kAssembly, what), diagnostics_(std::move(diagnostics)) {}
  const std::string& diagnostics() const { return diagnostics_; }

 private:
  std::string diagnostics_;
};

// metrics
class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what)
      : Error(Stage::kMetrics, what) {}
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what)
      : Error(Stage::kMetrics, what) {}
};

// logsynth
class SimulationError : public Error {
 public:
  explicit SimulationError(const std::string& what)
      : Error(Stage::kSimulation, what) {}
};

class PolicyError : public SimulationError {
 public:
  explicit PolicyError(const std::string& what) : SimulationError(what) {}
};

class FormatError : public SimulationError {
 public:
  explicit FormatError(const std::string& what) : SimulationError(what) {}
};

// cli / configuration
class UsageError : public Error {
 public:
  UsageError(std::string token, const std::string& what)
      : Error(Stage::kUsage, what), token_(std::move(token)) {}
  const std::string& token() const { return token_; }

 private:
  std::string token_;
};

class ConfigError : public Error {
 public:
  ConfigError(std::string key, const std::string& what,
              Stage stage = Stage::kUsage)
      : Error(stage, what), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

}  // namespace dashrestream

#endif  // DASHRESTREAM_ERRORS_HPP
