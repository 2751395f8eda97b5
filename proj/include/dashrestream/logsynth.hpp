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

// Trace-driven HAS session simulator. A bandwidth trace (piecewise-constant
// throughput, looped when the session outlasts it) is replayed against an
// ABR policy and a playout buffer; every downloaded segment becomes one row
// of a player log.

#ifndef DASHRESTREAM_LOGSYNTH_HPP
#define DASHRESTREAM_LOGSYNTH_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "dashrestream/errors.hpp"
#include "dashrestream/log_io.hpp"
#include "dashrestream/manifest.hpp"
#include "dashrestream/strings.hpp"

namespace dashrestream {

struct TraceSample {
  double time_s = 0;
  double kbps = 0;

  bool operator==(const TraceSample&) const = default;
};

class BandwidthTrace {
 public:
  explicit BandwidthTrace(std::vector<TraceSample> samples) : samples_(std::move(samples)) {
    for (std::size_t i = 0; i < samples_.size(); ++i) {
      if (!std::isfinite(samples_[i].kbps) || samples_[i].kbps < 0)
        throw FormatError("trace throughput must be finite and non-negative (sample " +
                          std::to_string(i + 1) + ")");
      if (i > 0 && !(samples_[i].time_s > samples_[i - 1].time_s))
        throw FormatError("trace timestamps must be strictly increasing (sample " +
                          std::to_string(i + 1) + ")");
    }
  }

  const std::vector<TraceSample>& samples() const { return samples_; }
  bool empty() const { return samples_.empty(); }

  /// Length of one loop of the trace. The last sample lasts as long as the
  /// gap before it (one second for a single-sample trace).
  double period_ms() const {
    if (samples_.size() < 2) return 1000.0;
    const double last_gap = samples_.back().time_s - samples_[samples_.size() - 2].time_s;
    return (samples_.back().time_s + last_gap - samples_.front().time_s) * 1000.0;
  }

  /// Start (relative to the first sample, ms) and throughput of piece i.
  double piece_start_ms(std::size_t i) const {
    return (samples_[i].time_s - samples_.front().time_s) * 1000.0;
  }
  double piece_end_ms(std::size_t i) const {
    return i + 1 < samples_.size() ? piece_start_ms(i + 1) : period_ms();
  }

  /// Bits one loop of the trace delivers (kbps * ms = bits).
  double bits_per_period() const {
    double bits = 0;
    for (std::size_t i = 0; i < samples_.size(); ++i)
      bits += samples_[i].kbps * (piece_end_ms(i) - piece_start_ms(i));
    return bits;
  }

  /// Time (ms) needed to deliver `bits` starting at session time `start_ms`.
  double TimeToDeliver(double start_ms, double bits) const {
    if (samples_.empty()) throw SimulationError("bandwidth trace is empty");
    const double period = period_ms();
    const double per_period = bits_per_period();
    if (!(per_period > 0))
      throw SimulationError("unrecoverable stall: trace delivers no data, segment never completes");

    double t = start_ms;
    double remaining = bits;
    double offset = std::fmod(t, period);
    std::size_t i = PieceAt(offset);
    while (remaining > 0) {
      const double end = piece_end_ms(i);
      const double rate = samples_[i].kbps;
      const double span = end - offset;
      if (rate * span >= remaining) {
        return t + remaining / rate - start_ms;
      }
      remaining -= rate * span;
      t += span;
      offset = end;
      if (++i == samples_.size()) {
        i = 0;
        offset = 0;
        // Skip whole loops, leaving a non-zero remainder so the finish lands
        // inside a piece that actually carries data.
        const double loops = std::ceil(remaining / per_period) - 1;
        if (loops >= 1) {
          remaining -= loops * per_period;
          t += loops * period;
        }
      }
    }
    return t - start_ms;
  }

 private:
  std::size_t PieceAt(double offset_ms) const {
    std::size_t i = 0;
    while (i + 1 < samples_.size() && piece_start_ms(i + 1) <= offset_ms) ++i;
    return i;
  }

  std::vector<TraceSample> samples_;
};

/// Reads a two-column (seconds, throughput) trace. Comma, tab, semicolon
/// and whitespace separators are accepted. An optional header names the
/// throughput unit (bps, kbps or Mbps; kbps when unstated).
inline BandwidthTrace ParseTrace(std::string_view text, const std::string& source = "<memory>") {
  std::vector<TraceSample> samples;
  double scale = 1.0;
  std::size_t line_no = 0;
  bool first_content = true;
  for (auto raw : strings::Split(text, '\n')) {
    ++line_no;
    auto line = strings::Trim(raw);
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string_view> cells;
    std::string normalized(line);
    for (char& c : normalized)
      if (c == ',' || c == ';' || c == '\t') c = ' ';
    for (auto cell : strings::Split(normalized, ' '))
      if (!strings::Trim(cell).empty()) cells.push_back(strings::Trim(cell));
    if (cells.size() < 2)
      throw FormatError(source + ":" + std::to_string(line_no) + ": expected two columns");
    auto t = strings::ParseDouble(cells[0]);
    auto v = strings::ParseDouble(cells[1]);
    if (!t || !v) {
      if (first_content) {
        const std::string unit = strings::ToLower(cells[1]);
        if (unit.find("mbps") != std::string::npos || unit.find("mbit") != std::string::npos)
          scale = 1000.0;
        else if (unit.find("kbps") != std::string::npos || unit.find("kbit") != std::string::npos)
          scale = 1.0;
        else if (unit.find("bps") != std::string::npos || unit.find("bit") != std::string::npos)
          scale = 1.0 / 1000.0;
        first_content = false;
        continue;
      }
      throw FormatError(source + ":" + std::to_string(line_no) + ": cannot parse trace row");
    }
    first_content = false;
    samples.push_back({*t, *v * scale});
  }
  if (samples.empty()) throw FormatError("trace '" + source + "' has no samples");
  try {
    return BandwidthTrace(std::move(samples));
  } catch (const FormatError& e) {
    throw FormatError("trace '" + source + "': " + e.what());
  }
}

inline BandwidthTrace LoadTrace(const std::string& path) {
  auto text = strings::ReadFile(path);
  if (!text) throw FormatError("cannot read trace '" + path + "'");
  return ParseTrace(*text, path);
}

struct PlayerState {
  double buffer_level_ms = 0;
  double playhead_ms = 0;
  double wall_clock_ms = 0;
  SegmentIndex next_segment = 1;
};

/// Chooses the next segment's bitrate from the player state and the
/// delivery-rate history (kbps, oldest first).
class AbrPolicy {
 public:
  using Decide = std::function<Kbps(const PlayerState&, std::span<const double>, const Ladder&)>;

  AbrPolicy(std::string name, Decide decide) : name_(std::move(name)), decide_(std::move(decide)) {}

  const std::string& name() const { return name_; }
  Kbps operator()(const PlayerState& s, std::span<const double> estimates,
                  const Ladder& ladder) const {
    return decide_(s, estimates, ladder);
  }

 private:
  std::string name_;
  Decide decide_;
};

/// Highest rung not above `safety` times the mean of the last `window`
/// delivery rates; the lowest rung before any estimate exists.
inline AbrPolicy ThroughputPolicy(double safety = 0.9, std::size_t window = 3) {
  return AbrPolicy("throughput", [=](const PlayerState&, std::span<const double> est,
                                     const Ladder& ladder) {
    if (est.empty()) return ladder.lowest().bitrate;
    const std::size_t n = std::min(window, est.size());
    const double mean =
        std::accumulate(est.end() - static_cast<std::ptrdiff_t>(n), est.end(), 0.0) /
        static_cast<double>(n);
    const double budget = safety * mean;
    Kbps pick = ladder.lowest().bitrate;
    for (const auto& r : ladder.representations())
      if (static_cast<double>(r.bitrate) <= budget) pick = r.bitrate;
    return pick;
  });
}

/// Buffer-occupancy map: lowest rung below the reservoir, highest above
/// reservoir + cushion, linear over ladder positions in between.
inline AbrPolicy BufferPolicy(double reservoir_ms = 10000, double cushion_ms = 30000) {
  return AbrPolicy("buffer", [=](const PlayerState& s, std::span<const double>,
                                 const Ladder& ladder) {
    const auto& reps = ladder.representations();
    if (s.buffer_level_ms <= reservoir_ms) return reps.front().bitrate;
    if (s.buffer_level_ms >= reservoir_ms + cushion_ms) return reps.back().bitrate;
    const double frac = (s.buffer_level_ms - reservoir_ms) / cushion_ms;
    auto pos = static_cast<std::size_t>(std::floor(frac * static_cast<double>(reps.size() - 1)));
    return reps[std::min(pos, reps.size() - 1)].bitrate;
  });
}

struct SimulationConfig {
  double segment_duration_ms = 4000;
  double session_length_ms = 300000;
  double buffer_capacity_ms = 60000;
};

struct SimulationEvent {
  enum class Kind { kPause, kSegmentComplete };
  Kind kind = Kind::kSegmentComplete;
  SegmentIndex segment = 0;
  double wall_clock_ms = 0;
  double playhead_ms = 0;
  double buffer_level_ms = 0;
  double downloaded_ms = 0;  // media time fetched so far
};

struct SimulationResult {
  VideoLog log;
  std::vector<SimulationEvent> events;
};

inline SimulationResult SimulateSessionDetailed(const BandwidthTrace& trace, const Ladder& ladder,
                                                const AbrPolicy& policy,
                                                const SimulationConfig& cfg) {
  if (trace.empty()) throw SimulationError("bandwidth trace is empty");
  if (ladder.empty()) throw SimulationError("ladder is empty");
  if (!(cfg.segment_duration_ms > 0) || !(cfg.session_length_ms > 0))
    throw SimulationError("segment duration and session length must be positive");
  if (cfg.buffer_capacity_ms < cfg.segment_duration_ms)
    throw SimulationError("buffer capacity must hold at least one segment");

  const auto segments =
      static_cast<SegmentIndex>(std::ceil(cfg.session_length_ms / cfg.segment_duration_ms - 1e-9));
  PlayerState s;
  double downloaded = 0;
  bool started = false;
  std::vector<double> estimates;
  std::vector<SegmentRecord> records;
  std::vector<SimulationEvent> events;

  for (SegmentIndex k = 1; k <= segments; ++k) {
    s.next_segment = k;
    if (s.buffer_level_ms + cfg.segment_duration_ms > cfg.buffer_capacity_ms) {
      const double wait = s.buffer_level_ms + cfg.segment_duration_ms - cfg.buffer_capacity_ms;
      s.buffer_level_ms -= wait;
      s.playhead_ms += wait;
      s.wall_clock_ms += wait;
      events.push_back({SimulationEvent::Kind::kPause, k, s.wall_clock_ms, s.playhead_ms,
                        s.buffer_level_ms, downloaded});
    }

    const Kbps rep = policy(s, estimates, ladder);
    if (!ladder.contains(rep))
      throw PolicyError("policy '" + policy.name() + "' chose off-ladder bitrate " +
                        std::to_string(rep) + " kbps for segment " + std::to_string(k));

    const double bits = static_cast<double>(rep) * cfg.segment_duration_ms;
    const double d = trace.TimeToDeliver(s.wall_clock_ms, bits);

    double stall = 0;
    if (!started) {
      stall = d;  // startup delay is reported as a stall on the first segment
    } else if (s.buffer_level_ms >= d) {
      s.buffer_level_ms -= d;
      s.playhead_ms += d;
    } else {
      stall = d - s.buffer_level_ms;
      s.playhead_ms += s.buffer_level_ms;
      s.buffer_level_ms = 0;
    }
    s.wall_clock_ms += d;
    s.buffer_level_ms += cfg.segment_duration_ms;
    downloaded += cfg.segment_duration_ms;
    started = true;

    SegmentRecord r;
    r.index = k;
    r.rep_level = rep;
    r.stall_duration_ms = stall;
    r.arrival_time_ms = s.wall_clock_ms;
    r.delivery_time_ms = d;
    r.delivery_rate_kbps = bits / d;
    r.actual_rate_kbps = bits / cfg.segment_duration_ms;
    r.byte_size = std::max<long long>(1, std::llround(bits / 8.0));
    r.buffer_level_ms = s.buffer_level_ms;
    records.push_back(r);
    estimates.push_back(bits / d);
    events.push_back({SimulationEvent::Kind::kSegmentComplete, k, s.wall_clock_ms, s.playhead_ms,
                      s.buffer_level_ms, downloaded});
  }
  return {VideoLog(std::move(records), "simulated:" + policy.name()), std::move(events)};
}

inline VideoLog SimulateSession(const BandwidthTrace& trace, const Ladder& ladder,
                                const AbrPolicy& policy, const SimulationConfig& cfg) {
  return SimulateSessionDetailed(trace, ladder, policy, cfg).log;
}

}  // namespace dashrestream

#endif  // DASHRESTREAM_LOGSYNTH_HPP
