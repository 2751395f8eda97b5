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

#ifndef DASHRESTREAM_TESTS_SUPPORT_SIM_INVARIANTS_HPP
#define DASHRESTREAM_TESTS_SUPPORT_SIM_INVARIANTS_HPP

#include <cmath>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "dashrestream/logsynth.hpp"
#include "support/oracles.hpp"

namespace dashrestream::test {

using RawTrace = std::vector<std::pair<double, double>>;

/// 2..12 samples, 0.5..6 s apart, 0..8000 kbps with some zero pieces but
/// never an all-zero trace.
inline std::pair<RawTrace, BandwidthTrace> RandomTrace(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> count(2, 12);
  std::uniform_real_distribution<double> gap(0.5, 6.0);
  std::uniform_real_distribution<double> rate(0, 8000);
  std::bernoulli_distribution outage(0.15);
  RawTrace raw;
  std::vector<TraceSample> samples;
  double t = 0;
  const int n = count(rng);
  for (int i = 0; i < n; ++i) {
    double kbps = outage(rng) ? 0.0 : rate(rng);
    if (i == 0 && kbps < 50) kbps = 50;
    raw.emplace_back(t, kbps);
    samples.push_back({t, kbps});
    t += gap(rng);
  }
  return {raw, BandwidthTrace(samples)};
}

/// Returns an empty string when every invariant holds, else one line per
/// violation.
inline std::string CheckSimulationInvariants(const SimulationResult& result, const RawTrace& raw,
                                             const SimulationConfig& cfg) {
  std::ostringstream bad;
  constexpr double kEps = 1e-6;
  const auto& recs = result.log.records();
  const auto expected =
      static_cast<std::size_t>(std::ceil(cfg.session_length_ms / cfg.segment_duration_ms - 1e-9));
  if (recs.size() != expected) bad << "record count " << recs.size() << " != " << expected << "\n";

  double prev_wall = 0, prev_play = 0;
  for (const auto& e : result.events) {
    if (std::fabs(e.buffer_level_ms - (e.downloaded_ms - e.playhead_ms)) > kEps)
      bad << "buffer conservation broken at segment " << e.segment << "\n";
    if (e.buffer_level_ms < -kEps || e.buffer_level_ms > cfg.buffer_capacity_ms + kEps)
      bad << "buffer out of range at segment " << e.segment << "\n";
    if (e.playhead_ms > e.wall_clock_ms + kEps) bad << "playhead ahead of wall clock\n";
    if (e.wall_clock_ms < prev_wall - kEps || e.playhead_ms < prev_play - kEps)
      bad << "clock went backwards at segment " << e.segment << "\n";
    prev_wall = e.wall_clock_ms;
    prev_play = e.playhead_ms;
  }

  // Per segment: stall = wall time elapsed minus media time played, between
  // successive completions (pauses advance both clocks equally).
  const SimulationEvent* last = nullptr;
  std::size_t k = 0;
  for (const auto& e : result.events) {
    if (e.kind != SimulationEvent::Kind::kSegmentComplete) continue;
    const auto& r = recs[k];
    if (last != nullptr) {
      const double want = (e.wall_clock_ms - last->wall_clock_ms) - (e.playhead_ms - last->playhead_ms);
      if (std::fabs(r.stall_duration_ms - want) > kEps)
        bad << "stall accounting broken at segment " << r.index << "\n";
    } else if (std::fabs(r.stall_duration_ms - e.wall_clock_ms) > kEps) {
      bad << "startup delay is not the first stall\n";
    }

    // Byte conservation against an independent integral of the trace.
    const double bits = static_cast<double>(r.rep_level) * cfg.segment_duration_ms;
    const double end = *r.arrival_time_ms;
    const double begin = end - *r.delivery_time_ms;
    const double moved = TraceBitsUpTo(raw, end) - TraceBitsUpTo(raw, begin);
    if (RelErr(moved, bits) > 1e-9) bad << "byte conservation broken at segment " << r.index << "\n";
    if (std::fabs(static_cast<double>(*r.byte_size) * 8 - bits) > 8)
      bad << "byte size mismatch at segment " << r.index << "\n";
    last = &e;
    ++k;
  }
  return bad.str();
}

}  // namespace dashrestream::test

#endif  // DASHRESTREAM_TESTS_SUPPORT_SIM_INVARIANTS_HPP
