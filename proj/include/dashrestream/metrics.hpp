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

#ifndef DASHRESTREAM_METRICS_HPP
#define DASHRESTREAM_METRICS_HPP

#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dashrestream/errors.hpp"
#include "dashrestream/log_io.hpp"
#include "dashrestream/strings.hpp"

namespace dashrestream {

struct QoSSummary {
  double avg_bitrate_mbps = 0;
  long long switch_count = 0;
  long long stall_count = 0;
  double total_stall_duration_s = 0;

  bool operator==(const QoSSummary&) const = default;
};

/// Session statistics. The bitrate mean is unweighted over segments, a
/// switch is any change of rep level between adjacent records.
inline QoSSummary ComputeQoS(const VideoLog& log) {
  QoSSummary s;
  double kbps_sum = 0;
  double stall_ms = 0;
  const auto& recs = log.records();
  for (std::size_t i = 0; i < recs.size(); ++i) {
    kbps_sum += static_cast<double>(recs[i].rep_level);
    if (i > 0 && recs[i].rep_level != recs[i - 1].rep_level) ++s.switch_count;
    if (recs[i].stall_duration_ms > 0) {
      ++s.stall_count;
      stall_ms += recs[i].stall_duration_ms;
    }
  }
  s.avg_bitrate_mbps = kbps_sum / static_cast<double>(recs.size()) / 1000.0;
  s.total_stall_duration_s = stall_ms / 1000.0;
  return s;
}

struct ImpairmentInputs {
  double temporal = 0;  // I_t
  double visual = 0;    // I_v
};

using InteractionFn = std::function<double(double temporal, double visual)>;

inline double ZeroInteraction(double, double) { return 0.0; }

/// Weights of the linear QoE template
///   score = w_o * qoe_m - (w_t * I_t + w_v * I_v) + f(I_t, I_v).
struct QoEParams {
  double w_o = 1.0;
  double qoe_m = 100.0;
  double w_t = 1.0;
  double w_v = 1.0;
  InteractionFn interaction = &ZeroInteraction;

  void Validate() const {
    for (double w : {w_o, qoe_m, w_t, w_v})
      if (!std::isfinite(w)) throw NumericError("QoE weights must be finite");
    if (!interaction) throw NumericError("QoE interaction term is unset");
  }
};

inline double QoeScore(const QoEParams& params, const ImpairmentInputs& in) {
  params.Validate();
  if (!(in.temporal >= 0) || !(in.visual >= 0))
    throw DomainError("impairment inputs must be non-negative");
  const double score = params.w_o * params.qoe_m -
                       (params.w_t * in.temporal + params.w_v * in.visual) +
                       params.interaction(in.temporal, in.visual);
  if (!std::isfinite(score)) throw NumericError("QoE score is not finite");
  return score;
}

/// Maps QoS statistics onto impairment factors. The defaults
/// (I_t = stall seconds + stall count, I_v = switch count) are placeholders
/// for study designers and carry no normative weight.
struct ImpairmentMapping {
  double per_stall_second = 1.0;
  double per_stall = 1.0;
  double per_switch = 1.0;

  ImpairmentInputs operator()(const QoSSummary& q) const {
    return {per_stall_second * q.total_stall_duration_s +
                per_stall * static_cast<double>(q.stall_count),
            per_switch * static_cast<double>(q.switch_count)};
  }
};

/// Impairment impact of a rating on a 100-point scale.
inline double ImpairmentFromScore(double rating) {
  if (!(rating >= 0 && rating <= 100))
    throw DomainError("rating must lie in [0, 100], got " + strings::FormatDouble(rating));
  return 100.0 - rating;
}

struct SessionReport {
  std::string log;
  std::string group;
  QoSSummary qos;
  std::optional<double> qoe;
};

struct GroupSummary {
  std::string group;
  std::size_t sessions = 0;
  double avg_bitrate_mbps = 0;
  double switch_count = 0;
  double stall_count = 0;
  double total_stall_duration_s = 0;
};

/// Per-group means of the four QoS columns, groups in first-seen order.
inline std::vector<GroupSummary> AggregateByGroup(const std::vector<SessionReport>& reports) {
  std::vector<GroupSummary> out;
  std::map<std::string, std::size_t> pos;
  for (const auto& r : reports) {
    auto [it, inserted] = pos.emplace(r.group, out.size());
    if (inserted) out.push_back(GroupSummary{r.group});
    auto& g = out[it->second];
    ++g.sessions;
    g.avg_bitrate_mbps += r.qos.avg_bitrate_mbps;
    g.switch_count += static_cast<double>(r.qos.switch_count);
    g.stall_count += static_cast<double>(r.qos.stall_count);
    g.total_stall_duration_s += r.qos.total_stall_duration_s;
  }
  for (auto& g : out) {
    const double n = static_cast<double>(g.sessions);
    g.avg_bitrate_mbps /= n;
    g.switch_count /= n;
    g.stall_count /= n;
    g.total_stall_duration_s /= n;
  }
  return out;
}

inline nlohmann::json ToJson(const SessionReport& r) {
  nlohmann::json j = {
      {"log", r.log},
      {"group", r.group},
      {"avg_bitrate_mbps", r.qos.avg_bitrate_mbps},
      {"switch_count", r.qos.switch_count},
      {"stall_count", r.qos.stall_count},
      {"total_stall_duration_s", r.qos.total_stall_duration_s},
  };
  if (r.qoe) j["qoe"] = *r.qoe;
  return j;
}

inline nlohmann::json ToJson(const GroupSummary& g) {
  return {
      {"group", g.group},
      {"sessions", g.sessions},
      {"avg_bitrate_mbps", g.avg_bitrate_mbps},
      {"switch_count", g.switch_count},
      {"stall_count", g.stall_count},
      {"total_stall_duration_s", g.total_stall_duration_s},
  };
}

inline std::string FormatReportCsv(const std::vector<SessionReport>& reports) {
  std::string out = "log,group,avg_bitrate_mbps,switch_count,stall_count,total_stall_duration_s,qoe\n";
  for (const auto& r : reports) {
    out += r.log + "," + r.group + "," + strings::FormatDouble(r.qos.avg_bitrate_mbps) + "," +
           std::to_string(r.qos.switch_count) + "," + std::to_string(r.qos.stall_count) + "," +
           strings::FormatDouble(r.qos.total_stall_duration_s) + "," +
           (r.qoe ? strings::FormatDouble(*r.qoe) : std::string()) + "\n";
  }
  return out;
}

inline std::string FormatGroupsCsv(const std::vector<GroupSummary>& groups) {
  std::string out = "group,sessions,avg_bitrate_mbps,switch_count,stall_count,total_stall_duration_s\n";
  for (const auto& g : groups) {
    out += g.group + "," + std::to_string(g.sessions) + "," +
           strings::FormatDouble(g.avg_bitrate_mbps) + "," +
           strings::FormatDouble(g.switch_count) + "," +
           strings::FormatDouble(g.stall_count) + "," +
           strings::FormatDouble(g.total_stall_duration_s) + "\n";
  }
  return out;
}

}  // namespace dashrestream

#endif  // DASHRESTREAM_METRICS_HPP
