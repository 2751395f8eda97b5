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

// dashrestream: re-create a streamed session as an impaired video.
//
//   dashrestream --path_to_log LOG --path_video DIR ... --final_path OUT
//   dashrestream metrics LOG...          QoS/QoE report only
//   dashrestream simulate --trace T ...  synthesize a session log
//   dashrestream batch --logs_dir D ...  one video per log

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "dashrestream/dashrestream.hpp"

namespace fs = std::filesystem;
using namespace dashrestream;

namespace {

struct SchemaFlags {
  std::string rep = "Rep_Level";
  std::string index = "Seg_#";
  std::string stall = "Stall_Dur";
  std::string separator = "tab";

  void Add(CLI::App& app) {
    app.add_option("--rep_lvl_col", rep, "Column name used in video log for bitrate")
        ->capture_default_str();
    app.add_option("--seg_index_col", index, "Column name used in video log for segment index")
        ->capture_default_str();
    app.add_option("--stall_dur_col", stall, "Column name used in video log for stall duration")
        ->capture_default_str();
    app.add_option("--log_separator", separator, "Separator used in video log")
        ->capture_default_str();
  }
  LogSchema Schema() const {
    LogSchema s;
    s.rep_level_column = rep;
    s.index_column = index;
    s.stall_duration_column = stall;
    s.separator = Separator::Parse(separator);
    return s;
  }
};

struct QoeFlags {
  QoEParams params;
  ImpairmentMapping mapping;

  void Add(CLI::App& app) {
    app.add_option("--w_o", params.w_o, "Weight of the maximum QoE term")->capture_default_str();
    app.add_option("--qoe_m", params.qoe_m, "Maximum QoE")->capture_default_str();
    app.add_option("--w_t", params.w_t, "Weight of the stalling impairment")->capture_default_str();
    app.add_option("--w_v", params.w_v, "Weight of the quality-variation impairment")
        ->capture_default_str();
  }
};

std::vector<std::string> ExpandLogs(const std::vector<std::string>& inputs) {
  std::vector<std::string> out;
  for (const auto& in : inputs) {
    if (fs::is_directory(in)) {
      std::vector<std::string> found;
      for (const auto& e : fs::recursive_directory_iterator(in))
        if (e.is_regular_file()) found.push_back(e.path().string());
      std::sort(found.begin(), found.end());
      out.insert(out.end(), found.begin(), found.end());
    } else {
      out.push_back(in);
    }
  }
  return out;
}

void WriteOut(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw Error(Stage::kMetrics, "cannot write '" + path + "'");
  out << text;
}

int RunMetrics(const std::vector<std::string>& inputs, const SchemaFlags& schema,
               const QoeFlags& qoe, const std::string& format, const std::string& out,
               bool groups) {
  const LogSchema s = schema.Schema();
  std::vector<SessionReport> reports;
  for (const auto& path : ExpandLogs(inputs)) {
    SessionReport r;
    r.log = path;
    r.group = fs::path(path).parent_path().filename().string();
    r.qos = ComputeQoS(LoadLog(path, s));
    r.qoe = QoeScore(qoe.params, qoe.mapping(r.qos));
    reports.push_back(std::move(r));
  }
  if (reports.empty()) throw Error(Stage::kMetrics, "no video logs given");
  if (format == "json") {
    nlohmann::json j;
    j["sessions"] = nlohmann::json::array();
    for (const auto& r : reports) j["sessions"].push_back(ToJson(r));
    if (groups) {
      j["groups"] = nlohmann::json::array();
      for (const auto& g : AggregateByGroup(reports)) j["groups"].push_back(ToJson(g));
    }
    WriteOut(out, j.dump(2) + "\n");
  } else {
    WriteOut(out, groups ? FormatGroupsCsv(AggregateByGroup(reports)) : FormatReportCsv(reports));
  }
  return 0;
}

int RunSimulate(const std::string& trace_path, const std::string& policy_name,
                const std::string& mpd, const SimulationConfig& sim, const SchemaFlags& schema,
                const std::string& out) {
  const auto trace = LoadTrace(trace_path);
  const Ladder ladder = mpd.empty() ? DatasetLadder() : LoadManifest(mpd).ladder;
  AbrPolicy policy = policy_name == "buffer" ? BufferPolicy() : ThroughputPolicy();
  const auto log = SimulateSession(trace, ladder, policy, sim);
  std::string text;
  try {
    text = FormatLog(log, schema.Schema());
  } catch (const Error& e) {
    throw SimulationError(e.what());
  }
  WriteOut(out, text);
  return 0;
}

int RunBatch(const RunConfig& base, const std::string& logs_dir, const std::string& out_dir,
             const RunOptions& opts) {
  const auto logs = ExpandLogs({logs_dir});
  if (logs.empty()) throw ConfigError("logs_dir", "no video logs in '" + logs_dir + "'");
  int status = 0;
  for (const auto& path : logs) {
    RunConfig cfg = base;
    const auto stem = fs::path(path).stem().string();
    cfg.path_to_log = path;
    cfg.final_path = (fs::path(out_dir) / (stem + ".mkv")).string();
    cfg.dest_video = (fs::path(base.dest_video) / stem).string();
    try {
      auto r = Run(cfg, opts);
      std::cout << r.output_path << "\n";
    } catch (const Error& e) {
      std::cerr << "dashrestream: " << path << ": " << StageName(e.stage()) << " error: " << e.what()
                << "\n";
      if (status == 0) status = e.exit_code();
    }
  }
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app("Re-create a streamed (DASH) session as one impaired video", "dashrestream");
  app.require_subcommand(0, 1);
  auto run_values = AddRunFlags(app);

  auto* metrics = app.add_subcommand("metrics", "QoS/QoE report for one or more video logs");
  std::vector<std::string> metric_inputs;
  SchemaFlags metric_schema;
  QoeFlags metric_qoe;
  std::string metric_format = "csv", metric_out;
  bool metric_groups = false;
  metrics->add_option("logs", metric_inputs, "Log files or directories")->required();
  metric_schema.Add(*metrics);
  metric_qoe.Add(*metrics);
  metrics->add_option("--format", metric_format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  metrics->add_option("--out", metric_out, "Output file (default: stdout)");
  metrics->add_flag("--groups", metric_groups,
                    "Per-group means (group = parent directory of each log)");

  auto* simulate = app.add_subcommand("simulate", "Synthesize a session log from a bandwidth trace");
  std::string sim_trace, sim_policy = "throughput", sim_mpd, sim_out;
  SimulationConfig sim_cfg;
  SchemaFlags sim_schema;
  simulate->add_option("--trace", sim_trace, "Bandwidth trace (seconds, throughput)")->required();
  simulate->add_option("--policy", sim_policy, "throughput or buffer")
      ->check(CLI::IsMember({"throughput", "buffer"}))
      ->capture_default_str();
  simulate->add_option("--mpd_path", sim_mpd, "Ladder from this manifest (default: dataset ladder)");
  simulate->add_option("--segment_ms", sim_cfg.segment_duration_ms)->capture_default_str();
  simulate->add_option("--session_ms", sim_cfg.session_length_ms)->capture_default_str();
  simulate->add_option("--buffer_ms", sim_cfg.buffer_capacity_ms)->capture_default_str();
  simulate->add_option("--out", sim_out, "Output log (default: stdout)");
  sim_schema.Add(*simulate);

  auto* batch = app.add_subcommand("batch", "One video per log in a directory");
  std::string batch_logs, batch_out;
  batch->add_option("--logs_dir", batch_logs, "Directory of video logs")->required();
  batch->add_option("--out_dir", batch_out, "Directory for the final videos")->required();
  auto batch_values = AddRunFlags(*batch);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(Stage::kUsage);
  }

  RunOptions opts;
  opts.progress = [](const std::string& stage) { std::cerr << "[" << stage << "]\n"; };
  opts.assembly.warn = [](const std::string& w) { std::cerr << "warning: " << w << "\n"; };
  try {
    if (metrics->parsed())
      return RunMetrics(metric_inputs, metric_schema, metric_qoe, metric_format, metric_out,
                        metric_groups);
    if (simulate->parsed())
      return RunSimulate(sim_trace, sim_policy, sim_mpd, sim_cfg, sim_schema, sim_out);
    if (batch->parsed())
      return RunBatch(ConfigFromFlags(*batch, *batch_values, false), batch_logs, batch_out, opts);

    const RunConfig cfg = ConfigFromFlags(app, *run_values);
    const auto result = Run(cfg, opts);
    std::cout << result.output_path << "\n" << result.report_path << "\n";
    return 0;
  } catch (const Error& e) {
    std::cerr << "dashrestream: " << StageName(e.stage()) << " error: " << e.what() << "\n";
    if (const auto* a = dynamic_cast<const AssemblyError*>(&e); a && !a->diagnostics().empty())
      std::cerr << a->diagnostics() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "dashrestream: " << e.what() << "\n";
    return 1;
  }
}
