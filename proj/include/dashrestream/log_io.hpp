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

// Reader/writer for HAS client video logs: one header row, one
// delimiter-separated row per downloaded segment. Columns are located by
// name; the three semantic columns (segment index, representation bitrate,
// stall duration) are configurable, the remaining player columns use their
// conventional names and are optional.

#ifndef DASHRESTREAM_LOG_IO_HPP
#define DASHRESTREAM_LOG_IO_HPP

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dashrestream/errors.hpp"
#include "dashrestream/strings.hpp"

namespace dashrestream {

using SegmentIndex = long long;
using Kbps = long long;

struct SegmentRecord {
  SegmentIndex index = 0;
  Kbps rep_level = 0;
  double stall_duration_ms = 0;

  std::optional<double> arrival_time_ms;
  std::optional<double> delivery_time_ms;
  std::optional<double> delivery_rate_kbps;
  std::optional<double> actual_rate_kbps;
  std::optional<long long> byte_size;
  std::optional<double> buffer_level_ms;

  bool operator==(const SegmentRecord&) const = default;
};

struct StallEvent {
  SegmentIndex at_segment = 0;
  double duration_ms = 0;

  bool operator==(const StallEvent&) const = default;
};

class Separator {
 public:
  enum class Kind { kTab, kComma, kSemicolon, kCustom };

  static Separator Tab() { return Separator(Kind::kTab, '\t'); }
  static Separator Comma() { return Separator(Kind::kComma, ','); }
  static Separator Semicolon() { return Separator(Kind::kSemicolon, ';'); }
  static Separator Custom(char c) {
    switch (c) {
      case '\t': return Tab();
      case ',': return Comma();
      case ';': return Semicolon();
      default: return Separator(Kind::kCustom, c);
    }
  }

  /// Accepts "tab", "comma", "csv", "semicolon", "tsv" or a single character.
  static Separator Parse(std::string_view token) {
    std::string t = strings::ToLower(strings::Trim(token));
    if (t == "tab" || t == "tsv" || t == "\\t") return Tab();
    if (t == "comma" || t == "csv") return Comma();
    if (t == "semicolon") return Semicolon();
    if (token.size() == 1) return Custom(token.front());
    throw UsageError(std::string(token),
                     "invalid log separator '" + std::string(token) +
                         "' (expected tab, comma, semicolon or one character)");
  }

  Kind kind() const { return kind_; }
  char character() const { return ch_; }

  std::string name() const {
    switch (kind_) {
      case Kind::kTab: return "tab";
      case Kind::kComma: return "comma";
      case Kind::kSemicolon: return "semicolon";
      case Kind::kCustom: return std::string(1, ch_);
    }
    return {};
  }

  bool operator==(const Separator&) const = default;

 private:
  Separator(Kind kind, char ch) : kind_(kind), ch_(ch) {}
  Kind kind_;
  char ch_;
};

struct LogSchema {
  std::string index_column = "Seg_#";
  std::string rep_level_column = "Rep_Level";
  std::string stall_duration_column = "Stall_Dur";
  Separator separator = Separator::Tab();

  void Validate() const {
    const std::string* names[] = {&index_column, &rep_level_column,
                                  &stall_duration_column};
    for (const auto* n : names) {
      if (n->empty())
        throw SchemaError(*n, "log schema column names must be non-empty");
      if (n->find(separator.character()) != std::string::npos)
        throw SchemaError(*n, "column name '" + *n +
                                  "' contains the log separator");
    }
    if (index_column == rep_level_column ||
        index_column == stall_duration_column ||
        rep_level_column == stall_duration_column)
      throw SchemaError(index_column,
                        "log schema column names must be pairwise distinct");
  }

  bool operator==(const LogSchema&) const = default;
};

// Conventional names of the optional player columns.
namespace columns {
inline constexpr std::string_view kArrivalTime = "Arr_Time";
inline constexpr std::string_view kDeliveryTime = "Del_Time";
inline constexpr std::string_view kDeliveryRate = "Del_Rate";
inline constexpr std::string_view kActualRate = "Act_Rate";
inline constexpr std::string_view kByteSize = "Byte_Size";
inline constexpr std::string_view kBufferLevel = "Buffer_Level";
}  // namespace columns

/// Segment index -> bitrate, in log row order.
class RepLevelMap {
 public:
  using Entry = std::pair<SegmentIndex, Kbps>;

  void insert(SegmentIndex index, Kbps kbps) {
    entries_.emplace_back(index, kbps);
    positions_.emplace(index, entries_.size() - 1);
  }
  bool contains(SegmentIndex index) const { return positions_.count(index); }
  Kbps at(SegmentIndex index) const {
    auto it = positions_.find(index);
    if (it == positions_.end())
      throw StructuralError("segment " + std::to_string(index) +
                            " not present in log");
    return entries_[it->second].second;
  }
  const std::vector<Entry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool operator==(const RepLevelMap& o) const { return entries_ == o.entries_; }

 private:
  std::vector<Entry> entries_;
  std::map<SegmentIndex, std::size_t> positions_;
};

/// One validated streaming session. Immutable once constructed.
class VideoLog {
 public:
  VideoLog(std::vector<SegmentRecord> records, std::string source_path)
      : records_(std::move(records)), source_path_(std::move(source_path)) {
    if (records_.empty())
      throw EmptyLogError("video log '" + source_path_ + "' has no segments");
    for (std::size_t i = 0; i < records_.size(); ++i) {
      const auto& r = records_[i];
      if (r.index <= 0)
        throw StructuralError("segment index must be positive, got " +
                              std::to_string(r.index));
      if (r.rep_level <= 0)
        throw StructuralError("segment " + std::to_string(r.index) +
                              ": rep level must be positive");
      if (!(r.stall_duration_ms >= 0))
        throw StructuralError("segment " + std::to_string(r.index) +
                              ": stall duration must be non-negative");
      if (r.byte_size && *r.byte_size <= 0)
        throw StructuralError("segment " + std::to_string(r.index) +
                              ": byte size must be positive");
      if (i > 0 && r.index <= records_[i - 1].index)
        throw StructuralError(
            "segment indices must be strictly increasing: " +
            std::to_string(records_[i - 1].index) + " followed by " +
            std::to_string(r.index));
    }
  }

  const std::vector<SegmentRecord>& records() const { return records_; }
  const std::string& source_path() const { return source_path_; }
  std::size_t size() const { return records_.size(); }

  RepLevelMap rep_levels() const {
    RepLevelMap map;
    for (const auto& r : records_) map.insert(r.index, r.rep_level);
    return map;
  }

  std::vector<StallEvent> stalls() const {
    std::vector<StallEvent> out;
    for (const auto& r : records_)
      if (r.stall_duration_ms > 0) out.push_back({r.index, r.stall_duration_ms});
    return out;
  }

  bool operator==(const VideoLog& o) const {
    return records_ == o.records_ && source_path_ == o.source_path_;
  }

 private:
  std::vector<SegmentRecord> records_;
  std::string source_path_;
};

namespace detail {

struct ParsedRow {
  std::size_t line = 0;
  SegmentRecord record;
};

inline std::optional<std::size_t> FindColumn(
    const std::vector<std::string>& header, std::string_view name,
    bool case_insensitive) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
    if (case_insensitive && strings::ToLower(header[i]) == strings::ToLower(name))
      return i;
  }
  return std::nullopt;
}

inline std::vector<ParsedRow> ParseRows(std::string_view text,
                                        const LogSchema& schema,
                                        const std::string& source) {
  schema.Validate();
  const char sep = schema.separator.character();

  std::vector<std::pair<std::size_t, std::string_view>> lines;
  {
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
      auto end = text.find('\n', start);
      if (end == std::string_view::npos) end = text.size();
      ++line_no;
      std::string_view line = text.substr(start, end - start);
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      if (!strings::Trim(line).empty()) lines.emplace_back(line_no, line);
      start = end + 1;
    }
  }
  if (lines.empty())
    throw EmptyLogError("video log '" + source + "' is empty");

  std::vector<std::string> header;
  for (auto cell : strings::Split(lines.front().second, sep))
    header.emplace_back(strings::Trim(cell));

  auto require = [&](const std::string& name) {
    auto col = FindColumn(header, name, false);
    if (!col)
      throw SchemaError(name, "video log '" + source +
                                  "' has no column named '" + name + "'");
    return *col;
  };
  const std::size_t index_col = require(schema.index_column);
  const std::size_t rep_col = require(schema.rep_level_column);
  const std::size_t stall_col = require(schema.stall_duration_column);

  auto optional_col = [&](std::string_view name) -> std::optional<std::size_t> {
    // Semantic columns may reuse a conventional name; never read them twice.
    auto col = FindColumn(header, name, true);
    if (col && (*col == index_col || *col == rep_col || *col == stall_col))
      return std::nullopt;
    return col;
  };
  const auto arr_col = optional_col(columns::kArrivalTime);
  const auto del_col = optional_col(columns::kDeliveryTime);
  const auto del_rate_col = optional_col(columns::kDeliveryRate);
  const auto act_rate_col = optional_col(columns::kActualRate);
  const auto bytes_col = optional_col(columns::kByteSize);
  const auto buffer_col = optional_col(columns::kBufferLevel);

  std::vector<ParsedRow> rows;
  rows.reserve(lines.size() - 1);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto [line_no, line] = lines[i];
    auto cells = strings::Split(line, sep);
    auto cell = [&](std::size_t col, std::string_view name) {
      if (col >= cells.size())
        throw RowError(line_no, "missing cell for column '" +
                                    std::string(name) + "'");
      return strings::Trim(cells[col]);
    };
    auto bad = [&](std::string_view name, std::string_view value) {
      return RowError(line_no, "cannot parse '" + std::string(value) +
                                   "' in column '" + std::string(name) + "'");
    };

    ParsedRow row;
    row.line = line_no;
    SegmentRecord& r = row.record;

    auto idx_text = cell(index_col, schema.index_column);
    auto idx = strings::ParseIntegral(idx_text);
    if (!idx) throw bad(schema.index_column, idx_text);
    if (*idx <= 0)
      throw RowError(line_no, "segment index must be positive, got " +
                                  std::string(idx_text));
    r.index = *idx;

    auto rep_text = cell(rep_col, schema.rep_level_column);
    auto rep = strings::ParseDouble(rep_text);
    if (!rep) throw bad(schema.rep_level_column, rep_text);
    r.rep_level = static_cast<Kbps>(std::llround(*rep));
    if (r.rep_level <= 0)
      throw RowError(line_no, "rep level must be positive, got " +
                                  std::string(rep_text));

    auto stall_text = cell(stall_col, schema.stall_duration_column);
    auto stall = strings::ParseDouble(stall_text);
    if (!stall) throw bad(schema.stall_duration_column, stall_text);
    if (*stall < 0)
      throw RowError(line_no, "stall duration must be non-negative, got " +
                                  std::string(stall_text));
    r.stall_duration_ms = *stall == 0 ? 0.0 : *stall;

    auto opt_double = [&](const std::optional<std::size_t>& col,
                          std::string_view name) -> std::optional<double> {
      if (!col || *col >= cells.size()) return std::nullopt;
      auto text = strings::Trim(cells[*col]);
      if (text.empty()) return std::nullopt;
      auto v = strings::ParseDouble(text);
      if (!v) throw bad(name, text);
      return v;
    };
    r.arrival_time_ms = opt_double(arr_col, columns::kArrivalTime);
    r.delivery_time_ms = opt_double(del_col, columns::kDeliveryTime);
    r.delivery_rate_kbps = opt_double(del_rate_col, columns::kDeliveryRate);
    r.actual_rate_kbps = opt_double(act_rate_col, columns::kActualRate);
    r.buffer_level_ms = opt_double(buffer_col, columns::kBufferLevel);
    if (bytes_col && *bytes_col < cells.size()) {
      auto text = strings::Trim(cells[*bytes_col]);
      if (!text.empty()) {
        auto v = strings::ParseIntegral(text);
        if (!v) throw bad(columns::kByteSize, text);
        if (*v <= 0)
          throw RowError(line_no, "byte size must be positive, got " +
                                      std::string(text));
        r.byte_size = v;
      }
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty())
    throw EmptyLogError("video log '" + source + "' has a header but no rows");
  return rows;
}

inline std::string ReadLogFile(const std::string& path) {
  auto text = strings::ReadFile(path);
  if (!text) throw Error(Stage::kLog, "cannot read video log '" + path + "'");
  return *text;
}

}  // namespace detail

inline RepLevelMap ParseRepLevels(std::string_view text, const LogSchema& schema,
                                  const std::string& source = "<memory>") {
  RepLevelMap map;
  for (const auto& row : detail::ParseRows(text, schema, source)) {
    if (map.contains(row.record.index))
      throw RowError(row.line, "duplicate segment index " +
                                   std::to_string(row.record.index));
    map.insert(row.record.index, row.record.rep_level);
  }
  return map;
}

inline std::vector<StallEvent> ParseStalls(std::string_view text,
                                           const LogSchema& schema,
                                           const std::string& source = "<memory>") {
  std::vector<StallEvent> out;
  for (const auto& row : detail::ParseRows(text, schema, source))
    if (row.record.stall_duration_ms > 0)
      out.push_back({row.record.index, row.record.stall_duration_ms});
  return out;
}

inline VideoLog ParseLog(std::string_view text, const LogSchema& schema,
                         const std::string& source = "<memory>") {
  auto rows = detail::ParseRows(text, schema, source);
  std::vector<SegmentRecord> records;
  records.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i > 0 && rows[i].record.index <= rows[i - 1].record.index)
      throw StructuralError(
          "line " + std::to_string(rows[i].line) +
          ": segment indices must be strictly increasing (" +
          std::to_string(rows[i - 1].record.index) + " then " +
          std::to_string(rows[i].record.index) + ")");
    records.push_back(rows[i].record);
  }
  return VideoLog(std::move(records), source);
}

inline RepLevelMap ReadRepLevels(const std::string& path, const LogSchema& schema) {
  return ParseRepLevels(detail::ReadLogFile(path), schema, path);
}

inline std::vector<StallEvent> ReadStalls(const std::string& path,
                                          const LogSchema& schema) {
  return ParseStalls(detail::ReadLogFile(path), schema, path);
}

inline VideoLog LoadLog(const std::string& path, const LogSchema& schema) {
  return ParseLog(detail::ReadLogFile(path), schema, path);
}

/// Renders `log` in the column layout of a standard player log, using the
/// schema's names for the semantic columns. Optional columns are written
/// when at least one record carries them.
inline std::string FormatLog(const VideoLog& log, const LogSchema& schema) {
  schema.Validate();
  const auto& recs = log.records();
  auto any = [&](auto member) {
    for (const auto& r : recs)
      if ((r.*member).has_value()) return true;
    return false;
  };
  const bool arr = any(&SegmentRecord::arrival_time_ms);
  const bool del = any(&SegmentRecord::delivery_time_ms);
  const bool del_rate = any(&SegmentRecord::delivery_rate_kbps);
  const bool act_rate = any(&SegmentRecord::actual_rate_kbps);
  const bool bytes = any(&SegmentRecord::byte_size);
  const bool buffer = any(&SegmentRecord::buffer_level_ms);

  const char sep = schema.separator.character();
  std::string out;
  auto field = [&](std::string_view v, bool first = false) {
    if (!first) out += sep;
    out += v;
  };
  auto opt = [&](const std::optional<double>& v) {
    field(v ? strings::FormatDouble(*v) : std::string());
  };

  field(schema.index_column, true);
  if (arr) field(columns::kArrivalTime);
  if (del) field(columns::kDeliveryTime);
  field(schema.stall_duration_column);
  field(schema.rep_level_column);
  if (del_rate) field(columns::kDeliveryRate);
  if (act_rate) field(columns::kActualRate);
  if (bytes) field(columns::kByteSize);
  if (buffer) field(columns::kBufferLevel);
  out += '\n';

  for (const auto& r : recs) {
    field(std::to_string(r.index), true);
    if (arr) opt(r.arrival_time_ms);
    if (del) opt(r.delivery_time_ms);
    field(strings::FormatDouble(r.stall_duration_ms));
    field(std::to_string(r.rep_level));
    if (del_rate) opt(r.delivery_rate_kbps);
    if (act_rate) opt(r.actual_rate_kbps);
    if (bytes) field(r.byte_size ? std::to_string(*r.byte_size) : std::string());
    if (buffer) opt(r.buffer_level_ms);
    out += '\n';
  }
  return out;
}

}  // namespace dashrestream

#endif  // DASHRESTREAM_LOG_IO_HPP
