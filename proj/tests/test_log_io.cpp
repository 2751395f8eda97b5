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

#include "dashrestream/log_io.hpp"

#include <gtest/gtest.h>

#include <random>
#include <string>

#include "support/temp_dir.hpp"

namespace dashrestream {
namespace {

LogSchema TabSchema() { return LogSchema{}; }

// All nine player columns, as written by a goDASH-style client.
constexpr char kFullLog[] =
    "Seg_#\tArr_Time\tDel_Time\tStall_Dur\tRep_Level\tDel_Rate\tAct_Rate\tByte_Size\tBuffer_Level\n"
    "1\t1200\t1200\t1200\t235\t783\t229\t117500\t4000\n"
    "2\t2100\t900\t0\t375\t1666\t369\t187500\t7100\n"
    "3\t5100\t3000\t0\t560\t746\t552\t280000\t8100\n";

TEST(ReadRepLevelsTest, ThreeRowFixture) {
  auto map = ParseRepLevels("Seg_#\tRep_Level\tStall_Dur\n1\t235\t0\n2\t375\t0\n3\t375\t0\n",
                            TabSchema());
  ASSERT_EQ(map.size(), 3u);
  EXPECT_EQ(map.entries()[0], (RepLevelMap::Entry{1, 235}));
  EXPECT_EQ(map.entries()[1], (RepLevelMap::Entry{2, 375}));
  EXPECT_EQ(map.entries()[2], (RepLevelMap::Entry{3, 375}));
  EXPECT_EQ(map.at(2), 375);
}

TEST(ReadRepLevelsTest, AllPlayerColumnsParseToIndexAndBitrate) {
  auto map = ParseRepLevels(kFullLog, TabSchema());
  ASSERT_EQ(map.size(), 3u);
  EXPECT_EQ(map.at(1), 235);
  EXPECT_EQ(map.at(3), 560);

  auto log = ParseLog(kFullLog, TabSchema());
  const auto& r = log.records()[0];
  EXPECT_EQ(r.arrival_time_ms, 1200.0);
  EXPECT_EQ(r.delivery_time_ms, 1200.0);
  EXPECT_EQ(r.delivery_rate_kbps, 783.0);
  EXPECT_EQ(r.actual_rate_kbps, 229.0);
  EXPECT_EQ(r.byte_size, 117500);
  EXPECT_EQ(r.buffer_level_ms, 4000.0);
}

TEST(ReadRepLevelsTest, MissingColumnNamesTheColumn) {
  LogSchema schema;
  schema.rep_level_column = "Bitrate";
  try {
    ParseRepLevels(kFullLog, schema);
    FAIL() << "expected SchemaError";
  } catch (const SchemaError& e) {
    EXPECT_EQ(e.column(), "Bitrate");
    EXPECT_NE(std::string(e.what()).find("Bitrate"), std::string::npos);
  }
}

TEST(ReadRepLevelsTest, UnparseableCellReportsLine) {
  try {
    ParseRepLevels("Seg_#\tRep_Level\tStall_Dur\n1\t235\t0\n2\tfast\t0\n", TabSchema());
    FAIL() << "expected RowError";
  } catch (const RowError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(ReadRepLevelsTest, EmptyFile) {
  EXPECT_THROW(ParseRepLevels("", TabSchema()), EmptyLogError);
  EXPECT_THROW(ParseRepLevels("\n\n", TabSchema()), EmptyLogError);
  EXPECT_THROW(ParseRepLevels("Seg_#\tRep_Level\tStall_Dur\n", TabSchema()),
               EmptyLogError);
}

TEST(ReadStallsTest, FiltersPositiveStalls) {
  auto stalls = ParseStalls(
      "Seg_#\tRep_Level\tStall_Dur\n1\t235\t0\n2\t235\t0\n3\t235\t2000\n4\t235\t0\n5\t235\t500\n",
      TabSchema());
  ASSERT_EQ(stalls.size(), 2u);
  EXPECT_EQ(stalls[0], (StallEvent{3, 2000}));
  EXPECT_EQ(stalls[1], (StallEvent{5, 500}));
}

TEST(ReadStallsTest, AllZero) {
  EXPECT_TRUE(ParseStalls("Seg_#\tRep_Level\tStall_Dur\n1\t235\t0\n2\t235\t0.0\n",
                          TabSchema())
                  .empty());
}

TEST(ReadStallsTest, NegativeStallIsRowError) {
  EXPECT_THROW(ParseStalls("Seg_#\tRep_Level\tStall_Dur\n1\t235\t-5\n", TabSchema()),
               RowError);
}

TEST(LoadLogTest, ThreeRows) {
  auto log = ParseLog(kFullLog, TabSchema(), "fixture");
  EXPECT_EQ(log.size(), 3u);
  EXPECT_EQ(log.source_path(), "fixture");
}

TEST(LoadLogTest, DuplicateIndexIsStructuralError) {
  EXPECT_THROW(ParseLog("Seg_#\tRep_Level\tStall_Dur\n1\t235\t0\n2\t235\t0\n2\t235\t0\n",
                        TabSchema()),
               StructuralError);
  EXPECT_THROW(ParseLog("Seg_#\tRep_Level\tStall_Dur\n2\t235\t0\n1\t235\t0\n",
                        TabSchema()),
               StructuralError);
}

TEST(LoadLogTest, TabAndCommaFixturesBothLoad) {
  LogSchema comma;
  comma.separator = Separator::Comma();
  auto a = ParseLog("Seg_#\tRep_Level\tStall_Dur\n1\t235\t0\n2\t375\t100\n", TabSchema(), "x");
  auto b = ParseLog("Seg_#,Rep_Level,Stall_Dur\n1,235,0\n2,375,100\n", comma, "x");
  EXPECT_EQ(a, b);
}

TEST(LoadLogTest, ColumnsLocatedByNameAndExtrasIgnored) {
  auto log = ParseLog(
      "Extra\tStall_Dur\tRep_Level\tSeg_#\tPlayer\n"
      "x\t 0 \t 235 \t1\tfoo\n"
      "y\t250\t375\t2\tbar\n",
      TabSchema());
  ASSERT_EQ(log.size(), 2u);
  EXPECT_EQ(log.records()[1].rep_level, 375);
  EXPECT_EQ(log.records()[1].stall_duration_ms, 250.0);
}

TEST(LoadLogTest, WindowsLineEndings) {
  auto log = ParseLog("Seg_#\tRep_Level\tStall_Dur\r\n1\t235\t0\r\n", TabSchema());
  EXPECT_EQ(log.records()[0].rep_level, 235);
}

TEST(LoadLogTest, ConfigurableColumnNames) {
  LogSchema schema;
  schema.index_column = "Chunk_Index";
  auto log = ParseLog("Chunk_Index\tRep_Level\tStall_Dur\n7\t235\t0\n", schema);
  EXPECT_EQ(log.records()[0].index, 7);
}

TEST(LoadLogTest, ReadsFromDisk) {
  test::TempDir dir;
  auto path = dir.Write("video_log.log", kFullLog);
  EXPECT_EQ(LoadLog(path, TabSchema()).size(), 3u);
  EXPECT_EQ(ReadRepLevels(path, TabSchema()).size(), 3u);
  EXPECT_TRUE(ReadStalls(path, TabSchema()).size() == 1u);
  EXPECT_THROW(LoadLog(dir.path() + "/missing.log", TabSchema()), Error);
}

TEST(LogSchemaTest, ColumnsMustBeDistinct) {
  LogSchema schema;
  schema.stall_duration_column = schema.rep_level_column;
  EXPECT_THROW(schema.Validate(), SchemaError);
}

TEST(SeparatorTest, Tokens) {
  EXPECT_EQ(Separator::Parse("tab"), Separator::Tab());
  EXPECT_EQ(Separator::Parse("csv"), Separator::Comma());
  EXPECT_EQ(Separator::Parse(";"), Separator::Semicolon());
  EXPECT_EQ(Separator::Parse("|").character(), '|');
  EXPECT_THROW(Separator::Parse("pipes"), UsageError);
}

// Random logs with every optional column populated, written and re-read.
VideoLog RandomLog(std::mt19937_64& rng, bool with_optional) {
  std::uniform_int_distribution<int> len(1, 60);
  std::uniform_int_distribution<int> gap(1, 3);
  std::uniform_int_distribution<int> rung(0, 12);
  std::uniform_real_distribution<double> real(0, 10000);
  const auto ladder = {235, 375, 560, 750, 1050, 1750, 2350, 3000, 3850, 4300, 15000, 25000, 40000};
  std::vector<SegmentRecord> recs;
  SegmentIndex idx = 0;
  const int n = len(rng);
  for (int i = 0; i < n; ++i) {
    SegmentRecord r;
    idx += gap(rng);
    r.index = idx;
    r.rep_level = *(ladder.begin() + rung(rng));
    r.stall_duration_ms = rng() % 3 == 0 ? real(rng) : 0.0;
    if (with_optional) {
      r.arrival_time_ms = real(rng);
      r.delivery_time_ms = real(rng);
      r.delivery_rate_kbps = real(rng);
      r.actual_rate_kbps = real(rng);
      r.byte_size = 1 + static_cast<long long>(rng() % 5000000);
      r.buffer_level_ms = real(rng);
    }
    recs.push_back(r);
  }
  return VideoLog(std::move(recs), "random");
}

TEST(LogPropertyTest, RoundTripAcrossSeparators) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    auto log = RandomLog(rng, trial % 2 == 0);
    for (auto sep : {Separator::Tab(), Separator::Comma(), Separator::Semicolon(),
                     Separator::Custom('|')}) {
      LogSchema schema;
      schema.separator = sep;
      EXPECT_EQ(ParseLog(FormatLog(log, schema), schema, "random"), log);
    }
  }
}

TEST(LogPropertyTest, StallsAreProjectionOfRecords) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    auto log = RandomLog(rng, false);
    auto text = FormatLog(log, TabSchema());
    const auto reparsed = ParseLog(text, TabSchema());
    std::vector<StallEvent> expected;
    for (const auto& r : reparsed.records())
      if (r.stall_duration_ms > 0) expected.push_back({r.index, r.stall_duration_ms});
    EXPECT_EQ(ParseStalls(text, TabSchema()), expected);
    EXPECT_EQ(log.stalls(), expected);
  }
}

}  // namespace
}  // namespace dashrestream
