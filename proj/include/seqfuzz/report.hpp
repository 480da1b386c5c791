// Copyright 2026 The seqfuzz Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "seqfuzz/coverage.hpp"

namespace seqfuzz {

// One executed test case as logged by a fuzz session.
struct ExecutionLogRow {
  std::string test_id;
  std::string seed_id;
  std::string phase;  // seed or mutant
  double elapsed_s = 0;
  std::string verdict;
  std::vector<int> statuses;
  std::optional<std::size_t> first_500;
  std::string bitmap;      // union over the test case, hex
  std::string bug_bitmap;  // bitmap of the first 500 request, hex
  std::string transcript;  // file name relative to the session directory
};

std::string execution_log_header();
std::string format_log_row(const ExecutionLogRow& r);
ExecutionLogRow parse_log_row(const std::string& line);
std::vector<ExecutionLogRow> read_execution_log(const std::string& path);

struct CoveragePoint {
  double elapsed_s = 0;
  std::size_t cumulative_new_blocks = 0;
  std::size_t tests_executed = 0;
  std::size_t bugs_found = 0;
};

// Blocks beyond the seed phase's union, sampled at every change plus the
// last row.
std::vector<CoveragePoint> coverage_series(const std::vector<ExecutionLogRow>& rows);
std::string format_series_csv(const std::vector<CoveragePoint>& series);

struct BugTableRow {
  std::string bug_id;
  std::string strategy;
  std::string key;  // bug bitmap
  std::string test_id;
  std::size_t request_index = 0;
  std::size_t hits = 0;
  double first_seen_s = 0;
  std::string fault_blocks;  // manifest names of set fault.* blocks
  std::string transcript;
};

// One row per distinct bug bitmap, in order of first occurrence.
std::vector<BugTableRow> bug_table(const std::vector<ExecutionLogRow>& rows, const std::string& strategy,
                                   const std::vector<std::string>& manifest = {});
std::string format_bug_csv(const std::vector<BugTableRow>& rows);

// Reads every executions_<strategy>.tsv in `dir` and writes
// coverage_<strategy>.csv and bugs.csv next to them. Returns the strategies
// found.
std::vector<std::string> write_reports(const std::string& dir);

}  // namespace seqfuzz
