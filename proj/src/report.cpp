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

#include "seqfuzz/report.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <map>

#include "seqfuzz/util.hpp"

namespace seqfuzz {

namespace {

std::string join_ints(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s.empty() ? "-" : s;
}

std::string or_dash(const std::string& s) { return s.empty() ? "-" : s; }
std::string from_dash(const std::string& s) { return s == "-" ? "" : s; }

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

std::string execution_log_header() {
  return "test_id\tseed_id\tphase\telapsed_s\tverdict\tstatuses\tfirst_500\tbitmap\tbug_bitmap\ttranscript";
}

std::string format_log_row(const ExecutionLogRow& r) {
  return r.test_id + '\t' + r.seed_id + '\t' + r.phase + '\t' + fixed(r.elapsed_s, 3) + '\t' + r.verdict + '\t' +
         join_ints(r.statuses) + '\t' + (r.first_500 ? std::to_string(*r.first_500) : "-") + '\t' +
         or_dash(r.bitmap) + '\t' + or_dash(r.bug_bitmap) + '\t' + or_dash(r.transcript);
}

ExecutionLogRow parse_log_row(const std::string& line) {
  auto f = split(line, '\t');
  if (f.size() != 10) throw std::runtime_error("execution log row has " + std::to_string(f.size()) + " fields");
  ExecutionLogRow r;
  r.test_id = f[0];
  r.seed_id = f[1];
  r.phase = f[2];
  r.elapsed_s = std::stod(f[3]);
  r.verdict = f[4];
  if (f[5] != "-")
    for (const auto& s : split(f[5], ',')) r.statuses.push_back(std::stoi(s));
  if (f[6] != "-") r.first_500 = std::stoul(f[6]);
  r.bitmap = from_dash(f[7]);
  r.bug_bitmap = from_dash(f[8]);
  r.transcript = from_dash(f[9]);
  return r;
}

std::vector<ExecutionLogRow> read_execution_log(const std::string& path) {
  std::vector<ExecutionLogRow> rows;
  auto lines = split(read_file(path), '\n');
  for (std::size_t i = 1; i < lines.size(); ++i)
    if (!lines[i].empty()) rows.push_back(parse_log_row(lines[i]));
  return rows;
}

std::vector<CoveragePoint> coverage_series(const std::vector<ExecutionLogRow>& rows) {
  std::vector<CoveragePoint> out;
  CoverageBitmap seeds, all;
  std::map<std::string, bool> bugs;
  CoveragePoint cur;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    bool changed = false;
    if (!r.bitmap.empty()) {
      auto b = CoverageBitmap::from_hex(r.bitmap);
      if (seeds.width() == 0) seeds = all = CoverageBitmap(b.width());
      if (r.phase == "seed") {
        seeds.merge(b);
        all.merge(b);
      } else if (all.merge(b)) {
        cur.cumulative_new_blocks = all.count_new(seeds);
        changed = true;
      }
    }
    if (!r.bug_bitmap.empty() && bugs.emplace(r.bug_bitmap, true).second) {
      cur.bugs_found = bugs.size();
      changed = true;
    }
    cur.tests_executed = i + 1;
    cur.elapsed_s = r.elapsed_s;
    if (changed || i + 1 == rows.size() || out.empty()) out.push_back(cur);
  }
  return out;
}

std::string format_series_csv(const std::vector<CoveragePoint>& series) {
  std::string out = "elapsed_s,cumulative_new_blocks,tests_executed,bugs_found\n";
  for (const auto& p : series)
    out += fixed(p.elapsed_s, 3) + ',' + std::to_string(p.cumulative_new_blocks) + ',' +
           std::to_string(p.tests_executed) + ',' + std::to_string(p.bugs_found) + '\n';
  return out;
}

std::vector<BugTableRow> bug_table(const std::vector<ExecutionLogRow>& rows, const std::string& strategy,
                                   const std::vector<std::string>& manifest) {
  std::vector<BugObservation> obs;
  std::vector<const ExecutionLogRow*> src;
  for (const auto& r : rows) {
    if (r.bug_bitmap.empty()) continue;
    obs.push_back({r.test_id, r.first_500.value_or(0), CoverageBitmap::from_hex(r.bug_bitmap)});
    src.push_back(&r);
  }
  std::vector<BugTableRow> out;
  for (const auto& group : dedup_bugs(obs)) {
    const auto& first = *src[group.members.front()];
    BugTableRow row;
    row.bug_id = strategy + "-bug-" + std::to_string(out.size() + 1);
    row.strategy = strategy;
    row.key = group.key;
    row.test_id = first.test_id;
    row.request_index = first.first_500.value_or(0);
    row.hits = group.members.size();
    row.first_seen_s = first.elapsed_s;
    const auto& bitmap = obs[group.members.front()].bitmap;
    for (std::size_t k = 0; k < manifest.size(); ++k)
      if (bitmap.test(k) && starts_with(manifest[k], "fault."))
        row.fault_blocks += (row.fault_blocks.empty() ? "" : ";") + manifest[k];
    for (auto m : group.members)
      if (!src[m]->transcript.empty()) {
        row.transcript = src[m]->transcript;
        break;
      }
    out.push_back(std::move(row));
  }
  return out;
}

std::string format_bug_csv(const std::vector<BugTableRow>& rows) {
  std::string out = "bug_id,strategy,first_seen_s,test_id,request_index,hits,fault_blocks,bitmap,transcript\n";
  for (const auto& r : rows)
    out += r.bug_id + ',' + r.strategy + ',' + fixed(r.first_seen_s, 3) + ',' + r.test_id + ',' +
           std::to_string(r.request_index) + ',' + std::to_string(r.hits) + ',' + or_dash(r.fault_blocks) + ',' +
           r.key + ',' + or_dash(r.transcript) + '\n';
  return out;
}

std::vector<std::string> write_reports(const std::string& dir) {
  namespace fs = std::filesystem;
  std::vector<std::string> manifest;
  if (fs::exists(dir + "/manifest.txt"))
    for (const auto& line : split(read_file(dir + "/manifest.txt"), '\n'))
      if (!line.empty()) manifest.push_back(line);
  std::vector<std::string> strategies;
  for (const auto& e : fs::directory_iterator(dir)) {
    auto name = e.path().filename().string();
    if (starts_with(name, "executions_") && name.ends_with(".tsv"))
      strategies.push_back(name.substr(11, name.size() - 11 - 4));
  }
  std::sort(strategies.begin(), strategies.end());
  std::vector<BugTableRow> bugs;
  for (const auto& s : strategies) {
    auto rows = read_execution_log(dir + "/executions_" + s + ".tsv");
    write_file(dir + "/coverage_" + s + ".csv", format_series_csv(coverage_series(rows)));
    auto table = bug_table(rows, s, manifest);
    bugs.insert(bugs.end(), table.begin(), table.end());
  }
  write_file(dir + "/bugs.csv", format_bug_csv(bugs));
  return strategies;
}

}  // namespace seqfuzz
