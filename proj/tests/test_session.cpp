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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <set>

#include "seqfuzz/config.hpp"
#include "seqfuzz/reference_target.hpp"
#include "seqfuzz/session.hpp"
#include "seqfuzz/util.hpp"
#include "test_support.hpp"

using namespace seqfuzz;
using seqfuzz::testing::fixture;
namespace fs = std::filesystem;

namespace {

std::vector<SessionSeed> small_seeds(const Grammar& g) {
  SeedGenOptions o;
  o.max_len = 2;
  std::vector<SeedFile> files;
  for (const auto& s : generate_seeds(g, o).seeds) files.push_back({s.id, format_seed_text(s.requests)});
  std::vector<std::string> skipped;
  auto out = load_session_seeds(files, g, &skipped);
  REQUIRE(skipped.empty());
  return out;
}

struct Live {
  ReferenceServer server;
  TargetConfig cfg;
  Live() {
    server.start();
    cfg.base_url = server.base_url();
    cfg.auth_value = "DRiX47nuEP2AR";
  }
  ~Live() { server.stop(); }
};

std::string temp_dir(const std::string& name) {
  auto d = fs::temp_directory_path() / ("seqfuzz_test_" + name);
  fs::remove_all(d);
  return d.string();
}

// Everything in a row except timing.
std::string untimed(const ExecutionLogRow& r) {
  auto copy = r;
  copy.elapsed_s = 0;
  return format_log_row(copy);
}

const Model& tiny_model(const Grammar& g, const std::vector<SessionSeed>& seeds) {
  static Model m = [&] {
    std::vector<RuleSequence> corpus;
    for (const auto& s : seeds) corpus.push_back(s.x);
    Hyperparams hp;
    hp.embedding_dim = 32;
    hp.hidden_dim = 64;
    hp.batch_size = 8;
    hp.steps = 300;
    hp.learning_rate = 0.003;
    return train(corpus, g, hp);
  }();
  return m;
}

}  // namespace

TEST_CASE("config files") {
  auto c = Config::parse("# comment\n\ntarget.base_url = http://127.0.0.1:9000\nfuzz.budget_s=12.5\n"
                         "fuzz.mutate_dependencies = true\nfuzz.rng_seed=7 # trailing\n");
  CHECK(c.get("target.base_url") == "http://127.0.0.1:9000");
  CHECK(c.get_double("fuzz.budget_s", 0) == 12.5);
  CHECK(c.get_bool("fuzz.mutate_dependencies", false));
  CHECK(c.get_int("fuzz.rng_seed", 0) == 7);
  CHECK(c.get_or("fuzz.strategy", "learned") == "learned");
  CHECK_FALSE(c.get("model.checkpoint"));
  CHECK(Config::known_keys().size() == 11);
  CHECK_THROWS_AS(Config::parse("fuzz.bogus = 1\n"), ConfigError);
  CHECK_THROWS_AS(Config::parse("no equals sign\n"), ConfigError);
  CHECK_THROWS_AS(Config::parse("fuzz.budget_s = soon\n").get_double("fuzz.budget_s", 0), ConfigError);
}

TEST_CASE("strategy names") {
  for (auto s : {Strategy::byte, Strategy::tree, Strategy::learned}) CHECK(parse_strategy(strategy_name(s)) == s);
  CHECK_THROWS_AS(parse_strategy("random"), SessionError);
}

TEST_CASE("execution log rows round-trip") {
  ExecutionLogRow r{"tree-000004", "seed_000001", "mutant", 1.25, "bug_500", {201, 500}, 1, "0f01", "0301",
                    "transcripts/tree-000004.txt"};
  auto back = parse_log_row(format_log_row(r));
  CHECK(format_log_row(back) == format_log_row(r));
  CHECK(back.first_500 == 1u);
  ExecutionLogRow empty{"byte-000001", "seed_000001", "seed", 0, "transport_error", {}, {}, "", "", ""};
  CHECK(format_log_row(parse_log_row(format_log_row(empty))) == format_log_row(empty));
  CHECK_THROWS(parse_log_row("a\tb"));
}

TEST_CASE("coverage series counts blocks beyond the seed phase") {
  std::vector<ExecutionLogRow> rows{
      {"t1", "s", "seed", 0.1, "pass", {200}, {}, "03", "", ""},
      {"t2", "s", "mutant", 0.2, "pass", {200}, {}, "01", "", ""},
      {"t3", "s", "mutant", 0.3, "pass", {200}, {}, "0c", "", ""},
      {"t4", "s", "mutant", 0.4, "bug_500", {500}, 0, "1c", "10", ""},
      {"t5", "s", "mutant", 0.5, "bug_500", {500}, 0, "10", "10", ""},
      {"t6", "s", "mutant", 0.6, "pass", {200}, {}, "01", "", ""},
  };
  // Oracle: blocks as integer sets.
  std::set<int> seed_blocks{0, 1}, seen = seed_blocks;
  std::vector<std::size_t> expect_new;
  for (int mask : {0x01, 0x0c, 0x1c, 0x10, 0x01}) {
    for (int k = 0; k < 8; ++k)
      if (mask >> k & 1) seen.insert(k);
    expect_new.push_back(seen.size() - seed_blocks.size());
  }
  auto s = coverage_series(rows);
  REQUIRE(!s.empty());
  CHECK(s.back().tests_executed == 6);
  CHECK(s.back().cumulative_new_blocks == expect_new.back());
  CHECK(s.back().bugs_found == 1);
  for (const auto& p : s) CHECK(p.cumulative_new_blocks == expect_new[std::max<std::size_t>(p.tests_executed, 2) - 2]);
  for (std::size_t i = 1; i < s.size(); ++i) {
    CHECK(s[i].cumulative_new_blocks >= s[i - 1].cumulative_new_blocks);
    CHECK(s[i].tests_executed > s[i - 1].tests_executed);
  }
  CHECK(starts_with(format_series_csv(s), "elapsed_s,cumulative_new_blocks,tests_executed,bugs_found\n"));
}

TEST_CASE("bug table names fault blocks and keeps first occurrences") {
  std::vector<std::string> manifest{"entry", "fault.a", "x", "fault.b"};
  std::vector<ExecutionLogRow> rows{
      {"t1", "s", "mutant", 0.1, "bug_500", {500}, 0, "03", "03", "transcripts/t1.txt"},
      {"t2", "s", "mutant", 0.2, "pass", {200}, {}, "05", "", ""},
      {"t3", "s", "mutant", 0.3, "bug_500", {201, 500}, 1, "0f", "09", "transcripts/t3.txt"},
      {"t4", "s", "mutant", 0.4, "bug_500", {500}, 0, "03", "03", ""},
  };
  auto t = bug_table(rows, "tree", manifest);
  REQUIRE(t.size() == 2);
  CHECK(t[0].bug_id == "tree-bug-1");
  CHECK(t[0].hits == 2);
  CHECK(t[0].fault_blocks == "fault.a");
  CHECK(t[0].transcript == "transcripts/t1.txt");
  CHECK(t[1].test_id == "t3");
  CHECK(t[1].request_index == 1);
  CHECK(t[1].fault_blocks == "fault.b");
  auto csv = format_bug_csv(t);
  CHECK(split(csv, '\n').size() >= 3);
}

TEST_CASE("sessions refuse bad inputs") {
  auto g = load_grammar(fixture("reference.grammar"));
  Live live;
  Executor ex(live.cfg);
  FuzzOptions o;
  CHECK_THROWS_AS(FuzzSession(g, {}, ex, o), SessionError);
  auto seeds = small_seeds(g);
  o.strategy = Strategy::learned;
  CHECK_THROWS_AS(FuzzSession(g, seeds, ex, o, nullptr), SessionError);
  auto other = load_grammar(fixture("fig1.grammar"));
  const auto& m = tiny_model(g, seeds);
  CHECK_THROWS_AS(FuzzSession(other, small_seeds(other), ex, o, &m), SessionError);
}

TEST_CASE("capped sessions are repeatable and their transcripts replay") {
  auto g = load_grammar(fixture("reference.grammar"));
  auto seeds = small_seeds(g);
  Live live;
  Executor ex(live.cfg);
  const auto& model = tiny_model(g, seeds);
  for (auto strategy : {Strategy::byte, Strategy::tree, Strategy::learned}) {
    auto name = strategy_name(strategy);
    CAPTURE(name);
    FuzzOptions o;
    o.strategy = strategy;
    o.max_execs = 400;
    o.budget_s = 600;
    o.rng_seed = 11;
    std::vector<std::vector<std::string>> runs;
    std::string dir;
    for (int rep = 0; rep < 2; ++rep) {
      dir = temp_dir(name + std::to_string(rep));
      FuzzSession s(g, seeds, ex, o, &model);
      auto sum = s.run(dir);
      CHECK(sum.tests == 400);
      if (strategy == Strategy::learned) CHECK(reconstruction_accuracy(model, [&] {
        std::vector<RuleSequence> c;
        for (const auto& x : seeds) c.push_back(x.x);
        return c;
      }()) > 0.9);
      std::vector<std::string> lines;
      for (const auto& r : s.rows()) lines.push_back(untimed(r));
      runs.push_back(lines);
      auto logged = read_execution_log(dir + "/executions_" + name + ".tsv");
      REQUIRE(logged.size() == s.rows().size());
      CHECK(sum.bugs == bug_table(logged, name).size());
    }
    CHECK(runs[0] == runs[1]);

    CHECK(write_reports(dir) == std::vector<std::string>{name});
    CHECK(fs::exists(dir + "/coverage_" + name + ".csv"));
    auto rows = read_execution_log(dir + "/executions_" + name + ".tsv");
    std::vector<std::string> manifest;
    for (const auto& l : split(read_file(dir + "/manifest.txt"), '\n'))
      if (!l.empty()) manifest.push_back(l);
    CHECK(manifest == reference_manifest());
    for (const auto& bug : bug_table(rows, name, manifest)) {
      REQUIRE_FALSE(bug.transcript.empty());
      CHECK(starts_with(bug.fault_blocks, "fault."));
      auto text = read_file(dir + "/" + bug.transcript);
      std::vector<PreparedRequest> again;
      for (auto& m : transcript_messages(text)) again.push_back({m, {}});
      auto r = ex.run(again, {}, false);
      std::vector<int> got;
      for (const auto& q : r.responses) got.push_back(q.status);
      CHECK(got == transcript_statuses(text));
      REQUIRE(r.first_500());
      CHECK(r.responses[*r.first_500()].coverage->to_hex() == bug.key);
    }
  }
}
