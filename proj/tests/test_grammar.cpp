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
#include <algorithm>
#include <random>
#include <set>

#include "seqfuzz/grammar.hpp"
#include "seqfuzz/parser.hpp"
#include "seqfuzz/util.hpp"

using namespace seqfuzz;

namespace {

std::string fixture(const std::string& name) { return std::string(FIXTURE_DIR) + "/" + name; }

// Counts non-comment value lines under [alphabet ...] headers.
std::size_t count_alphabet_lines(const std::string& text) {
  std::size_t n = 0;
  bool in_alphabet = false;
  for (const auto& line : split(text, '\n')) {
    if (!line.empty() && line.front() == '[') {
      in_alphabet = line.rfind("[alphabet", 0) == 0;
      continue;
    }
    if (in_alphabet && !line.empty() && line.front() != '#') ++n;
  }
  return n;
}

// Random leftmost derivation; expansion stops choosing recursive rules
// once `budget` tokens are spent.
std::vector<RuleId> random_derivation(const Grammar& g, Rng& rng, std::size_t budget) {
  // Nonterminals that derive some terminal string; others are never expanded.
  std::set<std::string> productive;
  for (bool grew = true; grew;) {
    grew = false;
    for (const auto& r : g.rules()) {
      bool ok = std::all_of(r.rhs.begin(), r.rhs.end(), [&](const auto& s) { return productive.count(s) > 0; });
      if (ok && productive.insert(r.lhs).second) grew = true;
    }
  }
  std::vector<RuleId> out;
  std::vector<std::string> stack{g.start_symbol()};
  while (!stack.empty()) {
    auto sym = stack.back();
    stack.pop_back();
    auto ids = g.rules_for(sym);
    std::vector<RuleId> options;
    for (auto id : ids) {
      const auto& rhs = g.rule(id).rhs;
      if (std::all_of(rhs.begin(), rhs.end(), [&](const auto& s) { return productive.count(s) > 0; }))
        options.push_back(id);
    }
    if (out.size() > budget) {
      std::vector<RuleId> shallow;
      for (auto id : options)
        if (g.rule(id).kind != RuleKind::structural || g.rule(id).rhs.back() != sym) shallow.push_back(id);
      if (!shallow.empty()) options = shallow;
    }
    auto id = options[std::uniform_int_distribution<std::size_t>(0, options.size() - 1)(rng)];
    out.push_back(id);
    const auto& rhs = g.rule(id).rhs;
    for (auto it = rhs.rbegin(); it != rhs.rend(); ++it) stack.push_back(*it);
  }
  return out;
}

}  // namespace

TEST_CASE("template-only grammar has structure but no terminal rules") {
  auto g = load_grammar(fixture("template_only.grammar"));
  CHECK(terminal_rules(g).empty());
  CHECK(g.start_symbol() == "sequence");
  CHECK(g.size() > 0);
  CHECK(g.rules_for("string").empty());
  CHECK(check_tail_recursive(g).empty());
}

TEST_CASE("terminal rule count matches the alphabet lines") {
  auto text = read_file(fixture("small_counts.grammar"));
  auto g = Grammar::parse(text);
  auto ids = terminal_rules(g);
  CHECK(ids.size() == count_alphabet_lines(text));
  CHECK(ids.size() == 10);
  for (auto id : ids) CHECK(g.rule(id).kind == RuleKind::terminal);
  CHECK(std::is_sorted(ids.begin(), ids.end()));
}

TEST_CASE("commit example grammar has 66 terminal rules") {
  auto g = load_grammar(fixture("fig1.grammar"));
  CHECK(terminal_rules(g).size() == 66);
  CHECK(g.requests().size() == 3);
}

TEST_CASE("branches grammar declares 8 request types") {
  auto g = load_grammar(fixture("gitlab_branches.grammar"));
  CHECK(g.requests().size() == 8);
}

TEST_CASE("left recursion is reported with the offending rule") {
  auto g = Grammar::parse(read_file(fixture("left_recursive.grammar")), false);
  auto report = check_tail_recursive(g);
  REQUIRE(report.size() == 1);
  CHECK(rule_to_string(g, report[0].rule).find("path -> path + beta1") != std::string::npos);
  CHECK_THROWS_AS(load_grammar(fixture("left_recursive.grammar")), GrammarError);
}

TEST_CASE("mutual mid-position cycle yields two violations") {
  auto g = Grammar::parse(read_file(fixture("mutual_cycle.grammar")), false);
  auto report = check_tail_recursive(g);
  REQUIRE(report.size() == 2);
  CHECK(g.rule(report[0].rule).lhs != g.rule(report[1].rule).lhs);
}

TEST_CASE("parse errors carry line numbers") {
  try {
    Grammar::parse("[rule]\nsequence -> request\nrequest -> @nowhere\n");
    FAIL("expected an error");
  } catch (const GrammarError& e) {
    CHECK(e.line() == 3);
  }
  CHECK_THROWS_AS(Grammar::parse("[rule]\nsequence -> missing\n"), GrammarError);
  CHECK_THROWS_AS(Grammar::parse("[alphabet a]\nx\n[alphabet b]\nx\n[rule]\ns -> @a | @b\n"), GrammarError);
}

TEST_CASE("save/load keeps rule ids") {
  for (auto name : {"fig1.grammar", "fig4.grammar", "small_counts.grammar", "reference.grammar"}) {
    auto g = load_grammar(fixture(name));
    auto h = Grammar::parse(g.serialize());
    REQUIRE(g.size() == h.size());
    for (RuleId id = 0; id < g.size(); ++id) CHECK(g.rule(id) == h.rule(id));
    CHECK(g.hash() == h.hash());
    CHECK(h.serialize() == g.serialize());
  }
}

TEST_CASE("random derivations keep a bounded stack") {
  for (auto name : {"fig1.grammar", "reference.grammar"}) {
    auto g = load_grammar(fixture(name));
    auto bound = derivation_stack_bound(g);
    REQUIRE(bound < 64);
    Rng rng(7);
    for (int trial = 0; trial < 300; ++trial) {
      auto tokens = random_derivation(g, rng, 20 + trial * 3);
      auto rep = replay(tokens, g);
      REQUIRE(rep.ok);
      CHECK(rep.max_stack <= bound);
    }
  }
}

TEST_CASE("rule kinds and dependency roles") {
  auto g = load_grammar(fixture("fig1.grammar"));
  for (const auto& r : g.rules()) {
    if (r.kind == RuleKind::terminal) CHECK(!r.alphabet.empty());
    if (r.kind == RuleKind::structural) CHECK(!r.rhs.empty());
    if (r.kind == RuleKind::epsilon) CHECK((r.rhs.empty() && r.value.empty()));
    bool dep = r.lhs == "producer" || r.lhs == "consumer";
    CHECK((r.role != DependencyRole::none) == dep);
  }
}
