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

#include <algorithm>
#include <cmath>
#include <set>

#include "seqfuzz/mutation.hpp"
#include "test_support.hpp"

using namespace seqfuzz;
using seqfuzz::testing::fixture;

namespace {

RuleSequence seed_of(const Grammar& g, const std::string& name) { return parse_test_case(read_file(fixture(name)), g); }

std::size_t leaf_of_rule(const RuleSequence& x, const Grammar& g, std::string_view lhs, std::string_view value) {
  for (std::size_t k = 0; k < x.leaf_count(); ++k) {
    const auto& r = g.rule(x.tokens[x.leaf_index[k]]);
    if (r.lhs == lhs && r.value == value) return k;
  }
  FAIL("leaf not found");
  return 0;
}

const MutationPlan* find_plan(const std::vector<MutationPlan>& plans, std::size_t leaf, RuleId rule,
                              MutationCase c) {
  for (const auto& p : plans)
    if (p.target_leaf == leaf && p.new_rule == rule && p.kase == c) return &p;
  return nullptr;
}

// Two-sequence corpus and a model trained until it reconstructs both.
struct Overfit {
  Grammar g = load_grammar(fixture("reference.grammar"));
  std::vector<RuleSequence> corpus;
  Model m;
  Overfit() {
    for (std::uint64_t s = 21; corpus.size() < 2; ++s) {
      auto x = seqfuzz::testing::random_corpus(g, 1, s, 1, 1)[0];
      if (corpus.empty() || corpus[0].tokens != x.tokens) corpus.push_back(x);
    }
    Hyperparams hp;
    hp.embedding_dim = 32;
    hp.hidden_dim = 64;
    hp.batch_size = 8;
    hp.steps = 300;
    hp.learning_rate = 0.003;
    m = train(corpus, g, hp);
  }
};

const Overfit& overfit() {
  static Overfit o;
  return o;
}

}  // namespace

TEST_CASE("noise scaling follows 2^j d / norm") {
  Embedding d(3);
  d << 1.0f, -2.0f, 0.5f;
  CHECK(scale_noise(d, 1, 2.0) == d);
  CHECK(scale_noise(d, 3, 2.0) == d * 4.0f);
  CHECK(scale_noise(d, 0, 0.0) == d);
}

TEST_CASE("overfit model reconstructs its corpus") {
  const auto& o = overfit();
  REQUIRE(o.corpus[0].tokens != o.corpus[1].tokens);
  CHECK(reconstruction_accuracy(o.m, o.corpus) == 1.0);
}

TEST_CASE("zero noise leaves the seed unchanged") {
  const auto& o = overfit();
  PerturbOptions opts;
  opts.noise = [](int, Eigen::Index dim, Rng&) { return Embedding(Embedding::Zero(dim)); };
  Rng rng(1);
  auto pr = perturb_and_select(o.m, o.corpus[0], 8, rng, opts);
  CHECK_FALSE(pr.differs);
  CHECK(pr.x_min == o.corpus[0].tokens);
  CHECK(pr.scale_exponent == 7);
}

TEST_CASE("selected scale is the first differing scale of an exhaustive sweep") {
  const auto& o = overfit();
  int agree = 0, found = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto& x = o.corpus[trial % 2];
    Rng rng(1000 + trial);
    auto pr = perturb_and_select(o.m, x, 8, rng);

    // Oracle: redraw the same noise and decode every scale.
    Rng replay(1000 + trial);
    std::normal_distribution<double> normal(0.0, 1.0);
    Embedding z = o.m.encode(x);
    std::vector<Embedding> draws;
    for (int j = 0; j < 8; ++j) {
      Embedding d(z.size());
      for (Eigen::Index i = 0; i < d.size(); ++i) d(i) = static_cast<float>(normal(replay));
      draws.push_back(d);
    }
    int first = -1;
    std::vector<RuleId> first_decode;
    for (int j = 0; j < 8; ++j) {
      auto out = o.m.decode(z + draws[j] * static_cast<float>(std::pow(2.0, j) / z.norm()));
      if (out != x.tokens && first < 0) {
        first = j;
        first_decode = out;
      }
    }
    if (first >= 0) {
      ++found;
      agree += pr.differs && pr.scale_exponent == first && pr.x_min == first_decode;
    } else {
      agree += !pr.differs && pr.scale_exponent == 7;
    }
  }
  CHECK(agree == 100);
  CHECK(found > 0);
}

TEST_CASE("more scales never select a smaller exponent") {
  const auto& o = overfit();
  for (int trial = 0; trial < 20; ++trial) {
    Rng a(trial), b(trial);
    auto p8 = perturb_and_select(o.m, o.corpus[0], 8, a);
    auto p12 = perturb_and_select(o.m, o.corpus[0], 12, b);
    if (p8.differs) CHECK(p12.scale_exponent == p8.scale_exponent);
    CHECK(p12.scale_exponent >= p8.scale_exponent);
  }
}

TEST_CASE("perturbation rejects bad arguments") {
  const auto& o = overfit();
  Rng rng(1);
  CHECK_THROWS_AS(perturb_and_select(o.m, o.corpus[0], 0, rng), MutationError);
  auto other = load_grammar(fixture("gitlab_branches.grammar"));
  auto foreign = seqfuzz::testing::random_corpus(other, 1, 2)[0];
  CHECK_THROWS_AS(perturb_and_select(o.m, foreign, 8, rng), ModelError);
}

TEST_CASE("no difference means Case 1 on every eligible leaf") {
  auto g = load_grammar(fixture("fig1.grammar"));
  auto x = seed_of(g, "fig1.seed");
  PerturbResult pr{x.tokens, 7, false};
  Rng rng(3);
  PlanOptions all;
  all.mutate_dependencies = true;
  auto plans = plan_learned_mutations(x, pr, g, rng, all);
  auto unseen = terminal_rules(g).size() - terminals(x, g).size();
  CHECK(plans.size() == 73 * unseen);
  CHECK(std::all_of(plans.begin(), plans.end(), [](const auto& p) { return p.kase == MutationCase::case1; }));

  auto defaults = plan_learned_mutations(x, pr, g, rng);
  CHECK(defaults.size() == mutable_leaves(x, g, false).size() * unseen);
  // Two project-id consumers, one branch producer, one branch consumer.
  CHECK(mutable_leaves(x, g, false).size() == 73 - 4);
}

TEST_CASE("Case 1 never reuses a seed rule; cases partition the leaves") {
  const auto& o = overfit();
  std::size_t checked = 0;
  for (int trial = 0; checked < 1000; ++trial) {
    auto x = o.corpus[trial % 2];
    Rng rng(trial);
    auto pr = perturb_and_select(o.m, x, 8, rng);
    auto plans = plan_learned_mutations(x, pr, o.g, rng, PlanOptions{true, 4});
    auto seen = terminals(x, o.g);
    std::set<std::size_t> c1, c2;
    for (const auto& p : plans) {
      if (p.kase == MutationCase::case1) {
        CHECK_FALSE(std::binary_search(seen.begin(), seen.end(), p.new_rule));
        c1.insert(p.target_leaf);
        ++checked;
      } else {
        c2.insert(p.target_leaf);
        CHECK(std::find(pr.x_min.begin(), pr.x_min.end(), p.new_rule) != pr.x_min.end());
      }
      CHECK(o.g.rule(p.new_rule).kind == RuleKind::terminal);
      for (const auto& n : p.byte_noise) CHECK(n.offset < terminal_text(o.g, p.new_rule, rng).size());
    }
    for (auto k : c1) CHECK(c2.count(k) == 0);
    auto diff = leaf_diff(x, make_sequence(pr.x_min, o.g));
    if (!pr.differs) {
      diff.common.clear();
      diff.different.clear();
      for (std::size_t k = 0; k < x.leaf_count(); ++k) diff.common.push_back(k);
    }
    std::set<std::size_t> expected_c1(diff.common.begin(), diff.common.end());
    if (!plans.empty() && pr.differs) {
      for (auto k : diff.different)
        if (k < x.leaf_count()) CHECK(c1.count(k) == 0);
    }
    CHECK(c1 == expected_c1);
  }
}

TEST_CASE("method and body key from another request definition, polluted") {
  auto g = load_grammar(fixture("gitlab_branches.grammar"));
  auto x = seed_of(g, "fig5.seed");
  Rng rng(5);
  auto plans = plan_learned_mutations(x, PerturbResult{x.tokens, 7, false}, g, rng);
  auto get = *g.find_terminal("static", "developers_can_merge");
  auto method_get = *g.find_terminal("method", "GET");
  auto key_leaf = leaf_of_rule(x, g, "static", "branch");

  REQUIRE(find_plan(plans, 0, method_get, MutationCase::case1));
  REQUIRE(find_plan(plans, key_leaf, get, MutationCase::case1));

  auto method_mutant = apply_plan(x, MutationPlan{0, method_get, MutationCase::case1, {{1, 'K'}}}, g);
  CHECK(render(method_mutant, g).requests[0].method.text == "GKT");
  CHECK(format_seed_text(render(method_mutant, g).wire()).rfind("GKT /api/projects/", 0) == 0);

  auto key_mutant = apply_plan(x, MutationPlan{key_leaf, get, MutationCase::case1, {{4, 0xf1}}}, g);
  CHECK(render(key_mutant, g).requests[0].body_text() ==
        "{\"deve\xf1opers_can_merge\":\"{{producer:branch-name}}\",\"ref\":\"master\"}");
  CHECK(is_well_formed(key_mutant, g));
}

TEST_CASE("differing leaf takes a value from the same seed, polluted") {
  auto g = load_grammar(fixture("fig6.grammar"));
  auto x = seed_of(g, "fig6.seed");
  auto pw_leaf = leaf_of_rule(x, g, "string", "password");
  auto email = *g.find_terminal("string", "spree@ex.com");
  // A decode that differs from the seed only at the password value.
  auto x_min = x.tokens;
  x_min[x.leaf_index[pw_leaf]] = *g.find_terminal("string", "spree123");
  Rng rng(6);
  auto plans = plan_learned_mutations(x, PerturbResult{x_min, 2, true}, g, rng);
  REQUIRE(find_plan(plans, pw_leaf, email, MutationCase::case2));
  auto mutant = apply_plan(x, MutationPlan{pw_leaf, email, MutationCase::case2, {{0, 0xf8}}}, g);
  CHECK(render(mutant, g).requests[0].body_text() == "{\"email\":\"spree@ex.com\",\"password\":\"\xf8pree@ex.com\"}");
}

TEST_CASE("byte mutation flips exactly one byte") {
  Rng rng(1);
  auto one = mutate_bytes(std::string_view("A"), rng);
  CHECK(one.size() == 1);
  CHECK(one != "A");
  CHECK_THROWS_AS(mutate_bytes(std::string_view(""), rng), MutationError);

  std::string line = "GET /projects/1243/repo/branches HTTP/1.1";
  Rng r1(42), r2(42);
  auto a = mutate_bytes(line, r1);
  auto b = mutate_bytes(line, r2);
  CHECK(a == b);
  std::size_t diffs = 0;
  for (std::size_t i = 0; i < line.size(); ++i) diffs += a[i] != line[i];
  CHECK(diffs == 1);
}

TEST_CASE("byte mutation positions are uniform") {
  std::string line = "GET /projects/1243/repo/branches HTTP/1.1";
  std::vector<int> hits(line.size(), 0);
  Rng rng(99);
  const int trials = 10000;
  for (int t = 0; t < trials; ++t) {
    auto out = mutate_bytes(line, rng);
    for (std::size_t i = 0; i < line.size(); ++i)
      if (out[i] != line[i]) ++hits[i];
  }
  double expected = static_cast<double>(trials) / line.size();
  double chi2 = 0;
  for (int h : hits) chi2 += (h - expected) * (h - expected) / expected;
  // 40 degrees of freedom; 73.4 is the 0.999 quantile.
  CHECK(chi2 < 73.4);
}

TEST_CASE("byte pollution is length preserving") {
  Rng rng(8);
  auto out = augment_random_bytes("password", rng, 1);
  CHECK(out.size() == 8);
  int diffs = 0;
  for (int i = 0; i < 8; ++i) diffs += out[i] != "password"[i];
  CHECK(diffs == 1);
  for (int t = 0; t < 200; ++t) {
    std::string v = "developers_can_merge";
    auto p = augment_random_bytes(v, rng, 4);
    REQUIRE(p.size() == v.size());
    int d = 0;
    for (std::size_t i = 0; i < v.size(); ++i) d += p[i] != v[i];
    CHECK(d >= 1);
    CHECK(d <= 4);
  }
  CHECK_THROWS_AS(augment_random_bytes("x", rng, 0), MutationError);
  CHECK_THROWS_AS(augment_random_bytes("", rng, 1), MutationError);
}

TEST_CASE("tree mutation over a single terminal rule is the identity") {
  auto g = load_grammar(fixture("one_terminal.grammar"));
  WireRequest w;
  w.method = "GET";
  auto x = parse_test_case(std::vector<WireRequest>{w}, g);
  Rng rng(1);
  CHECK(mutate_tree_random(x, g, rng) == x);
  auto empty = parse_test_case(std::vector<WireRequest>{}, g);
  CHECK_THROWS_AS(mutate_tree_random(empty, g, rng), MutationError);
}

TEST_CASE("tree mutation covers every leaf and rule") {
  auto g = load_grammar(fixture("three_leaves.grammar"));
  WireRequest w;
  w.method = "GET";
  w.target = "/a/b";
  auto x = parse_test_case(std::vector<WireRequest>{w}, g);
  REQUIRE(x.leaf_count() == 3);
  REQUIRE(terminal_rules(g).size() == 4);
  std::set<std::pair<std::size_t, RuleId>> cells;
  Rng rng(2);
  for (int t = 0; t < 1000; ++t) {
    MutationPlan p;
    auto y = mutate_tree_random(x, g, rng, false, &p);
    cells.insert({p.target_leaf, p.new_rule});
    for (std::size_t k = 0; k < x.leaf_count(); ++k)
      if (k != p.target_leaf) CHECK(y.tokens[y.leaf_index[k]] == x.tokens[x.leaf_index[k]]);
    CHECK(y.tokens[y.leaf_index[p.target_leaf]] == p.new_rule);
  }
  CHECK(cells.size() == 12);
}

TEST_CASE("commit example mutation space is 73 x 66") {
  auto g = load_grammar(fixture("fig1.grammar"));
  auto x = seed_of(g, "fig1.seed");
  std::set<std::vector<RuleId>> mutants;
  for (auto leaf : mutable_leaves(x, g, true))
    for (auto rule : terminal_rules(g)) mutants.insert(apply_plan(x, {leaf, rule, MutationCase::case1, {}}, g).tokens);
  // Flipping a leaf to its own rule gives back x, once per leaf.
  CHECK(mutable_leaves(x, g, true).size() * terminal_rules(g).size() == 4818);
  CHECK(mutants.size() == 4818 - 73 + 1);
}

TEST_CASE("tree and learned mutants stay well formed; dependencies untouched") {
  auto g = load_grammar(fixture("reference.grammar"));
  auto corpus = seqfuzz::testing::random_corpus(g, 50, 17, 1, 3);
  Rng rng(4);
  for (int t = 0; t < 10000; ++t) {
    const auto& x = corpus[t % corpus.size()];
    if (mutable_leaves(x, g, false).empty()) continue;
    auto y = mutate_tree_random(x, g, rng);
    REQUIRE(is_well_formed(y, g));
    for (std::size_t k = 0; k < x.leaf_count(); ++k) {
      auto role = g.rule(x.tokens[x.leaf_index[k]]).role;
      if (role != DependencyRole::none) CHECK(y.tokens[y.leaf_index[k]] == x.tokens[x.leaf_index[k]]);
    }
  }
}

TEST_CASE("mutation log lines") {
  MutationLogEntry e{"seed-3", 4, "case1", 17, {1, 5}, 500};
  CHECK(format_log_line(e) == "seed-3\t4\tcase1\t17\t1,5\t500");
  CHECK(mutation_log_header() == "seed_id\tleaf\tcase\trule\toffsets\tstatus");
}
