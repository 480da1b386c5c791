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

#include <chrono>
#include <algorithm>
#include <random>
#include <set>

#include "seqfuzz/coverage.hpp"
#include "seqfuzz/util.hpp"
#include "test_support.hpp"

using namespace seqfuzz;
using seqfuzz::testing::fixture;

namespace {

using BlockSet = std::set<std::size_t>;

BlockSet blocks_of(const CoverageBitmap& b) {
  BlockSet s;
  for (std::size_t k = 0; k < b.bytes().size() * 8; ++k)
    if (b.test(k)) s.insert(k);
  return s;
}

BlockSet union_of(const std::vector<BlockSet>& sets, const std::vector<std::size_t>& pick) {
  BlockSet u;
  for (auto i : pick) u.insert(sets[i].begin(), sets[i].end());
  return u;
}

// Smallest cover size by exhaustive search over subsets of size 1, 2, ...
std::size_t brute_force_min_cover(const std::vector<BlockSet>& sets) {
  BlockSet all = union_of(sets, [&] {
    std::vector<std::size_t> idx(sets.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    return idx;
  }());
  if (all.empty()) return 0;
  for (std::size_t k = 1; k <= sets.size(); ++k) {
    std::vector<std::size_t> pick(k);
    for (std::size_t i = 0; i < k; ++i) pick[i] = i;
    while (true) {
      if (union_of(sets, pick) == all) return k;
      std::size_t i = k;
      while (i > 0 && pick[i - 1] == sets.size() - k + i - 1) --i;
      if (i == 0) break;
      ++pick[i - 1];
      for (std::size_t j = i; j < k; ++j) pick[j] = pick[j - 1] + 1;
    }
  }
  return sets.size();
}

std::vector<CoverageBitmap> load_entries(const std::string& path) {
  std::vector<CoverageBitmap> out;
  for (const auto& line : split(read_file(path), '\n')) {
    if (line.empty() || line[0] == '#') continue;
    out.push_back(CoverageBitmap::from_hex(split(line, '\t').at(1)));
  }
  return out;
}

}  // namespace

TEST_CASE("bit k is bit k%8 of byte k/8") {
  CoverageBitmap b(24);
  b.set(0);
  CHECK(b.to_hex() == "010000");
  b.set(9);
  CHECK(b.to_hex() == "010200");
  b.set(15);
  CHECK(b.to_hex() == "018200");
  b.set(20);
  CHECK(b.to_hex() == "018210");
  CHECK(b.count() == 4);
  CHECK(CoverageBitmap::from_hex("018210", 24) == b);
  CHECK_THROWS_AS(b.set(24), CoverageError);
  CHECK_THROWS_AS(CoverageBitmap::from_hex("0182", 24), CoverageError);
  CHECK_THROWS_AS(CoverageBitmap::from_hex("ff", 5), CoverageError);
  CHECK(CoverageBitmap::from_hex("1f", 5).count() == 5);
}

TEST_CASE("is_new_path updates the union only on new blocks") {
  CoverageBitmap a(8), ab(8), b(8), global;
  a.set(0);
  ab.set(0);
  ab.set(1);
  b.set(1);
  CHECK(is_new_path(a, global));
  CHECK(is_new_path(ab, global));
  CHECK_FALSE(is_new_path(b, global));
  CHECK(global == ab);
  CoverageBitmap zero(8);
  CHECK_FALSE(is_new_path(zero, global));
  CoverageBitmap wide(16);
  CHECK_THROWS_AS(is_new_path(wide, global), CoverageError);
}

TEST_CASE("property: count_new and merge agree with set arithmetic") {
  Rng rng(3);
  for (int trial = 0; trial < 500; ++trial) {
    auto width = std::uniform_int_distribution<std::size_t>(1, 90)(rng);
    CoverageBitmap a(width), b(width);
    BlockSet sa, sb;
    for (int i = 0; i < 30; ++i) {
      auto k = std::uniform_int_distribution<std::size_t>(0, width - 1)(rng);
      if (i % 2) {
        a.set(k);
        sa.insert(k);
      } else {
        b.set(k);
        sb.insert(k);
      }
    }
    std::size_t expected_new = 0;
    for (auto k : sa) expected_new += !sb.count(k);
    CHECK(a.count_new(b) == expected_new);
    auto added = b.merge(a);
    CHECK(added == expected_new);
    sb.insert(sa.begin(), sa.end());
    CHECK(blocks_of(b) == sb);
    CHECK(CoverageBitmap::from_hex(b.to_hex(), width) == b);
  }
}

TEST_CASE("identical and disjoint corpora") {
  std::vector<CoverageBitmap> same(5, CoverageBitmap::from_hex("0f"));
  CHECK(distill(same) == std::vector<std::size_t>{0});
  std::vector<CoverageBitmap> disjoint{CoverageBitmap::from_hex("01"), CoverageBitmap::from_hex("02"),
                                       CoverageBitmap::from_hex("0c")};
  CHECK(distill(disjoint) == std::vector<std::size_t>{0, 1, 2});
  CHECK(distill({}).empty());
}

TEST_CASE("100-entry corpus with 7 distinct paths") {
  auto entries = load_entries(fixture("distill_100.tsv"));
  REQUIRE(entries.size() == 100);
  std::vector<BlockSet> distinct, all;
  for (const auto& e : entries) {
    auto s = blocks_of(e);
    all.push_back(s);
    if (std::find(distinct.begin(), distinct.end(), s) == distinct.end()) distinct.push_back(s);
  }
  REQUIRE(distinct.size() == 7);
  auto optimum = brute_force_min_cover(distinct);
  CHECK(optimum == 7);

  auto t0 = std::chrono::steady_clock::now();
  auto kept = distill(entries);
  auto secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  CHECK(secs < 1.0);
  CHECK(kept.size() == optimum);
  std::vector<std::size_t> every(entries.size());
  for (std::size_t i = 0; i < every.size(); ++i) every[i] = i;
  CHECK(union_of(all, kept) == union_of(all, every));
}

TEST_CASE("property: any order keeps a sound cover no smaller than the optimum") {
  Rng rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    auto n = std::uniform_int_distribution<std::size_t>(1, 10)(rng);
    std::vector<CoverageBitmap> entries;
    std::vector<BlockSet> sets;
    for (std::size_t i = 0; i < n; ++i) {
      CoverageBitmap b(16);
      for (int j = 0; j < 4; ++j)
        if (std::uniform_int_distribution<int>(0, 2)(rng)) b.set(std::uniform_int_distribution<std::size_t>(0, 15)(rng));
      entries.push_back(b);
      sets.push_back(blocks_of(b));
    }
    auto optimum = brute_force_min_cover(sets);
    std::vector<std::size_t> every(n);
    for (std::size_t i = 0; i < n; ++i) every[i] = i;
    auto all = union_of(sets, every);
    for (int perm = 0; perm < 3; ++perm) {
      auto kept = distill(entries);
      CHECK(union_of(sets, kept) == all);
      CHECK(std::is_sorted(kept.begin(), kept.end()));
      CHECK(kept.size() >= optimum);
      std::vector<std::size_t> order(n);
      for (std::size_t i = 0; i < n; ++i) order[i] = i;
      std::shuffle(order.begin(), order.end(), rng);
      std::vector<CoverageBitmap> e2;
      std::vector<BlockSet> s2;
      for (auto i : order) {
        e2.push_back(entries[i]);
        s2.push_back(sets[i]);
      }
      entries = std::move(e2);
      sets = std::move(s2);
    }
  }
}

TEST_CASE("bugs group by the bitmap of the first failing request") {
  std::vector<BugObservation> bugs{
      {"t1", 2, CoverageBitmap::from_hex("0f01")},
      {"t2", 0, CoverageBitmap::from_hex("0f02")},
      {"t3", 1, CoverageBitmap::from_hex("0f01")},
      {"t4", 3, CoverageBitmap::from_hex("0f04")},
      {"t5", 0, CoverageBitmap::from_hex("0f02")},
  };
  auto groups = dedup_bugs(bugs);
  REQUIRE(groups.size() == 3);
  CHECK(groups[0].key == "0f01");
  CHECK(groups[0].members == std::vector<std::size_t>{0, 2});
  CHECK(groups[1].members == std::vector<std::size_t>{1, 4});
  CHECK(groups[2].members == std::vector<std::size_t>{3});
  CHECK(dedup_bugs({}).empty());

  // 132 failures over 3 paths collapse to 3 groups in any order.
  std::vector<BugObservation> many;
  for (int i = 0; i < 132; ++i) many.push_back(bugs[static_cast<std::size_t>(i % 3) + (i % 3 == 2 ? 1 : 0)]);
  Rng rng(9);
  std::shuffle(many.begin(), many.end(), rng);
  auto g2 = dedup_bugs(many);
  CHECK(g2.size() == 3);
  std::set<std::string> keys;
  for (const auto& g : g2) keys.insert(g.key);
  CHECK(keys == std::set<std::string>{"0f01", "0f02", "0f04"});
}
