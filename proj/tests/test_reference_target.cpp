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

#include <json.hpp>

#include <random>
#include <set>

#include "seqfuzz/grammar.hpp"
#include "seqfuzz/http.hpp"
#include "seqfuzz/parser.hpp"
#include "seqfuzz/reference_target.hpp"
#include "seqfuzz/util.hpp"
#include "test_support.hpp"

using namespace seqfuzz;
using seqfuzz::testing::fixture;

namespace {

HttpRequest to_request(const WireRequest& w) {
  HttpRequest r;
  r.method = w.method;
  r.target = w.target;
  for (const auto& line : w.header_lines) {
    auto colon = line.find(':');
    r.headers.emplace_back(line.substr(0, colon), std::string(trim(std::string_view(line).substr(colon + 1))));
  }
  r.body = w.body;
  return r;
}

HttpRequest authed(std::string method, std::string target, std::string body = {}) {
  HttpRequest r;
  r.method = std::move(method);
  r.target = std::move(target);
  r.headers.emplace_back("PRIVATE-TOKEN", "DRiX47nuEP2AR");
  r.body = std::move(body);
  return r;
}

bool bit(const std::vector<std::uint8_t>& bitmap, int k) {
  return k >= 0 && static_cast<std::size_t>(k / 8) < bitmap.size() && ((bitmap[k / 8] >> (k % 8)) & 1);
}

bool any_fault(const std::vector<std::uint8_t>& bitmap) {
  for (const auto& b : injected_bug_catalog())
    if (bit(bitmap, block_index(b.fault_block))) return true;
  return false;
}

}  // namespace

TEST_CASE("manifest names are unique and every fault has a block") {
  const auto& m = reference_manifest();
  std::set<std::string> names(m.begin(), m.end());
  CHECK(names.size() == m.size());
  CHECK(m.size() >= 50);
  CHECK(injected_bug_catalog().size() == 3);
  for (const auto& b : injected_bug_catalog()) CHECK(block_index(b.fault_block) >= 0);
  CHECK(block_index("no.such.block") == -1);
}

TEST_CASE("the three-request sequence creates a project, a branch, then crashes on the commit") {
  ReferenceTarget t;
  auto reqs = parse_seed_text(read_file(fixture("fig1.seed")));
  REQUIRE(reqs.size() == 3);
  auto r0 = t.handle(to_request(reqs[0]));
  CHECK(r0.status == 201);
  auto body = nlohmann::json::parse(r0.body);
  CHECK(body["id"] == 1243);
  CHECK(body["name"] == "21a8fa");
  CHECK(t.handle(to_request(reqs[1])).status == 201);
  CHECK(t.handle(to_request(reqs[2])).status == 500);
  REQUIRE(t.coverage_log().size() == 3);
  CHECK(bit(t.coverage_log()[2], block_index("fault.invalid_utf8")));
}

TEST_CASE("each injected fault answers 500 with its own bitmap") {
  ReferenceTarget t;
  t.handle(authed("POST", "/api/projects", R"({"name":"p"})"));
  t.reset_coverage();
  CHECK(t.handle(authed("POST", "/api/projects/1243/repository/branches",
                        "{\"branch\":\"a\xd7\",\"ref\":\"master\"}"))
            .status == 500);
  CHECK(t.handle(authed("GET", "/api/projects/main|dev/repository/branches")).status == 500);
  CHECK(t.handle(authed("GKT", "/api/projects")).status == 500);
  const auto& log = t.coverage_log();
  REQUIRE(log.size() == 3);
  CHECK(log[0] != log[1]);
  CHECK(log[1] != log[2]);
  CHECK(log[0] != log[2]);
  CHECK(bit(log[0], block_index("fault.invalid_utf8")));
  CHECK(bit(log[1], block_index("fault.uri_pipe")));
  CHECK(bit(log[2], block_index("fault.unknown_method")));
}

TEST_CASE("malformed inputs are client errors, not crashes") {
  ReferenceTarget t;
  CHECK(t.handle(authed("POST", "/api/projects", "{\"name\":")).status == 400);
  CHECK(t.handle(authed("POST", "/api/projects", "[1,2]")).status == 400);
  CHECK(t.handle(authed("POST", "/api/projects", R"({"name":"bad\xd7"})")).status == 400);
  HttpRequest no_token;
  no_token.method = "GET";
  no_token.target = "/api/projects";
  CHECK(t.handle(no_token).status == 401);
  CHECK(t.handle(authed("GET", "/api/projects/abc")).status == 400);
  CHECK(t.handle(authed("GET", "/api/projects/99")).status == 404);
  CHECK(t.handle(authed("GET", "/api/groups")).status == 404);
  CHECK(t.handle(authed("PATCH", "/api/projects")).status == 405);
  HttpRequest broken;
  broken.malformed = true;
  CHECK(t.handle(broken).status == 400);
}

TEST_CASE("commit actions track files per branch") {
  ReferenceTarget t;
  t.handle(authed("POST", "/api/projects", R"({"name":"p"})"));
  auto commit = [&](const std::string& action, const std::string& file) {
    return t
        .handle(authed("POST", "/api/projects/1243/repository/commits",
                       R"({"branch":"master","commit_message":"m","actions":[{"action":")" + action +
                           R"(","file_path":")" + file + R"("}]})"))
        .status;
  };
  CHECK(commit("update", "docs/index.md") == 400);
  CHECK(commit("create", "docs/index.md") == 201);
  CHECK(commit("create", "docs/index.md") == 400);
  CHECK(commit("chmod", "docs/index.md") == 201);
  CHECK(commit("delete", "docs/index.md") == 201);
  CHECK(commit("move", "docs/index.md") == 400);
  CHECK(commit("rename", "x") == 400);
}

TEST_CASE("reset restores ids and state") {
  ReferenceTarget t;
  auto run = [&] {
    std::vector<std::string> out;
    for (int i = 0; i < 3; ++i)
      out.push_back(t.handle(authed("POST", "/api/projects", R"({"name":"n)" + std::to_string(i) + "\"}")).body);
    out.push_back(t.handle(authed("GET", "/api/projects?page=2")).body);
    return out;
  };
  auto first = run();
  auto log1 = t.coverage_log();
  t.reset();
  CHECK(t.coverage_log().empty());
  auto second = run();
  CHECK(first == second);
  CHECK(log1 == t.coverage_log());
  CHECK(first[3] == R"([{"id":1245,"name":"n2"}])");
}

TEST_CASE("property: a request answers 500 exactly when it reaches a fault block") {
  auto g = load_grammar(fixture("reference.grammar"));
  Rng rng(7);
  const std::vector<std::string> ids{"1243", "1244", "x"};
  const std::vector<std::string> branches{"master", "feature1", "main|dev", "admin\xd7@example.com"};
  auto pick = [&](const std::vector<std::string>& v) {
    return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
  };
  auto fill = [&](std::string s) {
    for (const auto& [ph, pool] : {std::pair{std::string("{{consumer:project-id}}"), &ids},
                                   std::pair{std::string("{{consumer:branch-name}}"), &branches},
                                   std::pair{std::string("{{producer:branch-name}}"), &branches}}) {
      for (auto at = s.find(ph); at != std::string::npos; at = s.find(ph)) s.replace(at, ph.size(), pick(*pool));
    }
    return s;
  };
  ReferenceTarget t;
  std::set<int> statuses;
  int crashes = 0;
  for (int c = 0; c < 300; ++c) {
    t.reset();
    auto reqs = testing::random_case(g, rng, 1, 6);
    for (std::size_t i = 0; i < reqs.size(); ++i) {
      auto r = to_request(reqs[i]);
      r.target = fill(r.target);
      r.body = fill(r.body);
      if (std::uniform_int_distribution<int>(0, 9)(rng) == 0) r.method = pick({"GKT", "get", "TRACE"});
      auto resp = t.handle(r);
      statuses.insert(resp.status);
      auto fault = any_fault(t.coverage_log().back());
      CHECK((resp.status == 500) == fault);
      crashes += fault;
    }
  }
  CHECK(crashes > 0);
  CHECK(statuses.count(201));
  CHECK(statuses.count(200));
  CHECK(statuses.count(400));
}

TEST_CASE("server: wire round trip, side channel and malformed request lines") {
  ReferenceServer s;
  s.start();
  HttpConnection c;
  REQUIRE(c.connect(parse_base_url(s.base_url()), 2000));
  auto r = c.send_message(
      "POST /api/projects HTTP/1.1\r\nPRIVATE-TOKEN: DRiX47nuEP2AR\r\nContent-Type: application/json\r\n\r\n"
      R"({"name":"w"})");
  REQUIRE(r);
  CHECK(r->status == 201);
  CHECK(r->reason == "Created");
  CHECK(r->header("content-type") == "application/json");
  auto bad = c.send_message("POST /api/pro jects HTTP/1.1\r\n\r\n");
  REQUIRE(bad);
  CHECK(bad->status == 400);
  auto cov = c.send("GET", "/__coverage__?reset=1");
  REQUIRE(cov);
  auto j = nlohmann::json::parse(cov->body);
  CHECK(j["block_count"] == static_cast<int>(reference_manifest().size()));
  CHECK(j["requests"].size() == 2);
  auto again = nlohmann::json::parse(c.send("GET", "/__coverage__")->body);
  CHECK(again["requests"].empty());
  auto manifest = nlohmann::json::parse(c.send("GET", "/__coverage__/manifest")->body);
  CHECK(manifest["blocks"].size() == reference_manifest().size());
  CHECK(c.send("POST", "/__reset__")->status == 200);
  auto fresh = c.send_message("POST /api/projects HTTP/1.1\r\nPRIVATE-TOKEN: DRiX47nuEP2AR\r\n\r\n{\"name\":\"w\"}");
  REQUIRE(fresh);
  CHECK(nlohmann::json::parse(fresh->body)["id"] == 1243);
  c.close();
  s.stop();
}
