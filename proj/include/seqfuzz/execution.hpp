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

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "seqfuzz/coverage.hpp"
#include "seqfuzz/http.hpp"
#include "seqfuzz/parser.hpp"

namespace seqfuzz {

class ExecutionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TargetConfig {
  std::string base_url = "http://127.0.0.1:8080";
  // Added to a request that lacks it; empty name disables.
  std::string auth_header = "PRIVATE-TOKEN";
  std::string auth_value;
  int timeout_ms = 5000;
  // Resource name -> dotted JSON path in the producing response.
  std::map<std::string, std::string> extract = {{"project-id", "id"}, {"branch-name", "branch"}};
  // Use the target's /__reset__ and /__coverage__ side channel.
  bool instrumented = true;

  void validate() const;
};

// One request ready to send: HTTP message bytes (see to_http_message),
// possibly still holding {{producer:..}} / {{consumer:..}} placeholders,
// and the resources the server assigns when it succeeds.
struct PreparedRequest {
  std::string message;
  std::vector<std::string> produces;
};

// Renders with placeholders for dependency slots and fresh UUIDs.
std::vector<PreparedRequest> prepare(const TestCase& tc, std::uint64_t uuid_seed = 0);
std::vector<PreparedRequest> prepare(const std::vector<WireRequest>& requests, std::uint64_t uuid_seed = 0);

enum class Verdict { pass, bug_500, transport_error };
std::string verdict_name(Verdict v);

struct RequestOutcome {
  std::string sent;  // message bytes after substitution
  int status = 0;
  std::string reason;
  std::string body;
  double latency_ms = 0;
  std::optional<CoverageBitmap> coverage;
};

struct ExecutionResult {
  std::vector<RequestOutcome> responses;
  std::map<std::string, std::string> bindings;
  std::optional<CoverageBitmap> coverage;  // union over the test case
  Verdict verdict = Verdict::pass;
  std::string error;

  // Index of the first 500 response; nullopt without one.
  std::optional<std::size_t> first_500() const;
};

// Value at a dotted path (`id`, `commit.id`, `items.0.id`), stringified;
// nullopt on a missing path or a non-JSON body.
std::optional<std::string> extract_resource_id(std::string_view body, std::string_view path);

// Replaces every placeholder for which `bindings` has a value.
std::string substitute(std::string message, const std::map<std::string, std::string>& bindings,
                       DependencyRole role);

class Executor {
 public:
  explicit Executor(TargetConfig cfg);

  const TargetConfig& config() const { return cfg_; }

  // Runs one test case on one connection. With an instrumented target the
  // target is reset first and coverage is fetched after the last request.
  // `chosen` supplies client-picked producer values (e.g. from a seed);
  // others get `<resource>-<request index>`. With `resolve` false the
  // messages are sent verbatim (replay).
  ExecutionResult run(const std::vector<PreparedRequest>& requests, const std::map<std::string, std::string>& chosen = {},
                      bool resolve = true);

  bool reset_target();
  // Per-request bitmaps since the last reset; the target's counters are
  // cleared by the read. nullopt when the side channel is unavailable.
  std::optional<std::vector<CoverageBitmap>> fetch_and_reset_coverage();
  std::optional<std::vector<std::string>> manifest();

 private:
  std::optional<HttpResponse> side_channel(const std::string& method, const std::string& target);

  TargetConfig cfg_;
  Endpoint ep_;
  std::size_t block_count_ = 0;
};

// Transcript: each request in seed-file form (or `!raw` plus escaped bytes
// when the bytes do not survive that form), followed by `=> status reason`
// and `=> body` lines and `# coverage <hex>`; blocks separated by blank
// lines, with a `# verdict` header.
std::string format_transcript(const ExecutionResult& r);
// Request messages recorded in a transcript, in order.
std::vector<std::string> transcript_messages(std::string_view text);
// Status codes recorded in a transcript.
std::vector<int> transcript_statuses(std::string_view text);

}  // namespace seqfuzz
