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

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "seqfuzz/grammar.hpp"

namespace seqfuzz {

// An abstracted test case: the DFS (leftmost-derivation) order of rule
// applications. Mutated leaves may carry raw bytes in `payloads`, keyed by
// token position; these override the rule's terminal text when rendering.
struct RuleSequence {
  std::vector<RuleId> tokens;
  std::vector<std::size_t> leaf_index;
  std::vector<std::size_t> request_boundaries;
  std::vector<std::string> request_kinds;
  std::map<std::size_t, std::string> payloads;
  std::uint64_t grammar_hash = 0;

  std::size_t leaf_count() const { return leaf_index.size(); }
  bool operator==(const RuleSequence&) const = default;
};

// Builds a sequence from raw tokens, deriving leaf and boundary indices
// from the rule kinds. Does not validate the derivation.
RuleSequence make_sequence(std::vector<RuleId> tokens, const Grammar& g);

// One request as it travels on the wire (bytes, not yet HTTP-framed).
struct WireRequest {
  std::string method;
  std::string target;
  std::vector<std::string> header_lines;
  std::string body;
  // Resources the server assigns on success; execution extracts them.
  std::vector<std::string> produces;

  bool operator==(const WireRequest& o) const {
    return method == o.method && target == o.target && header_lines == o.header_lines && body == o.body;
  }
};

struct RenderedPiece {
  std::string kind;  // lhs of the rule that produced the leaf
  std::string text;
  RuleId rule = 0;
  std::size_t position = 0;  // token position in the sequence
};

struct Request {
  std::string kind;
  RenderedPiece method;
  std::vector<RenderedPiece> path;
  std::vector<RenderedPiece> header;
  std::vector<RenderedPiece> body;
  std::vector<std::string> produces;

  std::string path_text() const;
  std::string header_text() const;
  std::string body_text() const;
  WireRequest wire() const;
};

struct TestCase {
  std::vector<Request> requests;
  std::string seed_id;
  std::vector<std::string> lineage;

  std::vector<WireRequest> wire() const;
};

// Concrete values for dependency slots, keyed by resource name. In
// placeholder mode an unbound slot renders as {{consumer:name}}.
struct Bindings {
  std::map<std::string, std::string> values;
  bool placeholder = true;
  std::uint64_t uuid_seed = 0;
};

std::string placeholder_text(DependencyRole role, std::string_view resource);

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t request, const std::string& message)
      : std::runtime_error("request " + std::to_string(request) + ": " + message), request_(request) {}
  std::size_t request() const { return request_; }

 private:
  std::size_t request_;
};

// One request as HTTP/1.1 message bytes without framing headers:
// request line, header lines, blank line, body (CRLF line ends). The
// executor adds Host and Content-Length when sending.
std::string to_http_message(const WireRequest& w);
// Inverse of to_http_message; nullopt when the request line is not
// `method SP target SP HTTP/x`.
std::optional<WireRequest> from_http_message(std::string_view message);

// Seed-file format: requests separated by blank lines; a request line
// `METHOD target HTTP/1.1`, header lines, then an optional one-line body.
std::vector<WireRequest> parse_seed_text(std::string_view text);
std::string format_seed_text(const std::vector<WireRequest>& requests);
// Normalizes line endings, trailing blanks and header order.
std::string canonicalize_seed_text(std::string_view text);

RuleSequence parse_test_case(const std::vector<WireRequest>& raw, const Grammar& g,
                             Bindings* observed = nullptr);
RuleSequence parse_test_case(std::string_view seed_text, const Grammar& g, Bindings* observed = nullptr);

TestCase render(const RuleSequence& x, const Grammar& g, const Bindings& bindings = {});
std::string render_seed_text(const RuleSequence& x, const Grammar& g, const Bindings& bindings = {});

// Leaf ordinals aligned by position. Ordinals past the shorter sequence's
// last leaf count as different.
struct LeafDiff {
  std::vector<std::size_t> common;
  std::vector<std::size_t> different;
};
LeafDiff leaf_diff(const RuleSequence& a, const RuleSequence& b);

// Distinct terminal rule ids used by `x`, ascending.
std::vector<RuleId> terminals(const RuleSequence& x, const Grammar& g);

struct ReplayReport {
  bool ok = false;
  std::string error;
  std::size_t max_stack = 0;
};

// Replays `tokens` as a leftmost derivation from the start symbol. With
// `leaf_wildcard`, any terminal rule is accepted where the expected
// nonterminal has terminal productions (a flipped leaf).
ReplayReport replay(const std::vector<RuleId>& tokens, const Grammar& g, bool leaf_wildcard = false);

// Structural validity of a (possibly leaf-mutated) sequence.
inline bool is_well_formed(const RuleSequence& x, const Grammar& g) { return replay(x.tokens, g, true).ok; }

}  // namespace seqfuzz
