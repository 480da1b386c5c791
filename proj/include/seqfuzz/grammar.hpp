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
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace seqfuzz {

using RuleId = std::uint32_t;

enum class RuleKind { structural, terminal, epsilon };
enum class DependencyRole { none, producer, consumer };

// One production. Terminal rules have exactly one terminal on the right:
// `value` drawn from `alphabet`. Structural rules list nonterminals only.
struct Rule {
  std::string lhs;
  std::vector<std::string> rhs;
  RuleKind kind = RuleKind::structural;
  DependencyRole role = DependencyRole::none;
  std::string alphabet;
  std::string value;

  bool operator==(const Rule&) const = default;
};

struct Alphabet {
  std::string name;
  std::vector<std::string> values;
};

// A piece of a request layout: either literal text (a static terminal) or
// a slot filled by a terminal of nonterminal `slot` (string, int, enum,
// consumer, ...). Producer/consumer slots also name the resource.
struct Piece {
  bool literal = true;
  std::string text;
  std::string slot;
  std::string resource;

  bool operator==(const Piece&) const = default;
};

// A request type of the target API. Headers hold one piece list per line.
struct RequestDef {
  std::string name;
  std::string method;
  std::vector<Piece> path;
  std::vector<std::vector<Piece>> headers;
  std::vector<Piece> body;
  // Resources the server assigns when this request succeeds (e.g. an id).
  std::vector<std::string> produces;
};

class GrammarError : public std::runtime_error {
 public:
  GrammarError(int line, const std::string& message)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message : message),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// Names of the nonterminals that delimit request sections.
inline constexpr std::string_view kMethodSymbol = "method";
inline constexpr std::string_view kPathSymbol = "path";
inline constexpr std::string_view kHeaderSymbol = "header";
inline constexpr std::string_view kBodySymbol = "body";
inline constexpr std::string_view kRequestSymbol = "request";
inline constexpr std::string_view kStaticSymbol = "static";
inline constexpr std::string_view kUuidValue = "<uuid>";

// Tail-recursive regular grammar plus the API's request layouts.
// Immutable once built; rule ids are dense and follow file order, with an
// `@alphabet` alternative expanding in place to one rule per value.
class Grammar {
 public:
  // Parses the grammar-file format. When `require_regular` is set, a
  // non-tail recursion is a GrammarError naming the rule.
  static Grammar parse(std::string_view text, bool require_regular = true);

  std::string serialize() const;

  const std::vector<Rule>& rules() const { return rules_; }
  const Rule& rule(RuleId id) const { return rules_.at(id); }
  std::size_t size() const { return rules_.size(); }
  const std::string& start_symbol() const { return start_; }
  const std::vector<Alphabet>& alphabets() const { return alphabets_; }
  const Alphabet* alphabet(std::string_view name) const;
  const std::vector<RequestDef>& requests() const { return requests_; }
  const RequestDef* request(std::string_view name) const;

  // Nonterminals in order of first definition.
  const std::vector<std::string>& nonterminals() const { return nonterminals_; }
  bool is_nonterminal(std::string_view name) const;
  std::span<const RuleId> rules_for(std::string_view lhs) const;
  // True if `lhs` has at least one terminal production.
  bool is_leaf_parent(std::string_view lhs) const;
  std::optional<RuleId> find_terminal(std::string_view lhs, std::string_view value) const;
  // The alphabet feeding the terminal rules of `lhs`, if any.
  const Alphabet* alphabet_for(std::string_view lhs) const;

  std::uint64_t hash() const { return hash_; }

 private:
  struct RuleLine {
    int line = 0;
    std::string lhs;
    std::vector<std::vector<std::string>> alternatives;
  };

  void build(bool require_regular);

  std::vector<Alphabet> alphabets_;
  std::vector<RuleLine> lines_;
  std::vector<RequestDef> requests_;
  std::vector<Rule> rules_;
  std::vector<std::string> nonterminals_;
  std::map<std::string, std::vector<RuleId>, std::less<>> by_lhs_;
  std::map<std::pair<std::string, std::string>, RuleId> terminal_index_;
  std::string start_;
  std::uint64_t hash_ = 0;
};

Grammar load_grammar(const std::string& path);
void save_grammar(const Grammar& g, const std::string& path);

// Ids of every rule with kind=terminal, ascending.
std::vector<RuleId> terminal_rules(const Grammar& g);

struct TailRecursionViolation {
  RuleId rule;
  std::string symbol;  // the non-rightmost symbol that can reach back to the lhs
  std::string message;
};

// Empty iff recursion only ever happens in right-most position.
std::vector<TailRecursionViolation> check_tail_recursive(const Grammar& g);

// Upper bound on the pending-symbol stack of a leftmost derivation of a
// tail-recursive grammar; independent of derivation length.
std::size_t derivation_stack_bound(const Grammar& g);

std::string rule_to_string(const Grammar& g, RuleId id);

}  // namespace seqfuzz
