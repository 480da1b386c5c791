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

#include "seqfuzz/grammar.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <set>
#include <sstream>

#include "seqfuzz/util.hpp"

namespace seqfuzz {

namespace {

bool is_epsilon(std::string_view s) { return s == "ε" || s == "eps" || s == "epsilon"; }

bool is_identifier(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.')) return false;
  }
  return true;
}

// Splits a layout line into pieces: "quoted literal" or {slot[:resource]}.
std::vector<Piece> parse_pieces(std::string_view text, int line) {
  std::vector<Piece> pieces;
  std::size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    if (c == ' ' || c == '\t') {
      ++i;
    } else if (c == '"') {
      std::string raw;
      ++i;
      bool closed = false;
      while (i < text.size()) {
        if (text[i] == '\\' && i + 1 < text.size()) {
          raw += text[i];
          raw += text[i + 1];
          i += 2;
        } else if (text[i] == '"') {
          closed = true;
          ++i;
          break;
        } else {
          raw += text[i++];
        }
      }
      if (!closed) throw GrammarError(line, "unterminated literal");
      std::string value;
      try {
        value = unescape_bytes(raw);
      } catch (const std::exception& e) {
        throw GrammarError(line, e.what());
      }
      if (value.empty()) throw GrammarError(line, "empty literal");
      pieces.push_back(Piece{true, std::move(value), {}, {}});
    } else if (c == '{') {
      auto close = text.find('}', i);
      if (close == std::string_view::npos) throw GrammarError(line, "unterminated slot");
      auto body = std::string(trim(text.substr(i + 1, close - i - 1)));
      Piece p{false, {}, body, {}};
      if (auto colon = body.find(':'); colon != std::string::npos) {
        p.slot = std::string(trim(std::string_view(body).substr(0, colon)));
        p.resource = std::string(trim(std::string_view(body).substr(colon + 1)));
      }
      if (!is_identifier(p.slot)) throw GrammarError(line, "bad slot '" + body + "'");
      pieces.push_back(std::move(p));
      i = close + 1;
    } else {
      throw GrammarError(line, std::string("unexpected character '") + c + "' in layout");
    }
  }
  return pieces;
}

std::string pieces_to_string(const std::vector<Piece>& pieces) {
  std::string out;
  for (const auto& p : pieces) {
    if (!out.empty()) out += ' ';
    if (p.literal) {
      std::string esc;
      for (char c : escape_bytes(p.text)) {
        if (c == '"') esc += "\\\"";
        else esc += c;
      }
      out += '"' + esc + '"';
    } else {
      out += '{' + p.slot + (p.resource.empty() ? "" : ":" + p.resource) + '}';
    }
  }
  return out;
}

}  // namespace

const Alphabet* Grammar::alphabet(std::string_view name) const {
  for (const auto& a : alphabets_)
    if (a.name == name) return &a;
  return nullptr;
}

const RequestDef* Grammar::request(std::string_view name) const {
  for (const auto& r : requests_)
    if (r.name == name) return &r;
  return nullptr;
}

bool Grammar::is_nonterminal(std::string_view name) const { return by_lhs_.find(name) != by_lhs_.end(); }

std::span<const RuleId> Grammar::rules_for(std::string_view lhs) const {
  auto it = by_lhs_.find(lhs);
  if (it == by_lhs_.end()) return {};
  return it->second;
}

bool Grammar::is_leaf_parent(std::string_view lhs) const {
  for (auto id : rules_for(lhs))
    if (rules_[id].kind == RuleKind::terminal) return true;
  return false;
}

std::optional<RuleId> Grammar::find_terminal(std::string_view lhs, std::string_view value) const {
  auto it = terminal_index_.find({std::string(lhs), std::string(value)});
  if (it == terminal_index_.end()) return std::nullopt;
  return it->second;
}

const Alphabet* Grammar::alphabet_for(std::string_view lhs) const {
  for (const auto& line : lines_) {
    if (line.lhs != lhs) continue;
    for (const auto& alt : line.alternatives)
      if (alt.size() == 1 && alt[0].starts_with('@')) return alphabet(alt[0].substr(1));
  }
  return nullptr;
}

Grammar Grammar::parse(std::string_view text, bool require_regular) {
  Grammar g;
  enum class Section { none, alphabet, rule, request } section = Section::none;
  Alphabet* current_alphabet = nullptr;
  RequestDef* current_request = nullptr;

  auto lines = split(text, '\n');
  for (std::size_t n = 0; n < lines.size(); ++n) {
    int lineno = static_cast<int>(n + 1);
    std::string_view raw = lines[n];
    if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
    if (raw.empty() || raw.front() == '#') continue;
    std::string_view line = trim(raw);
    if (line.empty()) continue;

    if (line.front() == '[' && line.back() == ']') {
      auto header = std::string(trim(line.substr(1, line.size() - 2)));
      current_alphabet = nullptr;
      current_request = nullptr;
      if (header == "rule") {
        section = Section::rule;
      } else if (header.starts_with("alphabet ")) {
        auto name = std::string(trim(std::string_view(header).substr(9)));
        if (!is_identifier(name)) throw GrammarError(lineno, "bad alphabet name '" + name + "'");
        if (g.alphabet(name)) throw GrammarError(lineno, "duplicate alphabet '" + name + "'");
        g.alphabets_.push_back(Alphabet{name, {}});
        current_alphabet = &g.alphabets_.back();
        section = Section::alphabet;
      } else if (header.starts_with("request ")) {
        auto name = std::string(trim(std::string_view(header).substr(8)));
        if (!is_identifier(name)) throw GrammarError(lineno, "bad request name '" + name + "'");
        if (g.request(name)) throw GrammarError(lineno, "duplicate request '" + name + "'");
        g.requests_.push_back(RequestDef{name, {}, {}, {}, {}, {}});
        current_request = &g.requests_.back();
        section = Section::request;
      } else {
        throw GrammarError(lineno, "unknown section '" + header + "'");
      }
      continue;
    }

    switch (section) {
      case Section::none:
        throw GrammarError(lineno, "content outside of a section");
      case Section::alphabet: {
        std::string value;
        try {
          value = unescape_bytes(raw);
        } catch (const std::exception& e) {
          throw GrammarError(lineno, e.what());
        }
        auto& values = current_alphabet->values;
        if (std::find(values.begin(), values.end(), value) != values.end())
          throw GrammarError(lineno, "duplicate value in alphabet '" + current_alphabet->name + "'");
        values.push_back(std::move(value));
        break;
      }
      case Section::rule: {
        auto arrow = line.find("->");
        if (arrow == std::string_view::npos) throw GrammarError(lineno, "expected 'lhs -> ...'");
        RuleLine rl;
        rl.line = lineno;
        rl.lhs = std::string(trim(line.substr(0, arrow)));
        if (!is_identifier(rl.lhs)) throw GrammarError(lineno, "bad nonterminal '" + rl.lhs + "'");
        for (const auto& alt_text : split(line.substr(arrow + 2), '|')) {
          std::vector<std::string> symbols;
          auto alt = trim(alt_text);
          if (alt.empty()) throw GrammarError(lineno, "empty alternative");
          if (!is_epsilon(alt)) {
            for (const auto& sym_text : split(alt, '+')) {
              auto sym = std::string(trim(sym_text));
              auto bare = sym.starts_with('@') ? std::string_view(sym).substr(1) : std::string_view(sym);
              if (!is_identifier(bare)) throw GrammarError(lineno, "bad symbol '" + sym + "'");
              symbols.push_back(sym);
            }
          }
          bool has_terminal = std::any_of(symbols.begin(), symbols.end(),
                                          [](const std::string& s) { return s.starts_with('@'); });
          if (has_terminal && symbols.size() != 1)
            throw GrammarError(lineno, "terminal alphabet must be the only symbol of its alternative");
          rl.alternatives.push_back(std::move(symbols));
        }
        g.lines_.push_back(std::move(rl));
        break;
      }
      case Section::request: {
        auto eq = line.find('=');
        if (eq == std::string_view::npos) throw GrammarError(lineno, "expected 'key = value'");
        auto key = std::string(trim(line.substr(0, eq)));
        auto value = trim(line.substr(eq + 1));
        auto& req = *current_request;
        if (key == "method") {
          req.method = unescape_bytes(value);
        } else if (key == "path") {
          req.path = parse_pieces(value, lineno);
        } else if (key == "header") {
          req.headers.push_back(parse_pieces(value, lineno));
        } else if (key == "body") {
          req.body = parse_pieces(value, lineno);
        } else if (key == "produces") {
          for (const auto& r : split(value, ','))
            if (auto t = trim(r); !t.empty()) req.produces.emplace_back(t);
        } else {
          throw GrammarError(lineno, "unknown request key '" + key + "'");
        }
        break;
      }
    }
  }

  // Layout literals are static terminals.
  for (const auto& req : g.requests_) {
    auto add = [&](const std::vector<Piece>& pieces) {
      for (const auto& p : pieces) {
        if (!p.literal) continue;
        Alphabet* st = nullptr;
        for (auto& a : g.alphabets_)
          if (a.name == kStaticSymbol) st = &a;
        if (!st) {
          g.alphabets_.push_back(Alphabet{std::string(kStaticSymbol), {}});
          st = &g.alphabets_.back();
        }
        if (std::find(st->values.begin(), st->values.end(), p.text) == st->values.end())
          st->values.push_back(p.text);
      }
    };
    add(req.path);
    for (const auto& h : req.headers) add(h);
    add(req.body);
  }

  g.build(require_regular);

  // Layout references must resolve against the rules.
  for (const auto& req : g.requests_) {
    auto where = "request '" + req.name + "'";
    if (!g.find_terminal(kMethodSymbol, req.method))
      throw GrammarError(0, where + ": method '" + req.method + "' is not a method terminal");
    auto check = [&](const std::vector<Piece>& pieces) {
      for (const auto& p : pieces) {
        if (p.literal) {
          if (!g.find_terminal(kStaticSymbol, p.text))
            throw GrammarError(0, where + ": literal '" + escape_bytes(p.text) + "' has no static rule");
        } else if (p.slot == "producer" || p.slot == "consumer") {
          if (!g.find_terminal(p.slot, p.resource))
            throw GrammarError(0, where + ": unknown resource '" + p.resource + "' for " + p.slot);
        } else if (!g.is_nonterminal(p.slot)) {
          throw GrammarError(0, where + ": unknown slot kind '" + p.slot + "'");
        }
      }
    };
    check(req.path);
    for (const auto& h : req.headers) check(h);
    check(req.body);
  }
  return g;
}

void Grammar::build(bool require_regular) {
  rules_.clear();
  by_lhs_.clear();
  terminal_index_.clear();
  nonterminals_.clear();

  // Every terminal value must belong to exactly one alphabet.
  std::map<std::string, std::string> owner;
  for (const auto& a : alphabets_) {
    for (const auto& v : a.values) {
      auto [it, inserted] = owner.emplace(v, a.name);
      if (!inserted && it->second != a.name)
        throw GrammarError(0, "value '" + escape_bytes(v) + "' appears in alphabets '" + it->second +
                                  "' and '" + a.name + "'");
    }
  }

  for (const auto& line : lines_) {
    if (std::find(nonterminals_.begin(), nonterminals_.end(), line.lhs) == nonterminals_.end())
      nonterminals_.push_back(line.lhs);
    by_lhs_[line.lhs];
  }
  if (!lines_.empty()) start_ = lines_.front().lhs;

  for (const auto& line : lines_) {
    DependencyRole role = line.lhs == "producer"   ? DependencyRole::producer
                          : line.lhs == "consumer" ? DependencyRole::consumer
                                                   : DependencyRole::none;
    for (const auto& alt : line.alternatives) {
      if (alt.empty()) {
        by_lhs_[line.lhs].push_back(static_cast<RuleId>(rules_.size()));
        rules_.push_back(Rule{line.lhs, {}, RuleKind::epsilon, role, {}, {}});
      } else if (alt[0].starts_with('@')) {
        auto name = alt[0].substr(1);
        const Alphabet* a = alphabet(name);
        if (!a) throw GrammarError(line.line, "rule '" + line.lhs + "' references unknown alphabet '" + name + "'");
        for (const auto& v : a->values) {
          auto id = static_cast<RuleId>(rules_.size());
          by_lhs_[line.lhs].push_back(id);
          terminal_index_.emplace(std::make_pair(line.lhs, v), id);
          rules_.push_back(Rule{line.lhs, {}, RuleKind::terminal, role, a->name, v});
        }
      } else {
        for (const auto& s : alt)
          if (!by_lhs_.count(s))
            throw GrammarError(line.line, "rule '" + line.lhs + "' references undefined nonterminal '" + s + "'");
        by_lhs_[line.lhs].push_back(static_cast<RuleId>(rules_.size()));
        rules_.push_back(Rule{line.lhs, alt, RuleKind::structural, role, {}, {}});
      }
    }
  }

  std::uint64_t h = fnv1a("seqfuzz-grammar");
  for (const auto& r : rules_) {
    h = fnv1a(r.lhs, h);
    h = fnv1a("\x1f", h);
    for (const auto& s : r.rhs) h = fnv1a(s + "\x1e", h);
    h = fnv1a(r.alphabet + "\x1d" + r.value + "\x1c", h);
  }
  hash_ = h;

  if (require_regular) {
    auto violations = check_tail_recursive(*this);
    if (!violations.empty()) throw GrammarError(0, violations.front().message);
  }
}

std::string Grammar::serialize() const {
  std::ostringstream out;
  for (const auto& a : alphabets_) {
    out << "[alphabet " << a.name << "]\n";
    for (const auto& v : a.values) {
      auto esc = escape_bytes(v);
      if (esc.starts_with('#')) esc = "\\x23" + esc.substr(1);
      // Protect leading/trailing blanks, which the reader would otherwise keep
      // but editors tend to strip.
      if (!esc.empty() && (esc.back() == ' ')) esc = esc.substr(0, esc.size() - 1) + "\\x20";
      if (!esc.empty() && (esc.front() == ' ')) esc = "\\x20" + esc.substr(1);
      out << esc << '\n';
    }
  }
  out << "[rule]\n";
  for (const auto& line : lines_) {
    out << line.lhs << " ->";
    for (std::size_t i = 0; i < line.alternatives.size(); ++i) {
      out << (i == 0 ? " " : " | ");
      const auto& alt = line.alternatives[i];
      if (alt.empty()) out << "ε";
      for (std::size_t k = 0; k < alt.size(); ++k) out << (k ? " + " : "") << alt[k];
    }
    out << '\n';
  }
  for (const auto& r : requests_) {
    out << "[request " << r.name << "]\n";
    out << "method = " << escape_bytes(r.method) << '\n';
    if (!r.path.empty()) out << "path = " << pieces_to_string(r.path) << '\n';
    for (const auto& h : r.headers) out << "header = " << pieces_to_string(h) << '\n';
    if (!r.body.empty()) out << "body = " << pieces_to_string(r.body) << '\n';
    if (!r.produces.empty()) {
      out << "produces = ";
      for (std::size_t i = 0; i < r.produces.size(); ++i) out << (i ? ", " : "") << r.produces[i];
      out << '\n';
    }
  }
  return out.str();
}

Grammar load_grammar(const std::string& path) { return Grammar::parse(read_file(path)); }

void save_grammar(const Grammar& g, const std::string& path) { write_file(path, g.serialize()); }

std::vector<RuleId> terminal_rules(const Grammar& g) {
  std::vector<RuleId> out;
  for (RuleId id = 0; id < g.size(); ++id)
    if (g.rule(id).kind == RuleKind::terminal) out.push_back(id);
  return out;
}

std::vector<TailRecursionViolation> check_tail_recursive(const Grammar& g) {
  const auto& nts = g.nonterminals();
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < nts.size(); ++i) index[nts[i]] = i;

  // reach[a][b]: b derivable (as some symbol) from a in one or more steps.
  std::vector<std::vector<bool>> reach(nts.size(), std::vector<bool>(nts.size(), false));
  for (const auto& r : g.rules())
    for (const auto& s : r.rhs) reach[index[r.lhs]][index[s]] = true;
  for (std::size_t k = 0; k < nts.size(); ++k)
    for (std::size_t i = 0; i < nts.size(); ++i)
      if (reach[i][k])
        for (std::size_t j = 0; j < nts.size(); ++j)
          if (reach[k][j]) reach[i][j] = true;

  std::vector<TailRecursionViolation> out;
  for (RuleId id = 0; id < g.size(); ++id) {
    const auto& r = g.rule(id);
    if (r.kind != RuleKind::structural) continue;
    auto a = index[r.lhs];
    for (std::size_t i = 0; i + 1 < r.rhs.size(); ++i) {
      auto x = index[r.rhs[i]];
      if (x == a || reach[x][a]) {
        out.push_back({id, r.rhs[i],
                       "rule " + rule_to_string(g, id) + ": '" + r.rhs[i] +
                           "' recurses into '" + r.lhs + "' from a non-rightmost position"});
        break;
      }
    }
  }
  return out;
}

std::size_t derivation_stack_bound(const Grammar& g) {
  const auto& nts = g.nonterminals();
  std::map<std::string, std::size_t> h;
  for (const auto& n : nts) h[n] = 1;
  for (std::size_t iter = 0; iter <= nts.size() + 1; ++iter) {
    bool changed = false;
    for (const auto& r : g.rules()) {
      if (r.kind != RuleKind::structural) continue;
      std::size_t best = h[r.lhs];
      for (std::size_t i = 0; i < r.rhs.size(); ++i)
        best = std::max(best, (r.rhs.size() - 1 - i) + h[r.rhs[i]]);
      if (best != h[r.lhs]) {
        h[r.lhs] = best;
        changed = true;
      }
    }
    if (!changed) return g.start_symbol().empty() ? 0 : h[g.start_symbol()];
  }
  return SIZE_MAX;
}

std::string rule_to_string(const Grammar& g, RuleId id) {
  const auto& r = g.rule(id);
  std::string out = r.lhs + " -> ";
  switch (r.kind) {
    case RuleKind::epsilon: out += "ε"; break;
    case RuleKind::terminal: out += '"' + escape_bytes(r.value) + '"'; break;
    case RuleKind::structural:
      for (std::size_t i = 0; i < r.rhs.size(); ++i) out += (i ? " + " : "") + r.rhs[i];
      break;
  }
  return out;
}

}  // namespace seqfuzz
