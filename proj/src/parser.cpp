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

#include "seqfuzz/parser.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <unordered_set>

#include "seqfuzz/util.hpp"

namespace seqfuzz {

namespace {

enum Section : int { kNoSection = 0, kMethod = 1, kPath = 2, kHeader = 3, kBody = 4 };

int section_of(std::string_view nonterminal) {
  if (nonterminal == kMethodSymbol) return kMethod;
  if (nonterminal == kPathSymbol) return kPath;
  if (nonterminal == kHeaderSymbol) return kHeader;
  if (nonterminal == kBodySymbol) return kBody;
  return kNoSection;
}

bool looks_like_uuid(std::string_view s) {
  if (s.size() < 36) return false;
  for (std::size_t i = 0; i < 36; ++i) {
    char c = s[i];
    bool dash = i == 8 || i == 13 || i == 18 || i == 23;
    if (dash ? c != '-' : !std::isxdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

struct Item {
  std::size_t request;
  int section;
  RuleId rule;
};

// Nonterminals reachable from each section symbol.
std::map<int, std::set<std::string>> section_reach(const Grammar& g) {
  std::map<int, std::set<std::string>> out;
  for (const auto& nt : g.nonterminals()) {
    int sec = section_of(nt);
    if (sec == kNoSection) continue;
    auto& seen = out[sec];
    std::vector<std::string> todo{nt};
    while (!todo.empty()) {
      auto cur = todo.back();
      todo.pop_back();
      if (!seen.insert(cur).second) continue;
      for (auto id : g.rules_for(cur)) {
        const Rule& r = g.rule(id);
        if (r.kind != RuleKind::structural) continue;
        for (const auto& sym : r.rhs)
          if (section_of(sym) == kNoSection || section_of(sym) == sec) todo.push_back(sym);
      }
    }
  }
  return out;
}

// Matches concrete section text against a layout's pieces, backtracking
// over slot extents. Emits one item per piece.
class LayoutMatcher {
 public:
  LayoutMatcher(const Grammar& g, std::size_t request, std::vector<Item>& items,
                std::vector<std::pair<std::string, std::string>>& binds)
      : g_(g), request_(request), items_(items), binds_(binds) {}

  bool match(const std::vector<Piece>& pieces, int section, std::string_view text) {
    section_ = section;
    return step(pieces, 0, text, 0);
  }

 private:
  bool emit_and_continue(const std::vector<Piece>& pieces, std::size_t idx, std::string_view text,
                         std::size_t next, RuleId rule) {
    auto mark = items_.size();
    auto bmark = binds_.size();
    items_.push_back(Item{request_, section_, rule});
    if (step(pieces, idx + 1, text, next)) return true;
    items_.resize(mark);
    binds_.resize(bmark);
    return false;
  }

  bool step(const std::vector<Piece>& pieces, std::size_t idx, std::string_view text, std::size_t pos) {
    if (idx == pieces.size()) return pos == text.size();
    const Piece& p = pieces[idx];
    std::string_view rest = text.substr(pos);
    if (p.literal) {
      if (!starts_with(rest, p.text)) return false;
      auto rule = g_.find_terminal(kStaticSymbol, p.text);
      return rule && emit_and_continue(pieces, idx, text, pos + p.text.size(), *rule);
    }
    if (p.slot == "producer" || p.slot == "consumer") {
      auto rule = g_.find_terminal(p.slot, p.resource);
      if (!rule) return false;
      auto role = p.slot == "producer" ? DependencyRole::producer : DependencyRole::consumer;
      auto marker = placeholder_text(role, p.resource);
      if (starts_with(rest, marker) && emit_and_continue(pieces, idx, text, pos + marker.size(), *rule))
        return true;
      const Piece* next = idx + 1 < pieces.size() ? &pieces[idx + 1] : nullptr;
      for (std::size_t end = pos + 1; end <= text.size(); ++end) {
        if (next && next->literal && !starts_with(text.substr(end), next->text)) continue;
        if (!next && end != text.size()) continue;
        // A concrete id is one path segment and never holds a placeholder.
        auto value = text.substr(pos, end - pos);
        if (value.find("{{") != std::string_view::npos) break;
        if (section_ == kPath && value.find('/') != std::string_view::npos) break;
        auto bmark = binds_.size();
        binds_.emplace_back(p.resource, std::string(value));
        if (emit_and_continue(pieces, idx, text, end, *rule)) return true;
        binds_.resize(bmark);
      }
      return false;
    }
    for (auto id : g_.rules_for(p.slot)) {
      const Rule& r = g_.rule(id);
      if (r.kind != RuleKind::terminal) continue;
      if (r.value == kUuidValue && looks_like_uuid(rest) &&
          emit_and_continue(pieces, idx, text, pos + 36, id))
        return true;
      if (starts_with(rest, r.value) && emit_and_continue(pieces, idx, text, pos + r.value.size(), id))
        return true;
    }
    return false;
  }

  const Grammar& g_;
  std::size_t request_;
  int section_ = kNoSection;
  std::vector<Item>& items_;
  std::vector<std::pair<std::string, std::string>>& binds_;
};

// Matches one wire request against a request definition.
bool match_request(const Grammar& g, const RequestDef& def, const WireRequest& raw, std::size_t request,
                   std::vector<Item>& items, std::vector<std::pair<std::string, std::string>>& binds) {
  if (raw.method != def.method) return false;
  if (raw.header_lines.size() != def.headers.size()) return false;
  auto mark = items.size();
  auto bmark = binds.size();
  auto fail = [&] {
    items.resize(mark);
    binds.resize(bmark);
    return false;
  };
  auto method_rule = g.find_terminal(kMethodSymbol, raw.method);
  if (!method_rule) return false;
  items.push_back(Item{request, kMethod, *method_rule});

  LayoutMatcher m(g, request, items, binds);
  if (!m.match(def.path, kPath, raw.target)) return fail();

  std::vector<bool> used(raw.header_lines.size(), false);
  for (const auto& layout_line : def.headers) {
    bool found = false;
    for (std::size_t i = 0; i < raw.header_lines.size() && !found; ++i) {
      if (used[i]) continue;
      if (m.match(layout_line, kHeader, raw.header_lines[i] + "\n")) {
        used[i] = true;
        found = true;
      }
    }
    if (!found) return fail();
  }
  if (!m.match(def.body, kBody, raw.body)) return fail();
  return true;
}

// Fallback for a request no definition matches: each section is split
// into terminal values (longest first) and the method may be any
// terminal value, as a flipped leaf.
class Segmenter {
 public:
  Segmenter(const Grammar& g, std::size_t request, std::vector<Item>& items)
      : g_(g), request_(request), items_(items) {
    for (const auto& [sec, nts] : section_reach(g)) {
      auto& list = candidates_[sec];
      for (RuleId id = 0; id < g.size(); ++id)
        if (g.rule(id).kind == RuleKind::terminal && !g.rule(id).value.empty()) list.push_back(id);
      // Longest text first; on ties, rules native to the section.
      std::stable_sort(list.begin(), list.end(), [&](RuleId a, RuleId b) {
        auto la = text_of(a).size(), lb = text_of(b).size();
        if (la != lb) return la > lb;
        return nts.count(g.rule(a).lhs) > nts.count(g.rule(b).lhs);
      });
    }
  }

  bool request(const WireRequest& raw) {
    auto mark = items_.size();
    auto method = g_.find_terminal(kMethodSymbol, raw.method);
    for (RuleId id = 0; !method && id < g_.size(); ++id)
      if (g_.rule(id).kind == RuleKind::terminal && text_of(id) == raw.method) method = id;
    if (!method) return false;
    items_.push_back(Item{request_, kMethod, *method});
    std::string headers;
    for (const auto& line : raw.header_lines) headers += line + "\n";
    // The last header line may lack its newline.
    bool ok = section(kPath, raw.target) &&
              (section(kHeader, headers) ||
               (!headers.empty() && section(kHeader, std::string_view(headers).substr(0, headers.size() - 1)))) &&
              section(kBody, raw.body);
    if (!ok) items_.resize(mark);
    return ok;
  }

 private:
  std::string text_of(RuleId id) const {
    const Rule& r = g_.rule(id);
    if (r.role != DependencyRole::none) return placeholder_text(r.role, r.value);
    return r.value;
  }

  bool section(int sec, std::string_view text) {
    failed_.clear();
    auto mark = items_.size();
    if (step(sec, text, 0)) return true;
    items_.resize(mark);
    return false;
  }

  bool step(int sec, std::string_view text, std::size_t pos) {
    if (pos == text.size()) return true;
    if (failed_.count(pos)) return false;
    auto rest = text.substr(pos);
    for (auto id : candidates_[sec]) {
      std::size_t len = 0;
      if (g_.rule(id).value == kUuidValue) {
        if (looks_like_uuid(rest)) len = 36;
      } else if (auto t = text_of(id); starts_with(rest, t)) {
        len = t.size();
      }
      if (!len) continue;
      items_.push_back(Item{request_, sec, id});
      if (step(sec, text, pos + len)) return true;
      items_.pop_back();
    }
    failed_.insert(pos);
    return false;
  }

  const Grammar& g_;
  std::size_t request_;
  std::vector<Item>& items_;
  std::map<int, std::vector<RuleId>> candidates_;
  std::set<std::size_t> failed_;
};

// Leftmost-derivation search producing the DFS rule order for `items`.
class Deriver {
 public:
  Deriver(const Grammar& g, const std::vector<Item>& items) : g_(g), items_(items), reach_(section_reach(g)) {
    const auto& nts = g.nonterminals();
    for (std::size_t i = 0; i < nts.size(); ++i) {
      index_[nts[i]] = static_cast<int>(i);
      sections_.push_back(section_of(nts[i]));
      if (nts[i] == kRequestSymbol) request_nt_ = static_cast<int>(i);
    }
  }

  bool run(std::vector<RuleId>& out) {
    if (g_.start_symbol().empty()) return false;
    std::vector<Frame> stack{{index_.at(g_.start_symbol()), kNoSection, request_nt_ >= 0 ? -1 : 0}};
    if (!search(stack, 0, 0)) return false;
    out = std::move(out_);
    return true;
  }

 private:
  struct Frame {
    int nt;
    int section;
    int request;
  };

  std::string key(const std::vector<Frame>& stack, std::size_t pos, int next_req) const {
    std::string k;
    k.reserve(8 + stack.size() * 6);
    auto put = [&k](int v) { k.append(reinterpret_cast<const char*>(&v), sizeof(v)); };
    put(static_cast<int>(pos));
    put(next_req);
    for (const auto& f : stack) {
      put(f.nt);
      put(f.section * 65536 + f.request + 1);
    }
    return k;
  }

  bool search(std::vector<Frame>& stack, std::size_t pos, int next_req) {
    if (stack.empty()) return pos == items_.size();
    auto k = key(stack, pos, next_req);
    if (failed_.count(k) || active_.count(k)) return false;
    active_.insert(k);

    Frame f = stack.back();
    stack.pop_back();
    const auto& name = g_.nonterminals()[f.nt];
    for (auto id : g_.rules_for(name)) {
      const Rule& r = g_.rule(id);
      out_.push_back(id);
      bool ok = false;
      switch (r.kind) {
        case RuleKind::epsilon:
          ok = search(stack, pos, next_req);
          break;
        case RuleKind::terminal:
          if (pos < items_.size() && items_[pos].rule == id && items_[pos].section == f.section &&
              static_cast<int>(items_[pos].request) == f.request)
            ok = search(stack, pos + 1, next_req);
          break;
        case RuleKind::structural: {
          auto mark = stack.size();
          int req = next_req;
          std::vector<Frame> children;
          for (const auto& sym : r.rhs) {
            int nt = index_.at(sym);
            int sec = sections_[nt] != kNoSection ? sections_[nt] : f.section;
            int rq = nt == request_nt_ ? req++ : f.request;
            children.push_back(Frame{nt, sec, rq});
          }
          for (auto it = children.rbegin(); it != children.rend(); ++it) stack.push_back(*it);
          ok = search(stack, pos, req);
          if (!ok) stack.resize(mark);
          break;
        }
      }
      if (ok) return true;
      out_.pop_back();
    }
    // A terminal from outside its section (a flipped leaf, e.g. an enum
    // value as the method) sits under any leaf parent of that section.
    if (pos < items_.size() && g_.is_leaf_parent(name) && items_[pos].section == f.section &&
        static_cast<int>(items_[pos].request) == f.request) {
      const Rule& r = g_.rule(items_[pos].rule);
      auto sec = reach_.find(f.section);
      if (r.lhs != name && (sec == reach_.end() || !sec->second.count(r.lhs))) {
        out_.push_back(items_[pos].rule);
        if (search(stack, pos + 1, next_req)) {
          active_.erase(k);
          return true;
        }
        out_.pop_back();
      }
    }
    stack.push_back(f);
    active_.erase(k);
    failed_.insert(std::move(k));
    return false;
  }

  const Grammar& g_;
  const std::vector<Item>& items_;
  std::map<int, std::set<std::string>> reach_;
  std::map<std::string, int, std::less<>> index_;
  std::vector<int> sections_;
  int request_nt_ = -1;
  std::vector<RuleId> out_;
  std::unordered_set<std::string> failed_;
  std::unordered_set<std::string> active_;
};

// Walks tokens as a leftmost derivation, reporting the expected frame of
// each token. Returns an error string, empty on success.
struct WalkFrame {
  std::string symbol;
  int section;
};

template <typename Visit>
std::string walk(const std::vector<RuleId>& tokens, const Grammar& g, bool leaf_wildcard,
                 std::size_t* max_stack, Visit&& visit) {
  std::vector<WalkFrame> stack;
  if (!g.start_symbol().empty()) stack.push_back({g.start_symbol(), kNoSection});
  std::size_t peak = stack.size();
  for (std::size_t p = 0; p < tokens.size(); ++p) {
    if (tokens[p] >= g.size()) return "token " + std::to_string(p) + " is not a rule id";
    if (stack.empty()) return "token " + std::to_string(p) + " after derivation completed";
    WalkFrame f = stack.back();
    stack.pop_back();
    const Rule& r = g.rule(tokens[p]);
    if (r.lhs != f.symbol) {
      bool flipped_leaf = leaf_wildcard && r.kind == RuleKind::terminal && g.is_leaf_parent(f.symbol);
      if (!flipped_leaf)
        return "token " + std::to_string(p) + " (" + rule_to_string(g, tokens[p]) + ") where '" + f.symbol +
               "' was expected";
    }
    visit(p, f, r);
    for (auto it = r.rhs.rbegin(); it != r.rhs.rend(); ++it) {
      int sec = section_of(*it);
      stack.push_back({*it, sec != kNoSection ? sec : f.section});
    }
    peak = std::max(peak, stack.size());
  }
  if (max_stack) *max_stack = peak;
  if (!stack.empty()) return "derivation incomplete: '" + stack.back().symbol + "' unresolved";
  return {};
}

std::string escape_line_end(std::string s) {
  if (!s.empty() && s.back() == ' ') s = s.substr(0, s.size() - 1) + "\\x20";
  return s;
}

}  // namespace

RuleSequence make_sequence(std::vector<RuleId> tokens, const Grammar& g) {
  RuleSequence x;
  x.tokens = std::move(tokens);
  x.grammar_hash = g.hash();
  for (std::size_t p = 0; p < x.tokens.size(); ++p) {
    if (x.tokens[p] >= g.size()) continue;
    const Rule& r = g.rule(x.tokens[p]);
    if (r.kind == RuleKind::terminal) x.leaf_index.push_back(p);
    if (r.lhs == kRequestSymbol) x.request_boundaries.push_back(p);
  }
  return x;
}

std::string placeholder_text(DependencyRole role, std::string_view resource) {
  return std::string("{{") + (role == DependencyRole::producer ? "producer:" : "consumer:") +
         std::string(resource) + "}}";
}

std::string Request::path_text() const {
  std::string s;
  for (const auto& p : path) s += p.text;
  return s;
}

std::string Request::header_text() const {
  std::string s;
  for (const auto& p : header) s += p.text;
  return s;
}

std::string Request::body_text() const {
  std::string s;
  for (const auto& p : body) s += p.text;
  return s;
}

WireRequest Request::wire() const {
  WireRequest w;
  w.method = method.text;
  w.target = path_text();
  for (auto& line : split(header_text(), '\n'))
    if (!line.empty()) w.header_lines.push_back(std::move(line));
  w.body = body_text();
  w.produces = produces;
  return w;
}

std::vector<WireRequest> TestCase::wire() const {
  std::vector<WireRequest> out;
  for (const auto& r : requests) out.push_back(r.wire());
  return out;
}

std::string to_http_message(const WireRequest& w) {
  std::string m = w.method + ' ' + w.target + " HTTP/1.1\r\n";
  for (const auto& h : w.header_lines) m += h + "\r\n";
  m += "\r\n";
  m += w.body;
  return m;
}

std::optional<WireRequest> from_http_message(std::string_view message) {
  auto head_end = message.find("\r\n\r\n");
  if (head_end == std::string_view::npos) return std::nullopt;
  auto lines = split(message.substr(0, head_end), '\n');
  for (auto& l : lines) {
    if (l.empty() || l.back() != '\r') {
      if (&l != &lines.back()) return std::nullopt;
    } else {
      l.pop_back();
    }
  }
  auto parts = split(lines.front(), ' ');
  if (parts.size() != 3 || !starts_with(parts[2], "HTTP/")) return std::nullopt;
  WireRequest w;
  w.method = parts[0];
  w.target = parts[1];
  for (std::size_t i = 1; i < lines.size(); ++i) w.header_lines.push_back(lines[i]);
  w.body = std::string(message.substr(head_end + 4));
  return w;
}

std::vector<WireRequest> parse_seed_text(std::string_view text) {
  std::vector<std::vector<std::string>> blocks;
  std::vector<std::string> current;
  for (auto line : split(text, '\n')) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) line.pop_back();
    if (line.empty()) {
      if (!current.empty()) blocks.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(std::move(line));
    }
  }
  if (!current.empty()) blocks.push_back(std::move(current));

  std::vector<WireRequest> out;
  for (const auto& block : blocks) {
    if (starts_with(block.front(), "HTTP/")) continue;  // response block of a transcript
    auto parts = split(block.front(), ' ');
    if (parts.size() != 3 || !starts_with(parts[2], "HTTP/"))
      throw ParseError(out.size(), "malformed request line '" + block.front() + "'");
    WireRequest w;
    w.method = unescape_bytes(parts[0]);
    w.target = unescape_bytes(parts[1]);
    for (std::size_t i = 1; i < block.size(); ++i) {
      const auto& line = block[i];
      if (line.front() == '{' || line.front() == '[') {
        w.body = unescape_bytes(line);
      } else if (starts_with(line, "\\b")) {
        w.body = unescape_bytes(line.substr(2));
      } else {
        w.header_lines.push_back(unescape_bytes(line));
      }
    }
    out.push_back(std::move(w));
  }
  return out;
}

std::string format_seed_text(const std::vector<WireRequest>& requests) {
  std::string out;
  for (std::size_t i = 0; i < requests.size(); ++i) {
    const auto& w = requests[i];
    if (i) out += '\n';
    auto method = escape_bytes(w.method, true);
    if (starts_with(method, "HTTP/")) method = "\\x48" + method.substr(1);
    out += method + ' ' + escape_bytes(w.target, true) + " HTTP/1.1\n";
    for (const auto& h : w.header_lines) {
      if (h.empty()) continue;
      auto line = escape_line_end(escape_bytes(h));
      if (line.front() == '{') line = "\\x7b" + line.substr(1);
      if (line.front() == '[') line = "\\x5b" + line.substr(1);
      out += line + '\n';
    }
    if (!w.body.empty()) {
      auto body = escape_line_end(escape_bytes(w.body));
      if (body.front() != '{' && body.front() != '[') body = "\\b" + body;
      out += body + '\n';
    }
  }
  return out;
}

std::string canonicalize_seed_text(std::string_view text) {
  auto requests = parse_seed_text(text);
  for (auto& r : requests) std::sort(r.header_lines.begin(), r.header_lines.end());
  return format_seed_text(requests);
}

RuleSequence parse_test_case(const std::vector<WireRequest>& raw, const Grammar& g, Bindings* observed) {
  std::vector<Item> items;
  std::vector<std::pair<std::string, std::string>> binds;
  std::vector<std::string> kinds;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    bool matched = false;
    for (const auto& def : g.requests()) {
      if (match_request(g, def, raw[i], i, items, binds)) {
        kinds.push_back(def.name);
        matched = true;
        break;
      }
    }
    if (!matched && Segmenter(g, i, items).request(raw[i])) {
      kinds.emplace_back();
      matched = true;
    }
    if (!matched) {
      if (!g.find_terminal(kMethodSymbol, raw[i].method))
        throw ParseError(i, "unknown terminal value '" + escape_bytes(raw[i].method) + "' in method");
      throw ParseError(i, "'" + escape_bytes(raw[i].method) + " " + escape_bytes(raw[i].target) +
                              "' matches no request definition (unknown terminal value or structure)");
    }
  }
  std::vector<RuleId> tokens;
  if (!Deriver(g, items).run(tokens)) throw ParseError(raw.size(), "no derivation under the grammar rules");
  RuleSequence x = make_sequence(std::move(tokens), g);
  x.request_kinds = std::move(kinds);
  if (observed)
    for (auto& [k, v] : binds) observed->values[k] = v;
  return x;
}

RuleSequence parse_test_case(std::string_view seed_text, const Grammar& g, Bindings* observed) {
  return parse_test_case(parse_seed_text(seed_text), g, observed);
}

TestCase render(const RuleSequence& x, const Grammar& g, const Bindings& bindings) {
  TestCase tc;
  Request* current = nullptr;
  auto start_request = [&] {
    tc.requests.emplace_back();
    current = &tc.requests.back();
    auto idx = tc.requests.size() - 1;
    if (idx < x.request_kinds.size()) {
      current->kind = x.request_kinds[idx];
      if (const auto* def = g.request(current->kind)) current->produces = def->produces;
    }
  };
  auto err = walk(x.tokens, g, true, nullptr, [&](std::size_t p, const WalkFrame& f, const Rule& r) {
    if (r.lhs == kRequestSymbol) start_request();
    if (r.kind != RuleKind::terminal) return;
    if (!current) start_request();
    RenderedPiece piece{r.lhs, {}, x.tokens[p], p};
    if (auto it = x.payloads.find(p); it != x.payloads.end()) {
      piece.text = it->second;
    } else if (r.role != DependencyRole::none) {
      auto b = bindings.values.find(r.value);
      if (b != bindings.values.end()) {
        piece.text = b->second;
      } else if (bindings.placeholder) {
        piece.text = placeholder_text(r.role, r.value);
      } else {
        throw ParseError(tc.requests.size() - 1, "unresolved " + r.lhs + " slot '" + r.value + "'");
      }
    } else if (r.value == kUuidValue && !bindings.placeholder) {
      Rng rng(bindings.uuid_seed * 1000003 + p);
      piece.text = random_uuid(rng);
    } else {
      piece.text = r.value;
    }
    switch (f.section) {
      case kMethod: current->method = std::move(piece); break;
      case kPath: current->path.push_back(std::move(piece)); break;
      case kHeader: current->header.push_back(std::move(piece)); break;
      case kBody: current->body.push_back(std::move(piece)); break;
      default: throw ParseError(tc.requests.size() - 1, "leaf outside of a request section");
    }
  });
  if (!err.empty()) throw ParseError(tc.requests.size(), err);
  return tc;
}

std::string render_seed_text(const RuleSequence& x, const Grammar& g, const Bindings& bindings) {
  return format_seed_text(render(x, g, bindings).wire());
}

LeafDiff leaf_diff(const RuleSequence& a, const RuleSequence& b) {
  LeafDiff d;
  auto n = std::min(a.leaf_index.size(), b.leaf_index.size());
  auto m = std::max(a.leaf_index.size(), b.leaf_index.size());
  for (std::size_t k = 0; k < n; ++k) {
    if (a.tokens[a.leaf_index[k]] == b.tokens[b.leaf_index[k]])
      d.common.push_back(k);
    else
      d.different.push_back(k);
  }
  for (std::size_t k = n; k < m; ++k) d.different.push_back(k);
  return d;
}

std::vector<RuleId> terminals(const RuleSequence& x, const Grammar& g) {
  std::set<RuleId> s;
  for (auto p : x.leaf_index)
    if (x.tokens[p] < g.size()) s.insert(x.tokens[p]);
  return {s.begin(), s.end()};
}

ReplayReport replay(const std::vector<RuleId>& tokens, const Grammar& g, bool leaf_wildcard) {
  ReplayReport rep;
  rep.error = walk(tokens, g, leaf_wildcard, &rep.max_stack, [](std::size_t, const WalkFrame&, const Rule&) {});
  rep.ok = rep.error.empty();
  return rep;
}

}  // namespace seqfuzz
