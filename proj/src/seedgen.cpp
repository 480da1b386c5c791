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

#include "seqfuzz/seedgen.hpp"

#include <algorithm>
#include <cstdio>
#include <functional>
#include <filesystem>
#include <set>

#include "seqfuzz/util.hpp"

namespace seqfuzz {

namespace {

bool is_dependency(const Piece& p) { return p.slot == "producer" || p.slot == "consumer"; }

std::set<std::string> consumed(const RequestDef& def) {
  std::set<std::string> out;
  auto scan = [&](const std::vector<Piece>& pieces) {
    for (const auto& p : pieces)
      if (!p.literal && p.slot == "consumer") out.insert(p.resource);
  };
  scan(def.path);
  for (const auto& h : def.headers) scan(h);
  scan(def.body);
  return out;
}

std::set<std::string> produced(const RequestDef& def) {
  std::set<std::string> out(def.produces.begin(), def.produces.end());
  auto scan = [&](const std::vector<Piece>& pieces) {
    for (const auto& p : pieces)
      if (!p.literal && p.slot == "producer") out.insert(p.resource);
  };
  scan(def.path);
  for (const auto& h : def.headers) scan(h);
  scan(def.body);
  return out;
}

// Slots in layout order: path, header lines, body.
std::vector<const Piece*> fuzzable_slots(const RequestDef& def) {
  std::vector<const Piece*> out;
  auto scan = [&](const std::vector<Piece>& pieces) {
    for (const auto& p : pieces)
      if (!p.literal && !is_dependency(p)) out.push_back(&p);
  };
  scan(def.path);
  for (const auto& h : def.headers) scan(h);
  scan(def.body);
  return out;
}

std::vector<std::size_t> slot_sizes(const Grammar& g, const RequestDef& def, int d) {
  std::vector<std::size_t> sizes;
  for (const auto* p : fuzzable_slots(def)) {
    const auto* a = g.alphabet_for(p->slot);
    auto n = a ? a->values.size() : 0;
    sizes.push_back(std::min<std::size_t>(n, static_cast<std::size_t>(d)));
  }
  return sizes;
}

std::uint64_t rendering_count(const Grammar& g, const RequestDef& def, int d) {
  std::uint64_t n = 1;
  for (auto s : slot_sizes(g, def, d)) n *= s;
  return n;
}

void for_each_sequence(const Grammar& g, int max_len,
                       const std::function<bool(const std::vector<std::size_t>&)>& visit) {
  const auto& defs = g.requests();
  std::vector<std::set<std::string>> needs, gives;
  for (const auto& def : defs) {
    needs.push_back(consumed(def));
    gives.push_back(produced(def));
  }
  // Frontier of length-k sequences with their available resources.
  struct Node {
    std::vector<std::size_t> seq;
    std::set<std::string> have;
  };
  std::vector<Node> frontier{{}};
  for (int k = 1; k <= max_len && !frontier.empty(); ++k) {
    std::vector<Node> next;
    for (const auto& node : frontier) {
      for (std::size_t t = 0; t < defs.size(); ++t) {
        if (std::find(node.seq.begin(), node.seq.end(), t) != node.seq.end()) continue;
        if (!std::includes(node.have.begin(), node.have.end(), needs[t].begin(), needs[t].end())) continue;
        Node child{node.seq, node.have};
        child.seq.push_back(t);
        child.have.insert(gives[t].begin(), gives[t].end());
        if (!visit(child.seq)) return;
        if (k < max_len) next.push_back(std::move(child));
      }
    }
    frontier = std::move(next);
  }
}

}  // namespace

std::vector<WireRequest> renderings(const Grammar& g, const RequestDef& def, int d) {
  if (d < 1) throw std::invalid_argument("dict_values_per_type must be at least 1");
  auto sizes = slot_sizes(g, def, d);
  std::vector<WireRequest> out;
  if (std::find(sizes.begin(), sizes.end(), 0u) != sizes.end()) return out;
  std::vector<std::size_t> odo(sizes.size(), 0);
  while (true) {
    std::size_t slot = 0;
    auto fill = [&](const std::vector<Piece>& pieces) {
      std::string s;
      for (const auto& p : pieces) {
        if (p.literal) {
          s += p.text;
        } else if (is_dependency(p)) {
          s += placeholder_text(p.slot == "producer" ? DependencyRole::producer : DependencyRole::consumer,
                                p.resource);
        } else {
          s += g.alphabet_for(p.slot)->values[odo[slot++]];
        }
      }
      return s;
    };
    WireRequest w;
    w.method = def.method;
    w.target = fill(def.path);
    for (const auto& h : def.headers) {
      auto line = fill(h);
      if (!line.empty() && line.back() == '\n') line.pop_back();
      if (!line.empty()) w.header_lines.push_back(line);
    }
    w.body = fill(def.body);
    w.produces = def.produces;
    out.push_back(std::move(w));
    std::size_t i = odo.size();
    while (i > 0 && ++odo[i - 1] == sizes[i - 1]) odo[--i] = 0;
    if (i == 0) break;
  }
  return out;
}

std::vector<std::vector<std::size_t>> feasible_sequences(const Grammar& g, int max_len) {
  std::vector<std::vector<std::size_t>> out;
  for_each_sequence(g, max_len, [&](const std::vector<std::size_t>& s) {
    out.push_back(s);
    return true;
  });
  return out;
}

SeedCorpus generate_seeds(const Grammar& g, const SeedGenOptions& opts) {
  if (g.requests().empty()) throw std::invalid_argument("grammar declares no request");
  std::vector<std::vector<WireRequest>> rendered;
  for (const auto& def : g.requests()) rendered.push_back(renderings(g, def, opts.dict_values_per_type));
  SeedCorpus corpus;
  for_each_sequence(g, opts.max_len, [&](const std::vector<std::size_t>& seq) {
    for (std::size_t t : seq)
      if (rendered[t].empty()) return true;
    for (const auto& last : rendered[seq.back()]) {
      if (opts.max_seeds && corpus.seeds.size() == opts.max_seeds) {
        corpus.partial = true;
        return false;
      }
      Seed s;
      char id[32];
      std::snprintf(id, sizeof id, "seed_%06zu", corpus.seeds.size() + 1);
      s.id = id;
      for (std::size_t i = 0; i + 1 < seq.size(); ++i) s.requests.push_back(rendered[seq[i]].front());
      s.requests.push_back(last);
      for (auto t : seq) s.kinds.push_back(g.requests()[t].name);
      corpus.seeds.push_back(std::move(s));
    }
    return true;
  });
  return corpus;
}

StateSpace count_state_space(const Grammar& g, int max_len, int d) {
  StateSpace ss;
  ss.sequences.assign(static_cast<std::size_t>(std::max(max_len, 0)), 0);
  ss.renderings.assign(ss.sequences.size(), 0);
  std::vector<std::uint64_t> per_type;
  for (const auto& def : g.requests()) per_type.push_back(rendering_count(g, def, d));
  for_each_sequence(g, max_len, [&](const std::vector<std::size_t>& seq) {
    ++ss.sequences[seq.size() - 1];
    ss.renderings[seq.size() - 1] += per_type[seq.back()];
    return true;
  });
  return ss;
}

void write_corpus(const SeedCorpus& corpus, const std::string& dir) {
  std::filesystem::create_directories(dir);
  std::string index = "seed_id\tlength\tkinds\n";
  for (const auto& s : corpus.seeds) {
    write_file(dir + "/" + s.id + ".seed", format_seed_text(s.requests));
    std::string kinds;
    for (std::size_t i = 0; i < s.kinds.size(); ++i) kinds += (i ? "," : "") + s.kinds[i];
    index += s.id + '\t' + std::to_string(s.requests.size()) + '\t' + kinds + '\n';
  }
  write_file(dir + "/index.tsv", index);
}

std::vector<SeedFile> read_corpus(const std::string& dir) {
  std::vector<SeedFile> out;
  auto lines = split(read_file(dir + "/index.tsv"), '\n');
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    auto id = split(lines[i], '\t').front();
    out.push_back({id, read_file(dir + "/" + id + ".seed")});
  }
  return out;
}

}  // namespace seqfuzz
