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

#include "seqfuzz/mutation.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace seqfuzz {

namespace {

std::uint8_t other_byte(std::uint8_t original, Rng& rng) {
  auto b = static_cast<std::uint8_t>(std::uniform_int_distribution<int>(0, 254)(rng));
  return b >= original ? static_cast<std::uint8_t>(b + 1) : b;
}

}  // namespace

Embedding scale_noise(const Embedding& d, int j, double norm) {
  double n = norm > 0 ? norm : 1.0;
  return d * static_cast<float>(std::ldexp(1.0, j) / n);
}

PerturbResult perturb_and_select(const Model& m, const RuleSequence& x, int n_scales, Rng& rng,
                                 const PerturbOptions& opts) {
  if (n_scales < 1) throw MutationError("n_scales must be at least 1");
  if (x.grammar_hash != m.grammar_hash()) throw ModelError("sequence was built against a different grammar");
  Embedding z = m.encode(x);
  const Eigen::Index dim = z.size();
  std::vector<Embedding> draws;
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int j = 0; j < n_scales; ++j) {
    if (opts.noise) {
      draws.push_back(opts.noise(j, dim, rng));
    } else {
      Embedding d(dim);
      for (Eigen::Index i = 0; i < dim; ++i) d(i) = static_cast<float>(normal(rng));
      draws.push_back(std::move(d));
    }
  }
  const double z_norm = z.norm();
  PerturbResult pr;
  for (int j = 0; j < n_scales; ++j) {
    double norm = opts.norm == NoiseNorm::z ? z_norm : static_cast<double>(draws[j].norm());
    Embedding zj = z + scale_noise(draws[j], j, norm);
    pr.x_min = m.decode(zj);
    pr.scale_exponent = j;
    pr.differs = pr.x_min != x.tokens;
    if (pr.differs) break;
  }
  return pr;
}

std::vector<std::size_t> mutable_leaves(const RuleSequence& x, const Grammar& g, bool mutate_dependencies) {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < x.leaf_index.size(); ++k)
    if (mutate_dependencies || g.rule(x.tokens[x.leaf_index[k]]).role == DependencyRole::none) out.push_back(k);
  return out;
}

std::string terminal_text(const Grammar& g, RuleId rule, Rng& rng) {
  const Rule& r = g.rule(rule);
  if (r.value == kUuidValue) return random_uuid(rng);
  return r.value;
}

std::vector<MutationPlan> plan_learned_mutations(const RuleSequence& x, const PerturbResult& pr, const Grammar& g,
                                                 Rng& rng, const PlanOptions& opts) {
  std::vector<MutationPlan> plans;
  auto eligible = mutable_leaves(x, g, opts.mutate_dependencies);
  std::vector<bool> is_eligible(x.leaf_count(), false);
  for (auto k : eligible) is_eligible[k] = true;

  std::vector<std::size_t> common, different;
  if (pr.differs) {
    auto decoded = make_sequence(pr.x_min, g);
    auto diff = leaf_diff(x, decoded);
    common = std::move(diff.common);
    different = std::move(diff.different);
  } else {
    for (std::size_t k = 0; k < x.leaf_count(); ++k) common.push_back(k);
  }

  auto add = [&](std::size_t leaf, RuleId rule, MutationCase c) {
    MutationPlan p{leaf, rule, c, {}};
    if (g.rule(rule).role == DependencyRole::none) {
      auto text = terminal_text(g, rule, rng);
      if (!text.empty()) p.byte_noise = draw_byte_noise(text, rng, opts.k_max);
    }
    plans.push_back(std::move(p));
  };

  auto seen = terminals(x, g);
  std::vector<RuleId> unseen;
  for (auto id : terminal_rules(g))
    if (!std::binary_search(seen.begin(), seen.end(), id)) unseen.push_back(id);
  for (auto leaf : common) {
    if (!is_eligible[leaf]) continue;
    for (auto rule : unseen) add(leaf, rule, MutationCase::case1);
  }

  if (pr.differs) {
    std::vector<RuleId> from_min;
    {
      std::vector<RuleId> leaves;
      for (auto id : pr.x_min)
        if (id < g.size() && g.rule(id).kind == RuleKind::terminal) leaves.push_back(id);
      std::sort(leaves.begin(), leaves.end());
      leaves.erase(std::unique(leaves.begin(), leaves.end()), leaves.end());
      from_min = std::move(leaves);
    }
    for (auto leaf : different) {
      if (leaf >= x.leaf_count() || !is_eligible[leaf]) continue;
      for (auto rule : from_min) add(leaf, rule, MutationCase::case2);
    }
  }
  return plans;
}

RuleSequence apply_plan(const RuleSequence& x, const MutationPlan& plan, const Grammar& g, bool with_noise) {
  if (plan.target_leaf >= x.leaf_count()) throw MutationError("plan targets a leaf past the end of the sequence");
  RuleSequence y = x;
  auto pos = y.leaf_index[plan.target_leaf];
  y.tokens[pos] = plan.new_rule;
  y.payloads.erase(pos);
  if (with_noise && !plan.byte_noise.empty() && g.rule(plan.new_rule).role == DependencyRole::none) {
    // The noise was drawn against this text; uuid leaves re-render one.
    Rng rng(plan.new_rule * 7919ULL + plan.target_leaf);
    y.payloads[pos] = apply_byte_noise(terminal_text(g, plan.new_rule, rng), plan.byte_noise);
  }
  return y;
}

std::vector<ByteNoise> draw_byte_noise(std::string_view value, Rng& rng, int k_max) {
  if (value.empty()) throw MutationError("cannot pollute an empty value");
  if (k_max < 1) throw MutationError("k_max must be at least 1");
  auto k_cap = std::min<std::size_t>(static_cast<std::size_t>(k_max), value.size());
  auto k = std::uniform_int_distribution<std::size_t>(1, k_cap)(rng);
  std::vector<std::size_t> positions(value.size());
  for (std::size_t i = 0; i < positions.size(); ++i) positions[i] = i;
  // Partial Fisher-Yates: the first k entries are distinct offsets.
  for (std::size_t i = 0; i < k; ++i) {
    auto j = std::uniform_int_distribution<std::size_t>(i, positions.size() - 1)(rng);
    std::swap(positions[i], positions[j]);
  }
  std::vector<ByteNoise> noise;
  for (std::size_t i = 0; i < k; ++i) {
    auto off = positions[i];
    noise.push_back({off, other_byte(static_cast<std::uint8_t>(value[off]), rng)});
  }
  std::sort(noise.begin(), noise.end(), [](const ByteNoise& a, const ByteNoise& b) { return a.offset < b.offset; });
  return noise;
}

std::string apply_byte_noise(std::string value, const std::vector<ByteNoise>& noise) {
  for (const auto& n : noise)
    if (n.offset < value.size()) value[n.offset] = static_cast<char>(n.byte);
  return value;
}

std::string augment_random_bytes(std::string_view value, Rng& rng, int k_max) {
  return apply_byte_noise(std::string(value), draw_byte_noise(value, rng, k_max));
}

std::string mutate_bytes(std::string_view raw, Rng& rng) {
  if (raw.empty()) throw MutationError("cannot mutate an empty input");
  std::string out(raw);
  auto pos = std::uniform_int_distribution<std::size_t>(0, out.size() - 1)(rng);
  out[pos] = static_cast<char>(other_byte(static_cast<std::uint8_t>(out[pos]), rng));
  return out;
}

std::pair<std::size_t, std::size_t> mutate_bytes(std::vector<std::string>& messages, Rng& rng) {
  std::size_t total = 0;
  for (const auto& m : messages) total += m.size();
  if (total == 0) throw MutationError("cannot mutate an empty input");
  auto pos = std::uniform_int_distribution<std::size_t>(0, total - 1)(rng);
  for (std::size_t i = 0; i < messages.size(); ++i) {
    if (pos < messages[i].size()) {
      auto& c = messages[i][pos];
      c = static_cast<char>(other_byte(static_cast<std::uint8_t>(c), rng));
      return {i, pos};
    }
    pos -= messages[i].size();
  }
  return {0, 0};
}

RuleSequence mutate_tree_random(const RuleSequence& x, const Grammar& g, Rng& rng, bool mutate_dependencies,
                                MutationPlan* chosen) {
  auto leaves = mutable_leaves(x, g, mutate_dependencies);
  if (leaves.empty()) throw MutationError("sequence has no mutable leaf");
  auto rules = terminal_rules(g);
  if (rules.empty()) throw MutationError("grammar has no terminal rule");
  MutationPlan plan;
  plan.target_leaf = leaves[std::uniform_int_distribution<std::size_t>(0, leaves.size() - 1)(rng)];
  plan.new_rule = rules[std::uniform_int_distribution<std::size_t>(0, rules.size() - 1)(rng)];
  if (chosen) *chosen = plan;
  return apply_plan(x, plan, g, false);
}

std::string case_name(MutationCase c) { return c == MutationCase::case1 ? "case1" : "case2"; }

std::string mutation_log_header() { return "seed_id\tleaf\tcase\trule\toffsets\tstatus"; }

std::string format_log_line(const MutationLogEntry& e) {
  std::string offsets;
  for (std::size_t i = 0; i < e.offsets.size(); ++i) offsets += (i ? "," : "") + std::to_string(e.offsets[i]);
  if (offsets.empty()) offsets = "-";
  return e.seed_id + '\t' + std::to_string(e.leaf) + '\t' + e.kase + '\t' + std::to_string(e.rule) + '\t' +
         offsets + '\t' + std::to_string(e.status);
}

}  // namespace seqfuzz
