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
#include <functional>
#include <string>
#include <vector>

#include "seqfuzz/autoencoder.hpp"
#include "seqfuzz/grammar.hpp"
#include "seqfuzz/parser.hpp"
#include "seqfuzz/util.hpp"

namespace seqfuzz {

class MutationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class NoiseNorm { z, delta };

struct PerturbOptions {
  NoiseNorm norm = NoiseNorm::z;
  // Replaces the N(0, I) draw for scale j; tests use it to force noise.
  std::function<Embedding(int j, Eigen::Index dim, Rng& rng)> noise;
};

struct PerturbResult {
  std::vector<RuleId> x_min;
  int scale_exponent = 0;
  bool differs = false;
};

// 2^j · d / norm; a zero norm falls back to 1.
Embedding scale_noise(const Embedding& d, int j, double norm);

// Draws all n_scales noise vectors up front, then decodes z + δ_j for
// j = 0, 1, ... and stops at the first decode that differs from x.
PerturbResult perturb_and_select(const Model& m, const RuleSequence& x, int n_scales, Rng& rng,
                                 const PerturbOptions& opts = {});

enum class MutationCase { case1, case2 };

struct ByteNoise {
  std::size_t offset = 0;
  std::uint8_t byte = 0;
  bool operator==(const ByteNoise&) const = default;
};

struct MutationPlan {
  std::size_t target_leaf = 0;  // leaf ordinal
  RuleId new_rule = 0;
  MutationCase kase = MutationCase::case1;
  std::vector<ByteNoise> byte_noise;  // applied to the new rule's rendered text
};

struct PlanOptions {
  bool mutate_dependencies = false;
  int k_max = 4;
};

// Case 1 plans (common leaves × rules unseen in x) then Case 2 plans
// (differing leaves × rules of x_min), leaves in ordinal order.
std::vector<MutationPlan> plan_learned_mutations(const RuleSequence& x, const PerturbResult& pr, const Grammar& g,
                                                 Rng& rng, const PlanOptions& opts = {});

// Text a rule renders to before pollution (a fresh UUID for `<uuid>`).
std::string terminal_text(const Grammar& g, RuleId rule, Rng& rng);

// Flips the target leaf; with `with_noise`, the polluted text is stored
// as the leaf's raw payload. Dependency rules never carry payloads.
RuleSequence apply_plan(const RuleSequence& x, const MutationPlan& plan, const Grammar& g, bool with_noise = true);

// k ∈ [1, min(k_max, |value|)] distinct offsets, each with a byte that
// differs from the original.
std::vector<ByteNoise> draw_byte_noise(std::string_view value, Rng& rng, int k_max);
std::string apply_byte_noise(std::string value, const std::vector<ByteNoise>& noise);
std::string augment_random_bytes(std::string_view value, Rng& rng, int k_max);

// Replaces one uniformly chosen byte with a different uniformly chosen byte.
std::string mutate_bytes(std::string_view raw, Rng& rng);
// Same over the concatenation of several messages; returns the message
// index and offset that changed.
std::pair<std::size_t, std::size_t> mutate_bytes(std::vector<std::string>& messages, Rng& rng);

// Leaves eligible as mutation targets (ordinals).
std::vector<std::size_t> mutable_leaves(const RuleSequence& x, const Grammar& g, bool mutate_dependencies);

// Random tree-level baseline: one eligible leaf flipped to any terminal rule.
RuleSequence mutate_tree_random(const RuleSequence& x, const Grammar& g, Rng& rng, bool mutate_dependencies = false,
                                MutationPlan* chosen = nullptr);

std::string case_name(MutationCase c);

// One executed plan for the mutation log.
struct MutationLogEntry {
  std::string seed_id;
  std::size_t leaf = 0;
  std::string kase;  // case1, case2, tree, byte
  RuleId rule = 0;
  std::vector<std::size_t> offsets;
  int status = 0;
};

std::string mutation_log_header();
std::string format_log_line(const MutationLogEntry& e);

}  // namespace seqfuzz
