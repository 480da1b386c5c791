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
#include <stdexcept>
#include <string>
#include <vector>

#include "seqfuzz/kernels.hpp"
#include "seqfuzz/parser.hpp"

namespace seqfuzz {

struct Hyperparams {
  int batch_size = 32;
  int steps = 2000;
  double learning_rate = 0.001;
  int embedding_dim = 100;
  int hidden_dim = 256;
  int max_seq_len = 192;
  std::uint64_t rng_seed = 1;
  // Feed z to the decoder at every step, not only as its initial state.
  bool z_per_step = true;
  bool shuffle = true;
  // Global gradient-norm clip; 0 disables.
  double clip_norm = 5.0;
};

class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Token ids: rule r is r + kFirstRuleToken.
inline constexpr int kPadToken = 0;
inline constexpr int kSosToken = 1;
inline constexpr int kEosToken = 2;
inline constexpr int kFirstRuleToken = 3;

// Single-layer GRU encoder/decoder over rule sequences. All parameters
// live in one flat array; `Layout` gives each tensor's offset.
template <typename T>
class ModelT {
 public:
  using Mat = kernels::Mat<T>;
  using Vec = kernels::Vec<T>;

  struct Layout {
    std::size_t emb, enc_wx, enc_wh, enc_bx, enc_bh, dec_wx, dec_wh, dec_bx, dec_bh, out_w, out_b, total;
  };

  ModelT() = default;
  ModelT(const Hyperparams& hp, std::size_t num_rules, std::uint64_t grammar_hash);

  const Hyperparams& hyperparams() const { return hp_; }
  int vocab_size() const { return vocab_; }
  std::uint64_t grammar_hash() const { return grammar_hash_; }
  int trained_steps() const { return trained_steps_; }
  void set_trained_steps(int s) { trained_steps_ = s; }
  const Layout& layout() const { return layout_; }
  std::vector<T>& params() { return params_; }
  const std::vector<T>& params() const { return params_; }
  bool all_finite() const;

  // Final encoder hidden state.
  Vec encode(const RuleSequence& x) const;
  Mat encode_batch(const std::vector<const RuleSequence*>& xs) const;
  // Greedy decoding from the given initial states (one column each),
  // stopping at <eos> or after max_seq_len tokens.
  std::vector<std::vector<RuleId>> decode_batch(const Mat& z) const;
  std::vector<RuleId> decode(const Vec& z) const;

  // Mean weighted cross-entropy of reconstructing each sequence; writes
  // the gradient w.r.t. params() when `grad` is non-null (overwritten).
  T loss(const std::vector<const RuleSequence*>& batch, std::vector<T>* grad) const;

  void save(const std::string& path) const;
  static ModelT load(const std::string& path);

 private:
  void check_sequence(const RuleSequence& x) const;
  std::vector<int> token_ids(const RuleSequence& x) const;

  Hyperparams hp_;
  int vocab_ = 0;
  std::uint64_t grammar_hash_ = 0;
  int trained_steps_ = 0;
  Layout layout_{};
  std::vector<T> params_;
};

using Model = ModelT<float>;
using Embedding = Model::Vec;

struct TrainReport {
  std::vector<double> losses;  // one per step
};

// Adam with teacher forcing; batches cycle through the corpus (shuffled
// per epoch when hp.shuffle is set).
Model train(const std::vector<RuleSequence>& corpus, const Grammar& g, const Hyperparams& hp,
            TrainReport* report = nullptr, const std::function<void(int, double)>& progress = {});

// Fraction of positions where greedy decode(encode(x)) matches x,
// counting length mismatch against the longer of the two.
double reconstruction_accuracy(const Model& m, const std::vector<RuleSequence>& corpus);

// Largest |analytic − central difference| / (|analytic| + eps) over
// `samples` parameters drawn from every tensor.
double numeric_gradient_check(const ModelT<double>& m, const RuleSequence& x, int samples = 200, double h = 1e-4,
                              std::uint64_t seed = 1, double eps = 1e-6);

}  // namespace seqfuzz
