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

#include <cmath>
#include <filesystem>
#include <set>

#include "seqfuzz/autoencoder.hpp"
#include "seqfuzz/kernels.hpp"
#include "test_support.hpp"

using namespace seqfuzz;
using seqfuzz::testing::fixture;

namespace {

Hyperparams small_hp() {
  Hyperparams hp;
  hp.embedding_dim = 16;
  hp.hidden_dim = 32;
  hp.batch_size = 8;
  hp.steps = 100;
  hp.max_seq_len = 192;
  return hp;
}

}  // namespace

TEST_CASE("serial and parallel kernels agree bit for bit") {
  using M = kernels::Mat<float>;
  using V = kernels::Vec<float>;
  const int H = 24, B = 37, K = 19;
  M gx = M::Random(3 * H, B), gh = M::Random(3 * H, B), h = M::Random(H, B), dh_out = M::Random(H, B);
  V mask = V::Ones(B);
  for (int j = 0; j < B; j += 5) mask(j) = 0;
  kernels::GateCache<float> c1, c2;
  M o1, o2;
  kernels::gru_forward<float>(gx, gh, h, mask, c1, o1);
  kernels::gru_forward_serial<float>(gx, gh, h, mask, c2, o2);
  CHECK(o1 == o2);
  CHECK(c1.n == c2.n);
  M a1, b1, d1, a2, b2, d2;
  kernels::gru_backward<float>(dh_out, gh, h, mask, c1, a1, b1, d1);
  kernels::gru_backward_serial<float>(dh_out, gh, h, mask, c2, a2, b2, d2);
  CHECK(a1 == a2);
  CHECK(b1 == b2);
  CHECK(d1 == d2);
  // Masked columns pass the state and its gradient through untouched.
  CHECK(o1.col(0) == h.col(0));
  CHECK(d1.col(0) == dh_out.col(0));
  CHECK(a1.col(0).isZero(0));

  M logits = M::Random(K, B);
  std::vector<int> targets(B);
  std::vector<float> weights(B);
  for (int j = 0; j < B; ++j) {
    targets[j] = j % K;
    weights[j] = j % 4 == 0 ? 0.0f : 1.0f;
  }
  V l1, l2;
  M g1, g2;
  kernels::softmax_xent<float>(logits, targets.data(), weights.data(), 0.5f, l1, g1);
  kernels::softmax_xent_serial<float>(logits, targets.data(), weights.data(), 0.5f, l2, g2);
  CHECK(l1 == l2);
  CHECK(g1 == g2);
  // Oracle: -log softmax computed directly.
  for (int j = 1; j < B; j += 4) {
    double denom = 0;
    for (int i = 0; i < K; ++i) denom += std::exp(static_cast<double>(logits(i, j)));
    double expect = -std::log(std::exp(static_cast<double>(logits(targets[j], j))) / denom);
    CHECK(l1(j) == doctest::Approx(expect).epsilon(1e-5));
  }
  CHECK(l1(0) == 0.0f);
}

TEST_CASE("gradient matches finite differences") {
  auto g = load_grammar(fixture("reference.grammar"));
  auto corpus = seqfuzz::testing::random_corpus(g, 1, 3, 1, 1);
  // A 5-token slice keeps the check small; replay validity is not needed here.
  auto x = make_sequence({corpus[0].tokens.begin(), corpus[0].tokens.begin() + 5}, g);
  Hyperparams hp;
  hp.embedding_dim = 3;
  hp.hidden_dim = 4;
  hp.rng_seed = 5;
  ModelT<double> m(hp, g.size(), g.hash());
  double err = numeric_gradient_check(m, x, 400, 1e-4, 9);
  CHECK(err <= 1e-3);
  CHECK(numeric_gradient_check(m, x, 400, 1e-4, 9) == err);

  // Embedding columns of tokens absent from x get exactly zero gradient.
  std::vector<double> grad;
  m.loss({&x}, &grad);
  const auto E = static_cast<std::size_t>(hp.embedding_dim);
  std::set<int> used{kSosToken, kPadToken};
  for (auto t : x.tokens) used.insert(static_cast<int>(t) + kFirstRuleToken);
  for (int tok = 0; tok < m.vocab_size(); ++tok) {
    if (used.count(tok)) continue;
    for (std::size_t e = 0; e < E; ++e) CHECK(grad[m.layout().emb + tok * E + e] == 0.0);
  }
}

TEST_CASE("single sequence is reconstructed exactly after 100 steps") {
  auto g = load_grammar(fixture("reference.grammar"));
  auto corpus = seqfuzz::testing::random_corpus(g, 1, 4, 2, 2);
  auto hp = small_hp();
  hp.embedding_dim = 100;
  hp.hidden_dim = 256;
  hp.batch_size = 32;
  TrainReport rep;
  auto m = train(corpus, g, hp, &rep);
  CHECK(m.trained_steps() == 100);
  CHECK(m.all_finite());
  CHECK(reconstruction_accuracy(m, corpus) == 1.0);
  CHECK(m.decode(m.encode(corpus[0])) == corpus[0].tokens);
  CHECK(rep.losses.back() < rep.losses.front());
}

TEST_CASE("duplicated corpus trains the same model without shuffling") {
  auto g = load_grammar(fixture("reference.grammar"));
  auto one = seqfuzz::testing::random_corpus(g, 1, 5);
  std::vector<RuleSequence> three(3, one[0]);
  auto hp = small_hp();
  hp.steps = 20;
  hp.shuffle = false;
  auto a = train(one, g, hp);
  auto b = train(three, g, hp);
  CHECK(a.params() == b.params());
}

TEST_CASE("encode is deterministic and finite; decode terminates") {
  auto g = load_grammar(fixture("reference.grammar"));
  auto corpus = seqfuzz::testing::random_corpus(g, 2, 6);
  Model m(small_hp(), g.size(), g.hash());
  auto z1 = m.encode(corpus[0]);
  auto z2 = m.encode(corpus[0]);
  CHECK(z1 == z2);
  CHECK(z1.size() == 32);
  CHECK(z1.allFinite());
  auto out = m.decode(Embedding::Zero(32));
  CHECK(out.size() <= 192u);
}

TEST_CASE("model refuses sequences from another grammar") {
  auto g = load_grammar(fixture("reference.grammar"));
  auto other = load_grammar(fixture("gitlab_branches.grammar"));
  auto x = seqfuzz::testing::random_corpus(other, 1, 7)[0];
  Model m(small_hp(), g.size(), g.hash());
  CHECK_THROWS_AS(m.encode(x), ModelError);
  CHECK_THROWS_AS(train({x}, g, small_hp()), ModelError);
  CHECK_THROWS_AS(train({}, g, small_hp()), ModelError);
  auto hp = small_hp();
  hp.max_seq_len = 4;
  CHECK_THROWS_AS(train(seqfuzz::testing::random_corpus(g, 1, 7), g, hp), ModelError);
}

TEST_CASE("checkpoint round trip is bit exact") {
  auto g = load_grammar(fixture("reference.grammar"));
  auto corpus = seqfuzz::testing::random_corpus(g, 4, 8);
  auto hp = small_hp();
  hp.steps = 5;
  auto m = train(corpus, g, hp);
  auto path = (std::filesystem::temp_directory_path() / "seqfuzz_model_test.bin").string();
  m.save(path);
  auto back = Model::load(path);
  CHECK(back.params() == m.params());
  CHECK(back.grammar_hash() == m.grammar_hash());
  CHECK(back.trained_steps() == 5);
  CHECK(back.hyperparams().hidden_dim == hp.hidden_dim);
  CHECK(back.hyperparams().z_per_step == hp.z_per_step);
  CHECK(back.vocab_size() == m.vocab_size());
  CHECK(back.encode(corpus[0]) == m.encode(corpus[0]));
  std::filesystem::remove(path);
}
