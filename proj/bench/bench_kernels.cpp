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

// Parallel kernels against their serial references at training sizes
// (hidden 256, batch 32), plus one full loss/gradient evaluation.

#include <benchmark/benchmark.h>

#include "seqfuzz/autoencoder.hpp"
#include "seqfuzz/kernels.hpp"
#include "seqfuzz/parser.hpp"
#include "seqfuzz/util.hpp"

using namespace seqfuzz;
using M = kernels::Mat<float>;
using V = kernels::Vec<float>;

namespace {

constexpr int kHidden = 256;

struct GruInputs {
  M gx, gh, h, dh_out;
  V mask;
  explicit GruInputs(int batch)
      : gx(M::Random(3 * kHidden, batch)),
        gh(M::Random(3 * kHidden, batch)),
        h(M::Random(kHidden, batch)),
        dh_out(M::Random(kHidden, batch)),
        mask(V::Ones(batch)) {}
};

template <bool Parallel>
void BM_GruForward(benchmark::State& state) {
  GruInputs in(static_cast<int>(state.range(0)));
  kernels::GateCache<float> c;
  M out;
  for (auto _ : state) {
    if constexpr (Parallel)
      kernels::gru_forward<float>(in.gx, in.gh, in.h, in.mask, c, out);
    else
      kernels::gru_forward_serial<float>(in.gx, in.gh, in.h, in.mask, c, out);
    benchmark::DoNotOptimize(out.data());
  }
}

template <bool Parallel>
void BM_GruBackward(benchmark::State& state) {
  GruInputs in(static_cast<int>(state.range(0)));
  kernels::GateCache<float> c;
  M out, dgx, dgh, dh;
  kernels::gru_forward_serial<float>(in.gx, in.gh, in.h, in.mask, c, out);
  for (auto _ : state) {
    if constexpr (Parallel)
      kernels::gru_backward<float>(in.dh_out, in.gh, in.h, in.mask, c, dgx, dgh, dh);
    else
      kernels::gru_backward_serial<float>(in.dh_out, in.gh, in.h, in.mask, c, dgx, dgh, dh);
    benchmark::DoNotOptimize(dh.data());
  }
}

template <bool Parallel>
void BM_SoftmaxXent(benchmark::State& state) {
  const int batch = static_cast<int>(state.range(0)), vocab = 128;
  M logits = M::Random(vocab, batch), dlogits;
  std::vector<int> targets(static_cast<std::size_t>(batch));
  std::vector<float> weights(static_cast<std::size_t>(batch), 1.0f);
  for (int j = 0; j < batch; ++j) targets[static_cast<std::size_t>(j)] = (j * 7) % vocab;
  V losses;
  for (auto _ : state) {
    if constexpr (Parallel)
      kernels::softmax_xent<float>(logits, targets.data(), weights.data(), 1.0f, losses, dlogits);
    else
      kernels::softmax_xent_serial<float>(logits, targets.data(), weights.data(), 1.0f, losses, dlogits);
    benchmark::DoNotOptimize(dlogits.data());
  }
}

void BM_LossAndGradient(benchmark::State& state) {
  auto g = load_grammar(std::string(FIXTURE_DIR) + "/fig1.grammar");
  Hyperparams hp;
  hp.max_seq_len = 512;
  Model m(hp, g.size(), g.hash());
  // The 3-request commit example, repeated to fill a batch.
  auto seq = parse_test_case(read_file(std::string(FIXTURE_DIR) + "/fig1.seed"), g);
  std::vector<const RuleSequence*> batch(static_cast<std::size_t>(hp.batch_size), &seq);
  std::vector<float> grad;
  for (auto _ : state) benchmark::DoNotOptimize(m.loss(batch, &grad));
}

}  // namespace

BENCHMARK(BM_GruForward<true>)->Name("gru_forward/parallel")->Arg(32)->Arg(256);
BENCHMARK(BM_GruForward<false>)->Name("gru_forward/serial")->Arg(32)->Arg(256);
BENCHMARK(BM_GruBackward<true>)->Name("gru_backward/parallel")->Arg(32)->Arg(256);
BENCHMARK(BM_GruBackward<false>)->Name("gru_backward/serial")->Arg(32)->Arg(256);
BENCHMARK(BM_SoftmaxXent<true>)->Name("softmax_xent/parallel")->Arg(32)->Arg(256);
BENCHMARK(BM_SoftmaxXent<false>)->Name("softmax_xent/serial")->Arg(32)->Arg(256);
BENCHMARK(BM_LossAndGradient)->Name("loss_and_gradient/batch32")->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
