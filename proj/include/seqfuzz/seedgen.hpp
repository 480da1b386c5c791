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
#include <string>
#include <vector>

#include "seqfuzz/grammar.hpp"
#include "seqfuzz/parser.hpp"

namespace seqfuzz {

struct SeedGenOptions {
  int max_len = 3;
  // Values taken from the front of each fuzzable alphabet.
  int dict_values_per_type = 2;
  // Stop after this many seeds (0: no cap).
  std::size_t max_seeds = 0;
};

struct Seed {
  std::string id;
  std::vector<std::string> kinds;
  std::vector<WireRequest> requests;  // dependency slots as placeholders
};

struct SeedCorpus {
  std::vector<Seed> seeds;
  bool partial = false;  // the cap cut a length short
};

// All instantiations of one request layout: the cartesian product of the
// first `d` values of each fuzzable slot, odometer order (last slot fastest).
std::vector<WireRequest> renderings(const Grammar& g, const RequestDef& def, int d);

// Request-type sequences in BFS order (length, then grammar order), keeping
// only those where every consumed resource was produced earlier and no
// type repeats. Indices into g.requests().
std::vector<std::vector<std::size_t>> feasible_sequences(const Grammar& g, int max_len);

// One seed per rendering of a sequence's last request; earlier requests use
// their first rendering.
SeedCorpus generate_seeds(const Grammar& g, const SeedGenOptions& opts);

// Feasible sequences per length and the renderings they would emit,
// counted without materializing the seeds.
struct StateSpace {
  std::vector<std::uint64_t> sequences;   // index k-1: length k
  std::vector<std::uint64_t> renderings;  // index k-1: length k
};
StateSpace count_state_space(const Grammar& g, int max_len, int d);

// Writes `<id>.seed` files plus index.tsv (seed_id, length, kinds).
void write_corpus(const SeedCorpus& corpus, const std::string& dir);
// Reads index.tsv order; each entry's text is the seed file's contents.
struct SeedFile {
  std::string id;
  std::string text;
};
std::vector<SeedFile> read_corpus(const std::string& dir);

}  // namespace seqfuzz
