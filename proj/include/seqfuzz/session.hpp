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
#include <fstream>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "seqfuzz/autoencoder.hpp"
#include "seqfuzz/execution.hpp"
#include "seqfuzz/grammar.hpp"
#include "seqfuzz/mutation.hpp"
#include "seqfuzz/parser.hpp"
#include "seqfuzz/report.hpp"
#include "seqfuzz/seedgen.hpp"

namespace seqfuzz {

class SessionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Strategy { byte, tree, learned };
Strategy parse_strategy(std::string_view name);
std::string strategy_name(Strategy s);

struct FuzzOptions {
  Strategy strategy = Strategy::learned;
  double budget_s = 300;
  std::uint64_t rng_seed = 1;
  int n_scales = 8;
  bool mutate_dependencies = false;
  NoiseNorm noise_norm = NoiseNorm::z;
  // Stop after this many test cases, seeds included (0: budget only).
  std::size_t max_execs = 0;
  int k_max = 4;
};

struct SessionSeed {
  std::string id;
  RuleSequence x;
  Bindings observed;  // concrete dependency values the seed carried
};

// Parses seed files; unparsable seeds are skipped and named in `skipped`.
std::vector<SessionSeed> load_session_seeds(const std::vector<SeedFile>& files, const Grammar& g,
                                            std::vector<std::string>* skipped = nullptr);

struct SessionSummary {
  std::size_t tests = 0;
  std::size_t new_blocks = 0;
  std::size_t bugs = 0;
  double elapsed_s = 0;
};

// One fuzz session: executes every seed once, then mutants of the chosen
// strategy until the budget runs out. The budget is checked between test
// cases. Writes executions_<strategy>.tsv, mutations_<strategy>.tsv,
// manifest.txt and transcripts/ for the first case of each bug bitmap.
class FuzzSession {
 public:
  FuzzSession(const Grammar& g, std::vector<SessionSeed> seeds, Executor& ex, FuzzOptions opts,
              const Model* model = nullptr);

  SessionSummary run(const std::string& out_dir);
  const std::vector<ExecutionLogRow>& rows() const { return rows_; }

 private:
  struct Pending {
    std::string seed_id;
    std::string phase;
    MutationLogEntry log;
  };

  bool budget_left() const;
  void execute(const std::vector<PreparedRequest>& reqs, const std::map<std::string, std::string>& chosen,
               Pending p);
  std::vector<PreparedRequest> prepared(const RuleSequence& x);
  void run_byte();
  void run_tree();
  void run_learned();

  const Grammar& g_;
  std::vector<SessionSeed> seeds_;
  Executor& ex_;
  FuzzOptions opts_;
  const Model* model_;
  Rng rng_;

  std::string out_dir_;
  double start_ = 0;
  std::size_t executed_ = 0;
  CoverageBitmap seed_union_, global_;
  std::set<std::string> bug_keys_;
  std::set<std::tuple<std::size_t, std::size_t, RuleId>> clean_done_;
  std::vector<ExecutionLogRow> rows_;
  std::ofstream exec_log_, mut_log_;
};

}  // namespace seqfuzz
