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

#include "seqfuzz/session.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>

#include "seqfuzz/util.hpp"

namespace seqfuzz {

namespace {

double now_s() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch()).count();
}

}  // namespace

Strategy parse_strategy(std::string_view name) {
  if (name == "byte") return Strategy::byte;
  if (name == "tree") return Strategy::tree;
  if (name == "learned") return Strategy::learned;
  throw SessionError("unknown strategy '" + std::string(name) + "' (expected byte, tree or learned)");
}

std::string strategy_name(Strategy s) {
  switch (s) {
    case Strategy::byte: return "byte";
    case Strategy::tree: return "tree";
    case Strategy::learned: return "learned";
  }
  return "?";
}

std::vector<SessionSeed> load_session_seeds(const std::vector<SeedFile>& files, const Grammar& g,
                                            std::vector<std::string>* skipped) {
  std::vector<SessionSeed> out;
  for (const auto& f : files) {
    try {
      SessionSeed s;
      s.id = f.id;
      s.x = parse_test_case(f.text, g, &s.observed);
      out.push_back(std::move(s));
    } catch (const ParseError&) {
      if (skipped) skipped->push_back(f.id);
    }
  }
  return out;
}

FuzzSession::FuzzSession(const Grammar& g, std::vector<SessionSeed> seeds, Executor& ex, FuzzOptions opts,
                         const Model* model)
    : g_(g), seeds_(std::move(seeds)), ex_(ex), opts_(opts), model_(model), rng_(opts.rng_seed) {
  if (seeds_.empty()) throw SessionError("no seeds to fuzz");
  if (opts_.strategy == Strategy::learned) {
    if (!model_) throw SessionError("the learned strategy needs a trained model checkpoint");
    if (model_->grammar_hash() != g_.hash()) throw SessionError("model checkpoint was trained on a different grammar");
  }
}

bool FuzzSession::budget_left() const {
  if (opts_.max_execs && executed_ >= opts_.max_execs) return false;
  return now_s() - start_ < opts_.budget_s;
}

std::vector<PreparedRequest> FuzzSession::prepared(const RuleSequence& x) {
  return prepare(render(x, g_), executed_);
}

void FuzzSession::execute(const std::vector<PreparedRequest>& reqs, const std::map<std::string, std::string>& chosen,
                          Pending p) {
  auto result = ex_.run(reqs, chosen);
  char id[48];
  std::snprintf(id, sizeof id, "%s-%06zu", strategy_name(opts_.strategy).c_str(), ++executed_);
  ExecutionLogRow row;
  row.test_id = id;
  row.seed_id = p.seed_id;
  row.phase = p.phase;
  row.elapsed_s = now_s() - start_;
  row.verdict = verdict_name(result.verdict);
  for (const auto& r : result.responses) row.statuses.push_back(r.status);
  row.first_500 = result.first_500();
  if (result.coverage) {
    row.bitmap = result.coverage->to_hex();
    if (global_.width() == 0) global_ = seed_union_ = CoverageBitmap(result.coverage->width());
    if (p.phase == "seed") seed_union_.merge(*result.coverage);
    global_.merge(*result.coverage);
  }
  if (row.first_500) {
    const auto& bad = result.responses[*row.first_500];
    row.bug_bitmap = bad.coverage ? bad.coverage->to_hex() : "";
    // Without coverage every 500 counts as its own path.
    auto key = row.bug_bitmap.empty() ? row.test_id : row.bug_bitmap;
    if (bug_keys_.insert(key).second) {
      row.transcript = "transcripts/" + row.test_id + ".txt";
      if (!out_dir_.empty()) write_file(out_dir_ + "/" + row.transcript, format_transcript(result));
    }
  }
  if (exec_log_.is_open()) exec_log_ << format_log_row(row) << '\n';
  if (p.phase != "seed" && mut_log_.is_open()) {
    p.log.status = row.first_500 ? 500 : (row.statuses.empty() ? 0 : row.statuses.back());
    mut_log_ << format_log_line(p.log) << '\t' << row.test_id << '\n';
  }
  rows_.push_back(std::move(row));
}

void FuzzSession::run_byte() {
  std::uniform_int_distribution<std::size_t> pick(0, seeds_.size() - 1);
  while (budget_left()) {
    const auto& s = seeds_[pick(rng_)];
    auto reqs = prepared(s.x);
    std::vector<std::string> messages;
    for (const auto& r : reqs) messages.push_back(r.message);
    auto [msg, off] = mutate_bytes(messages, rng_);
    std::size_t global = off;
    for (std::size_t i = 0; i < msg; ++i) global += messages[i].size();
    for (std::size_t i = 0; i < reqs.size(); ++i) reqs[i].message = messages[i];
    execute(reqs, s.observed.values, {s.id, "mutant", {s.id, msg, "byte", 0, {global}, 0}});
  }
}

void FuzzSession::run_tree() {
  std::uniform_int_distribution<std::size_t> pick(0, seeds_.size() - 1);
  while (budget_left()) {
    const auto& s = seeds_[pick(rng_)];
    MutationPlan plan;
    auto y = mutate_tree_random(s.x, g_, rng_, opts_.mutate_dependencies, &plan);
    execute(prepared(y), s.observed.values, {s.id, "mutant", {s.id, plan.target_leaf, "tree", plan.new_rule, {}, 0}});
  }
}

void FuzzSession::run_learned() {
  PerturbOptions popts;
  popts.norm = opts_.noise_norm;
  PlanOptions plan_opts;
  plan_opts.mutate_dependencies = opts_.mutate_dependencies;
  plan_opts.k_max = opts_.k_max;
  std::size_t pass_start = executed_;
  for (std::size_t round = 0; budget_left(); ++round) {
    auto si = round % seeds_.size();
    if (si == 0 && round > 0) {
      // A pass with nothing new to run: allow clean flips again, or stop
      // when there were none to repeat.
      if (executed_ == pass_start) {
        if (clean_done_.empty()) break;
        clean_done_.clear();
      }
      pass_start = executed_;
    }
    const auto& s = seeds_[si];
    auto pr = perturb_and_select(*model_, s.x, opts_.n_scales, rng_, popts);
    auto plans = plan_learned_mutations(s.x, pr, g_, rng_, plan_opts);
    for (const auto& plan : plans) {
      if (!budget_left()) break;
      MutationLogEntry log{s.id, plan.target_leaf, case_name(plan.kase), plan.new_rule, {}, 0};
      // A rule flip is the same test case however often it is planned; run
      // it clean once per session, polluted every time.
      if (clean_done_.insert({si, plan.target_leaf, plan.new_rule}).second)
        execute(prepared(apply_plan(s.x, plan, g_, false)), s.observed.values, {s.id, "mutant", log});
      if (plan.byte_noise.empty() || !budget_left()) continue;
      for (const auto& n : plan.byte_noise) log.offsets.push_back(n.offset);
      execute(prepared(apply_plan(s.x, plan, g_, true)), s.observed.values, {s.id, "mutant", log});
    }
  }
}

SessionSummary FuzzSession::run(const std::string& out_dir) {
  out_dir_ = out_dir;
  const auto name = strategy_name(opts_.strategy);
  if (!out_dir_.empty()) {
    std::filesystem::create_directories(out_dir_ + "/transcripts");
    if (auto m = ex_.manifest()) {
      std::string text;
      for (const auto& b : *m) text += b + '\n';
      write_file(out_dir_ + "/manifest.txt", text);
    }
    exec_log_.open(out_dir_ + "/executions_" + name + ".tsv");
    exec_log_ << execution_log_header() << '\n';
    mut_log_.open(out_dir_ + "/mutations_" + name + ".tsv");
    mut_log_ << mutation_log_header() << "\ttest_id\n";
  }
  start_ = now_s();
  for (const auto& s : seeds_) {
    if (!budget_left()) break;
    execute(prepared(s.x), s.observed.values, {s.id, "seed", {}});
  }
  switch (opts_.strategy) {
    case Strategy::byte: run_byte(); break;
    case Strategy::tree: run_tree(); break;
    case Strategy::learned: run_learned(); break;
  }
  exec_log_.close();
  mut_log_.close();

  SessionSummary sum;
  sum.tests = executed_;
  sum.new_blocks = global_.width() ? global_.count_new(seed_union_) : 0;
  sum.bugs = bug_keys_.size();
  sum.elapsed_s = now_s() - start_;
  return sum;
}

}  // namespace seqfuzz
