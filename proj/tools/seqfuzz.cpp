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

#include <CLI11.hpp>

#include <atomic>
#include <chrono>
#include <csignal>
#include <filesystem>
#include <iostream>
#include <thread>

#include "seqfuzz/autoencoder.hpp"
#include "seqfuzz/config.hpp"
#include "seqfuzz/coverage.hpp"
#include "seqfuzz/execution.hpp"
#include "seqfuzz/grammar.hpp"
#include "seqfuzz/parser.hpp"
#include "seqfuzz/reference_target.hpp"
#include "seqfuzz/report.hpp"
#include "seqfuzz/seedgen.hpp"
#include "seqfuzz/session.hpp"
#include "seqfuzz/util.hpp"

using namespace seqfuzz;

namespace {

std::atomic<bool> g_stop{false};

void on_signal(int) { g_stop = true; }

// Flags win over the config file; the config wins over built-in defaults.
struct Settings {
  std::string config_path;
  Config cfg;

  void load() {
    if (!config_path.empty()) cfg = Config::load(config_path);
  }
  std::string str(const std::string& flag, const std::string& key, const std::string& fallback = {}) const {
    return flag.empty() ? cfg.get_or(key, fallback) : flag;
  }
};

TargetConfig target_config(const std::string& url, const std::string& token) {
  TargetConfig t;
  t.base_url = url;
  t.auth_value = token;
  return t;
}

std::vector<RuleSequence> corpus_sequences(const std::vector<SessionSeed>& seeds) {
  std::vector<RuleSequence> out;
  for (const auto& s : seeds) out.push_back(s.x);
  return out;
}

std::string require(const std::string& value, const std::string& what) {
  if (value.empty()) throw std::runtime_error("missing " + what);
  return value;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"seqfuzz: grammar-based REST API fuzzer with learned mutations"};
  app.require_subcommand(1);
  Settings st;
  app.add_option("--config", st.config_path, "key=value config file");

  std::string grammar_flag, seeds_flag, target_flag, token_flag, model_flag;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--grammar", grammar_flag, "grammar file (grammar.path)");
    sub->add_option("--seeds", seeds_flag, "seed corpus directory (seeds.dir)");
    sub->add_option("--target", target_flag, "target base URL (target.base_url)");
    sub->add_option("--token", token_flag, "PRIVATE-TOKEN value (target.token)");
  };

  // seeds
  auto* seeds_cmd = app.add_subcommand("seeds", "generate a BFS seed corpus from the grammar");
  common(seeds_cmd);
  SeedGenOptions sg;
  std::size_t max_seeds = 0;
  bool validate = false;
  seeds_cmd->add_option("--max-len", sg.max_len, "longest request sequence")->capture_default_str();
  seeds_cmd->add_option("--values", sg.dict_values_per_type, "alphabet values per fuzzable slot")->capture_default_str();
  seeds_cmd->add_option("--max-seeds", max_seeds, "stop after this many seeds (0: no cap)");
  seeds_cmd->add_flag("--validate", validate, "execute each seed and keep only all-2xx ones");

  // train
  auto* train_cmd = app.add_subcommand("train", "train the autoencoder on a seed corpus");
  common(train_cmd);
  Hyperparams hp;
  std::string train_out;
  train_cmd->add_option("--out", train_out, "checkpoint path (model.checkpoint)");
  train_cmd->add_option("--steps", hp.steps)->capture_default_str();
  train_cmd->add_option("--batch", hp.batch_size)->capture_default_str();
  train_cmd->add_option("--lr", hp.learning_rate)->capture_default_str();
  train_cmd->add_option("--embed", hp.embedding_dim)->capture_default_str();
  train_cmd->add_option("--hidden", hp.hidden_dim)->capture_default_str();
  train_cmd->add_option("--rng-seed", hp.rng_seed)->capture_default_str();

  // fuzz
  auto* fuzz_cmd = app.add_subcommand("fuzz", "run a fuzz session");
  common(fuzz_cmd);
  std::string strategy_flag, noise_flag, out_dir = "session";
  double budget = -1;
  long long rng_seed = -1, n_scales = -1;
  std::size_t max_execs = 0;
  bool mutate_deps = false, spawn = false;
  fuzz_cmd->add_option("--strategy", strategy_flag, "byte, tree or learned (fuzz.strategy)");
  fuzz_cmd->add_option("--budget", budget, "seconds (fuzz.budget_s)");
  fuzz_cmd->add_option("--seed", rng_seed, "rng seed (fuzz.rng_seed)");
  fuzz_cmd->add_option("--max-execs", max_execs, "stop after this many test cases");
  fuzz_cmd->add_option("--n-scales", n_scales, "noise scales per seed (fuzz.n_scales)");
  fuzz_cmd->add_flag("--mutate-dependencies", mutate_deps, "allow producer/consumer leaves as targets");
  fuzz_cmd->add_option("--noise-norm", noise_flag, "z or delta (fuzz.noise_norm)");
  fuzz_cmd->add_option("--model", model_flag, "checkpoint (model.checkpoint)");
  fuzz_cmd->add_option("--out", out_dir, "session directory")->capture_default_str();
  fuzz_cmd->add_flag("--spawn-target", spawn, "start the bundled reference target in-process");

  // distill
  auto* distill_cmd = app.add_subcommand("distill", "keep seeds that reach new blocks");
  common(distill_cmd);
  std::string bitmaps_file, distill_out;
  distill_cmd->add_option("--bitmaps", bitmaps_file, "TSV of id<TAB>hex bitmap instead of executing seeds");
  distill_cmd->add_option("--out", distill_out, "directory for the distilled corpus");

  // replay
  auto* replay_cmd = app.add_subcommand("replay", "re-execute a recorded transcript from reset state");
  std::string transcript_path;
  replay_cmd->add_option("transcript", transcript_path, "transcript file")->required();
  replay_cmd->add_option("--target", target_flag, "target base URL (target.base_url)");
  replay_cmd->add_flag("--spawn-target", spawn, "start the bundled reference target in-process");

  // report
  auto* report_cmd = app.add_subcommand("report", "write coverage_<strategy>.csv and bugs.csv for a session");
  std::string report_dir = "session";
  report_cmd->add_option("--dir", report_dir, "session directory")->capture_default_str();

  // serve
  auto* serve_cmd = app.add_subcommand("serve", "run the bundled reference target");
  int port = 8080;
  serve_cmd->add_option("--port", port, "0 picks a free port")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    st.load();
    auto grammar_path = [&] { return require(st.str(grammar_flag, "grammar.path"), "--grammar / grammar.path"); };
    auto seeds_dir = [&] { return require(st.str(seeds_flag, "seeds.dir"), "--seeds / seeds.dir"); };
    auto target_url = [&] { return st.str(target_flag, "target.base_url", "http://127.0.0.1:8080"); };
    auto token = [&] { return st.str(token_flag, "target.token"); };

    if (*seeds_cmd) {
      auto g = load_grammar(grammar_path());
      sg.max_seeds = max_seeds;
      auto corpus = generate_seeds(g, sg);
      if (validate) {
        Executor ex(target_config(target_url(), token()));
        std::vector<Seed> kept;
        for (auto& s : corpus.seeds) {
          auto r = ex.run(prepare(s.requests));
          bool ok = r.verdict == Verdict::pass && r.responses.size() == s.requests.size();
          for (const auto& q : r.responses) ok = ok && q.status >= 200 && q.status < 300;
          if (ok) kept.push_back(std::move(s));
        }
        corpus.seeds = std::move(kept);
      }
      write_corpus(corpus, seeds_dir());
      std::cout << "wrote " << corpus.seeds.size() << " seeds to " << seeds_dir()
                << (corpus.partial ? " (partial: --max-seeds reached)" : "") << "\n";
      return 0;
    }

    if (*train_cmd) {
      auto g = load_grammar(grammar_path());
      std::vector<std::string> skipped;
      auto seeds = load_session_seeds(read_corpus(seeds_dir()), g, &skipped);
      for (const auto& id : skipped) std::cerr << "skipping unparsable seed " << id << "\n";
      auto out = require(st.str(train_out, "model.checkpoint"), "--out / model.checkpoint");
      auto corpus = corpus_sequences(seeds);
      auto model = train(corpus, g, hp, nullptr, [&](int step, double loss) {
        if (step % 100 == 0 || step == hp.steps) std::cerr << "step " << step << " loss " << loss << "\n";
      });
      model.save(out);
      std::cout << "reconstruction accuracy " << reconstruction_accuracy(model, corpus) << "; saved " << out << "\n";
      return 0;
    }

    if (*fuzz_cmd) {
      auto g = load_grammar(grammar_path());
      FuzzOptions fo;
      fo.strategy = parse_strategy(st.str(strategy_flag, "fuzz.strategy", "learned"));
      fo.budget_s = budget >= 0 ? budget : st.cfg.get_double("fuzz.budget_s", 300);
      fo.rng_seed = static_cast<std::uint64_t>(rng_seed >= 0 ? rng_seed : st.cfg.get_int("fuzz.rng_seed", 1));
      fo.n_scales = static_cast<int>(n_scales >= 0 ? n_scales : st.cfg.get_int("fuzz.n_scales", 8));
      fo.mutate_dependencies = mutate_deps || st.cfg.get_bool("fuzz.mutate_dependencies", false);
      auto norm = st.str(noise_flag, "fuzz.noise_norm", "z");
      if (norm != "z" && norm != "delta") throw std::runtime_error("noise norm must be z or delta");
      fo.noise_norm = norm == "z" ? NoiseNorm::z : NoiseNorm::delta;
      fo.max_execs = max_execs;

      std::optional<Model> model;
      if (fo.strategy == Strategy::learned) {
        auto path = st.str(model_flag, "model.checkpoint");
        if (path.empty() || !std::filesystem::exists(path))
          throw SessionError("the learned strategy needs a checkpoint (--model / model.checkpoint)");
        model = Model::load(path);
      }
      ReferenceServer server;
      std::string url = target_url();
      if (spawn) {
        server.start();
        url = server.base_url();
      }
      Executor ex(target_config(url, token()));
      if (!ex.reset_target() && !ex.manifest()) throw std::runtime_error("target unreachable at " + url);
      auto seeds = load_session_seeds(read_corpus(seeds_dir()), g);
      FuzzSession session(g, std::move(seeds), ex, fo, model ? &*model : nullptr);
      auto sum = session.run(out_dir);
      write_reports(out_dir);
      server.stop();
      std::cout << strategy_name(fo.strategy) << ": " << sum.tests << " test cases in " << sum.elapsed_s
                << " s, " << sum.new_blocks << " new blocks, " << sum.bugs << " distinct bugs\n";
      return 0;
    }

    if (*distill_cmd) {
      std::vector<std::string> ids;
      std::vector<CoverageBitmap> bitmaps;
      std::vector<SeedFile> files;
      if (!bitmaps_file.empty()) {
        for (const auto& line : split(read_file(bitmaps_file), '\n')) {
          if (line.empty() || line[0] == '#') continue;
          auto f = split(line, '\t');
          if (f.size() < 2) throw std::runtime_error("bitmap line needs id<TAB>hex: " + line);
          ids.push_back(f[0]);
          bitmaps.push_back(CoverageBitmap::from_hex(f[1]));
        }
      } else {
        auto g = load_grammar(grammar_path());
        files = read_corpus(seeds_dir());
        Executor ex(target_config(target_url(), token()));
        for (const auto& f : files) {
          auto r = ex.run(prepare(parse_seed_text(f.text)));
          if (!r.coverage) throw std::runtime_error("no coverage for " + f.id + " (target not instrumented?)");
          ids.push_back(f.id);
          bitmaps.push_back(*r.coverage);
        }
      }
      auto kept = distill(bitmaps);
      for (auto i : kept) std::cout << ids[i] << "\n";
      std::cerr << "kept " << kept.size() << " of " << ids.size() << "\n";
      if (!distill_out.empty() && !files.empty()) {
        SeedCorpus out;
        for (auto i : kept) out.seeds.push_back({files[i].id, {}, parse_seed_text(files[i].text)});
        write_corpus(out, distill_out);
      }
      return 0;
    }

    if (*replay_cmd) {
      auto text = read_file(transcript_path);
      ReferenceServer server;
      std::string url = target_url();
      if (spawn) {
        server.start();
        url = server.base_url();
      }
      Executor ex(target_config(url, ""));
      std::vector<PreparedRequest> reqs;
      for (auto& m : transcript_messages(text)) reqs.push_back({std::move(m), {}});
      auto r = ex.run(reqs, {}, false);
      auto recorded = transcript_statuses(text);
      std::vector<int> got;
      for (const auto& q : r.responses) got.push_back(q.status);
      for (std::size_t i = 0; i < got.size(); ++i)
        std::cout << "request " << i << ": " << got[i] << (i < recorded.size() ? " (recorded " + std::to_string(recorded[i]) + ")" : "") << "\n";
      server.stop();
      bool same = got == recorded;
      std::cout << (same ? "reproduced" : "NOT reproduced") << " (" << verdict_name(r.verdict) << ")\n";
      return same ? 0 : 1;
    }

    if (*report_cmd) {
      auto strategies = write_reports(report_dir);
      if (strategies.empty()) throw std::runtime_error("no executions_<strategy>.tsv in " + report_dir);
      std::cout << read_file(report_dir + "/bugs.csv");
      return 0;
    }

    if (*serve_cmd) {
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      ReferenceServer server;
      int bound = server.start(port);
      std::cout << "reference target on http://127.0.0.1:" << bound << std::endl;
      while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
      server.stop();
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
