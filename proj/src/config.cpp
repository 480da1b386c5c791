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

#include "seqfuzz/config.hpp"

#include "seqfuzz/util.hpp"

namespace seqfuzz {

const std::map<std::string, std::string>& Config::known_keys() {
  static const std::map<std::string, std::string> keys = {
      {"target.base_url", "target service, http://host:port"},
      {"target.token", "value for the PRIVATE-TOKEN header"},
      {"grammar.path", "grammar file"},
      {"seeds.dir", "seed corpus directory"},
      {"model.checkpoint", "trained model file"},
      {"fuzz.strategy", "byte, tree or learned"},
      {"fuzz.budget_s", "wall-clock budget in seconds"},
      {"fuzz.n_scales", "noise scales tried per seed"},
      {"fuzz.rng_seed", "random seed"},
      {"fuzz.mutate_dependencies", "allow producer/consumer leaves as targets"},
      {"fuzz.noise_norm", "z or delta"},
  };
  return keys;
}

Config Config::parse(std::string_view text) {
  Config c;
  int lineno = 0;
  for (const auto& raw : split(text, '\n')) {
    ++lineno;
    auto line = trim(std::string_view(raw).substr(0, raw.find('#')));
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key=value");
    auto key = std::string(trim(line.substr(0, eq)));
    if (!known_keys().count(key)) throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    c.values_[key] = std::string(trim(line.substr(eq + 1)));
  }
  return c;
}

Config Config::load(const std::string& path) { return parse(read_file(path)); }

std::optional<std::string> Config::get(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

std::string Config::get_or(const std::string& key, const std::string& fallback) const {
  return get(key).value_or(fallback);
}

double Config::get_double(const std::string& key, double fallback) const {
  auto v = get(key);
  if (!v) return fallback;
  try {
    std::size_t used = 0;
    double d = std::stod(*v, &used);
    if (used == v->size()) return d;
  } catch (const std::exception&) {
  }
  throw ConfigError(key + ": not a number: " + *v);
}

long long Config::get_int(const std::string& key, long long fallback) const {
  auto v = get(key);
  if (!v) return fallback;
  try {
    std::size_t used = 0;
    long long n = std::stoll(*v, &used);
    if (used == v->size()) return n;
  } catch (const std::exception&) {
  }
  throw ConfigError(key + ": not an integer: " + *v);
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  auto v = get(key);
  if (!v) return fallback;
  if (*v == "true" || *v == "1" || *v == "yes") return true;
  if (*v == "false" || *v == "0" || *v == "no") return false;
  throw ConfigError(key + ": not a boolean: " + *v);
}

void Config::set(const std::string& key, const std::string& value) {
  if (!known_keys().count(key)) throw ConfigError("unknown key '" + key + "'");
  values_[key] = value;
}

}  // namespace seqfuzz
