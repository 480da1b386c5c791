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

#include "seqfuzz/execution.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <chrono>

#include "seqfuzz/util.hpp"

namespace seqfuzz {

namespace {

constexpr std::string_view kProducerTag = "{{producer:";

std::vector<std::string> placeholder_resources(std::string_view message, std::string_view tag) {
  std::vector<std::string> out;
  for (auto at = message.find(tag); at != std::string_view::npos; at = message.find(tag, at + 1)) {
    auto end = message.find("}}", at);
    if (end == std::string_view::npos) break;
    auto name = std::string(message.substr(at + tag.size(), end - at - tag.size()));
    if (std::find(out.begin(), out.end(), name) == out.end()) out.push_back(name);
  }
  return out;
}

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

bool has_header(std::string_view message, const std::string& name) {
  auto head = message.substr(0, message.find("\r\n\r\n"));
  auto want = lower(name) + ":";
  for (const auto& line : split(head, '\n')) {
    auto l = lower(line);
    if (starts_with(trim(l), want)) return true;
  }
  return false;
}

std::string with_header(const std::string& message, const std::string& line) {
  auto eol = message.find("\r\n");
  if (eol == std::string::npos) return message + "\r\n" + line;
  return message.substr(0, eol + 2) + line + "\r\n" + message.substr(eol + 2);
}

// Seed-file form of one message when it round-trips exactly.
std::optional<std::string> seed_form(const std::string& message) {
  auto w = from_http_message(message);
  if (!w || to_http_message(*w) != message) return std::nullopt;
  auto text = format_seed_text({*w});
  for (const auto& line : split(text, '\n'))
    if (starts_with(line, "=> ") || starts_with(line, "!raw ") || starts_with(line, "#")) return std::nullopt;
  try {
    auto back = parse_seed_text(text);
    if (back.size() == 1 && back[0] == *w) return text;
  } catch (const ParseError&) {
  }
  return std::nullopt;
}

}  // namespace

void TargetConfig::validate() const {
  if (!starts_with(base_url, "http://")) throw ExecutionError("base_url must start with http://: " + base_url);
  auto ep = parse_base_url(base_url);
  if (ep.host.empty() || ep.port <= 0 || ep.port > 65535) throw ExecutionError("malformed base_url: " + base_url);
  if (timeout_ms <= 0) throw ExecutionError("timeout must be positive");
}

std::vector<PreparedRequest> prepare(const std::vector<WireRequest>& requests, std::uint64_t uuid_seed) {
  std::vector<PreparedRequest> out;
  Rng rng(uuid_seed);
  for (const auto& w : requests) {
    auto message = to_http_message(w);
    for (auto at = message.find(kUuidValue); at != std::string::npos; at = message.find(kUuidValue, at))
      message.replace(at, kUuidValue.size(), random_uuid(rng));
    out.push_back({std::move(message), w.produces});
  }
  return out;
}

std::vector<PreparedRequest> prepare(const TestCase& tc, std::uint64_t uuid_seed) {
  return prepare(tc.wire(), uuid_seed);
}

std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::bug_500: return "bug_500";
    case Verdict::transport_error: return "transport_error";
  }
  return "?";
}

std::optional<std::size_t> ExecutionResult::first_500() const {
  for (std::size_t i = 0; i < responses.size(); ++i)
    if (responses[i].status == 500) return i;
  return std::nullopt;
}

std::optional<std::string> extract_resource_id(std::string_view body, std::string_view path) {
  if (path.empty()) throw ExecutionError("empty extraction path");
  auto j = nlohmann::json::parse(body, nullptr, false);
  if (j.is_discarded()) return std::nullopt;
  const nlohmann::json* cur = &j;
  for (const auto& key : split(path, '.')) {
    if (cur->is_object()) {
      auto it = cur->find(key);
      if (it == cur->end()) return std::nullopt;
      cur = &*it;
    } else if (cur->is_array()) {
      if (key.empty() || !std::all_of(key.begin(), key.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
        return std::nullopt;
      auto idx = std::stoul(key);
      if (idx >= cur->size()) return std::nullopt;
      cur = &(*cur)[idx];
    } else {
      return std::nullopt;
    }
  }
  if (cur->is_string()) return cur->get<std::string>();
  if (cur->is_number() || cur->is_boolean()) return cur->dump();
  return std::nullopt;
}

std::string substitute(std::string message, const std::map<std::string, std::string>& bindings, DependencyRole role) {
  for (const auto& [name, value] : bindings) {
    auto ph = placeholder_text(role, name);
    for (auto at = message.find(ph); at != std::string::npos; at = message.find(ph, at + value.size()))
      message.replace(at, ph.size(), value);
  }
  return message;
}

Executor::Executor(TargetConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
  ep_ = parse_base_url(cfg_.base_url);
}

std::optional<HttpResponse> Executor::side_channel(const std::string& method, const std::string& target) {
  HttpConnection c;
  if (!c.connect(ep_, cfg_.timeout_ms)) return std::nullopt;
  auto r = c.send(method, target);
  if (!r || r->status != 200) return std::nullopt;
  return r;
}

bool Executor::reset_target() { return side_channel("POST", "/__reset__").has_value(); }

std::optional<std::vector<CoverageBitmap>> Executor::fetch_and_reset_coverage() {
  auto r = side_channel("GET", "/__coverage__?reset=1");
  if (!r) return std::nullopt;
  auto j = nlohmann::json::parse(r->body, nullptr, false);
  if (j.is_discarded() || !j.contains("block_count") || !j.contains("requests")) return std::nullopt;
  block_count_ = j["block_count"].get<std::size_t>();
  std::vector<CoverageBitmap> out;
  try {
    for (const auto& hex : j["requests"]) out.push_back(CoverageBitmap::from_hex(hex.get<std::string>(), block_count_));
  } catch (const std::exception&) {
    return std::nullopt;
  }
  return out;
}

std::optional<std::vector<std::string>> Executor::manifest() {
  auto r = side_channel("GET", "/__coverage__/manifest");
  if (!r) return std::nullopt;
  auto j = nlohmann::json::parse(r->body, nullptr, false);
  if (j.is_discarded() || !j.contains("blocks")) return std::nullopt;
  return j["blocks"].get<std::vector<std::string>>();
}

ExecutionResult Executor::run(const std::vector<PreparedRequest>& requests,
                              const std::map<std::string, std::string>& chosen, bool resolve) {
  ExecutionResult res;
  if (cfg_.instrumented && !reset_target()) {
    res.verdict = Verdict::transport_error;
    res.error = "target reset failed (is the target running at " + cfg_.base_url + "?)";
    return res;
  }
  HttpConnection conn;
  if (!conn.connect(ep_, cfg_.timeout_ms)) {
    res.verdict = Verdict::transport_error;
    res.error = conn.error();
    return res;
  }
  for (std::size_t i = 0; i < requests.size(); ++i) {
    std::string message = requests[i].message;
    std::map<std::string, std::string> picked;
    if (resolve) {
      message = substitute(std::move(message), res.bindings, DependencyRole::consumer);
      for (const auto& name : placeholder_resources(message, kProducerTag)) {
        auto it = chosen.find(name);
        picked[name] = it != chosen.end() ? it->second : name + "-" + std::to_string(i);
      }
      message = substitute(std::move(message), picked, DependencyRole::producer);
    }
    if (!cfg_.auth_header.empty() && !cfg_.auth_value.empty() && !has_header(message, cfg_.auth_header))
      message = with_header(message, cfg_.auth_header + ": " + cfg_.auth_value);

    RequestOutcome out;
    out.sent = message;
    auto t0 = std::chrono::steady_clock::now();
    auto resp = conn.send_message(message);
    out.latency_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    if (!resp) {
      res.responses.push_back(std::move(out));
      res.verdict = Verdict::transport_error;
      res.error = "request " + std::to_string(i) + ": " + conn.error();
      break;
    }
    out.status = resp->status;
    out.reason = resp->reason;
    out.body = resp->body;
    res.responses.push_back(std::move(out));
    if (!resolve) continue;

    bool ok = resp->status >= 200 && resp->status < 300;
    std::vector<std::string> produced = requests[i].produces;
    for (const auto& [name, value] : picked)
      if (std::find(produced.begin(), produced.end(), name) == produced.end()) produced.push_back(name);
    for (const auto& name : produced) {
      std::optional<std::string> value;
      if (auto path = cfg_.extract.find(name); path != cfg_.extract.end())
        value = extract_resource_id(resp->body, path->second);
      if (!value && ok && picked.count(name)) value = picked[name];
      if (value) res.bindings[name] = *value;
    }
  }
  conn.close();

  if (cfg_.instrumented) {
    if (auto per_request = fetch_and_reset_coverage()) {
      CoverageBitmap total(block_count_);
      for (const auto& b : *per_request) total.merge(b);
      res.coverage = total;
      if (per_request->size() == res.responses.size())
        for (std::size_t i = 0; i < res.responses.size(); ++i) res.responses[i].coverage = (*per_request)[i];
    }
  }
  if (res.verdict != Verdict::transport_error && res.first_500()) res.verdict = Verdict::bug_500;
  return res;
}

std::string format_transcript(const ExecutionResult& r) {
  std::string out = "# verdict " + verdict_name(r.verdict) + "\n";
  if (r.coverage) out += "# coverage " + r.coverage->to_hex() + "\n";
  if (!r.error.empty()) out += "# error " + escape_bytes(r.error) + "\n";
  for (const auto& q : r.responses) {
    out += '\n';
    if (auto text = seed_form(q.sent))
      out += *text;
    else
      out += "!raw " + escape_bytes(q.sent) + "\n";
    if (q.status) {
      out += "=> " + std::to_string(q.status) + " " + escape_bytes(q.reason) + "\n";
      out += "=> " + escape_bytes(q.body) + "\n";
    }
    if (q.coverage) out += "# coverage " + q.coverage->to_hex() + "\n";
  }
  return out;
}

namespace {

std::vector<std::vector<std::string>> transcript_blocks(std::string_view text) {
  std::vector<std::vector<std::string>> blocks;
  std::vector<std::string> cur;
  for (auto& line : split(text, '\n')) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      if (!cur.empty()) blocks.push_back(std::move(cur));
      cur.clear();
    } else if (line[0] != '#') {
      cur.push_back(std::move(line));
    }
  }
  if (!cur.empty()) blocks.push_back(std::move(cur));
  return blocks;
}

}  // namespace

std::vector<std::string> transcript_messages(std::string_view text) {
  std::vector<std::string> out;
  for (const auto& block : transcript_blocks(text)) {
    std::string seed;
    for (const auto& line : block) {
      if (starts_with(line, "!raw ")) {
        out.push_back(unescape_bytes(line.substr(5)));
        seed.clear();
        break;
      }
      if (!starts_with(line, "=> ")) seed += line + "\n";
    }
    if (!seed.empty()) {
      auto reqs = parse_seed_text(seed);
      for (const auto& w : reqs) out.push_back(to_http_message(w));
    }
  }
  return out;
}

std::vector<int> transcript_statuses(std::string_view text) {
  std::vector<int> out;
  for (const auto& block : transcript_blocks(text)) {
    for (const auto& line : block) {
      if (!starts_with(line, "=> ")) continue;
      auto code = split(line.substr(3), ' ').front();
      if (code.size() == 3 && std::all_of(code.begin(), code.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
        out.push_back(std::stoi(code));
        break;
      }
    }
  }
  return out;
}

}  // namespace seqfuzz
