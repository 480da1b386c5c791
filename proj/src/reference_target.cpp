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

#include "seqfuzz/reference_target.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>

#include "seqfuzz/util.hpp"

namespace seqfuzz {

using nlohmann::json;

namespace {

enum Block : int {
  kEntry,
  kMalformed,
  kUriSplit,
  kFaultUriPipe,
  kMethodDispatch,
  kFaultUnknownMethod,
  kUriQuery,
  kBodyParse,
  kBodyInvalidJson,
  kBodyNotObject,
  kParamsDecode,
  kFaultInvalidUtf8,
  kAuthCheck,
  kAuthMissing,
  kAuthInvalid,
  kRouteMatch,
  kRouteNotFound,
  kRouteMethodNotAllowed,
  kProjectLookup,
  kProjectBadId,
  kProjectNotFound,
  kProjectsCreate,
  kProjectsCreateMissingName,
  kProjectsCreateBadName,
  kProjectsCreateNameTaken,
  kProjectsCreateOk,
  kProjectsList,
  kProjectsListPageParam,
  kProjectsListBadPage,
  kProjectsListEmpty,
  kProjectsListItems,
  kProjectsGetOk,
  kProjectsDeleteOk,
  kProjectsUpdate,
  kProjectsUpdateBadName,
  kProjectsUpdateOk,
  kBranchesCreate,
  kBranchesCreateMissingField,
  kBranchesCreateBadName,
  kBranchesCreateRefNotFound,
  kBranchesCreateExists,
  kBranchesCreateOk,
  kBranchesList,
  kBranchesListOk,
  kBranchLookup,
  kBranchNotFound,
  kBranchesGetOk,
  kBranchesDeleteDefault,
  kBranchesDeleteOk,
  kCommitsCreate,
  kCommitsCreateMissingField,
  kCommitsCreateBranchNotFound,
  kCommitsCreateBadActions,
  kCommitsActionCreate,
  kCommitsActionDelete,
  kCommitsActionMove,
  kCommitsActionUpdate,
  kCommitsActionChmod,
  kCommitsActionUnknown,
  kCommitsFileExists,
  kCommitsFileMissing,
  kCommitsCreateOk,
  kCommitsList,
  kCommitsListOk,
  kBlockCount
};

const std::vector<std::string> kBlockNames = {
    "http.entry",
    "http.malformed",
    "uri.split",
    "fault.uri_pipe",
    "method.dispatch",
    "fault.unknown_method",
    "uri.query",
    "body.parse",
    "body.invalid_json",
    "body.not_object",
    "params.decode",
    "fault.invalid_utf8",
    "auth.check",
    "auth.missing",
    "auth.invalid",
    "route.match",
    "route.not_found",
    "route.method_not_allowed",
    "project.lookup",
    "project.bad_id",
    "project.not_found",
    "projects.create",
    "projects.create.missing_name",
    "projects.create.bad_name",
    "projects.create.name_taken",
    "projects.create.ok",
    "projects.list",
    "projects.list.page_param",
    "projects.list.bad_page",
    "projects.list.empty",
    "projects.list.items",
    "projects.get.ok",
    "projects.delete.ok",
    "projects.update",
    "projects.update.bad_name",
    "projects.update.ok",
    "branches.create",
    "branches.create.missing_field",
    "branches.create.bad_name",
    "branches.create.ref_not_found",
    "branches.create.exists",
    "branches.create.ok",
    "branches.list",
    "branches.list.ok",
    "branch.lookup",
    "branch.not_found",
    "branches.get.ok",
    "branches.delete.default",
    "branches.delete.ok",
    "commits.create",
    "commits.create.missing_field",
    "commits.create.branch_not_found",
    "commits.create.bad_actions",
    "commits.action.create",
    "commits.action.delete",
    "commits.action.move",
    "commits.action.update",
    "commits.action.chmod",
    "commits.action.unknown",
    "commits.file_exists",
    "commits.file_missing",
    "commits.create.ok",
    "commits.list",
    "commits.list.ok",
};

constexpr long kFirstProjectId = 1243;
constexpr std::string_view kToken = "DRiX47nuEP2AR";
constexpr int kPageSize = 2;

// Byte-tolerant JSON reader: strings keep raw bytes (invalid UTF-8
// included) so validation happens in the application, not the parser.
class LenientJson {
 public:
  explicit LenientJson(std::string_view s) : s_(s) {}

  bool parse(json& out) {
    if (!value(out, 0)) return false;
    skip_ws();
    return i_ == s_.size();
  }

 private:
  void skip_ws() {
    while (i_ < s_.size() && (s_[i_] == ' ' || s_[i_] == '\t' || s_[i_] == '\n' || s_[i_] == '\r')) ++i_;
  }

  bool literal(std::string_view word) {
    if (s_.substr(i_, word.size()) != word) return false;
    i_ += word.size();
    return true;
  }

  bool string(std::string& out) {
    if (i_ >= s_.size() || s_[i_] != '"') return false;
    ++i_;
    while (i_ < s_.size()) {
      char c = s_[i_++];
      if (c == '"') return true;
      if (c != '\\') {
        out += c;
        continue;
      }
      if (i_ >= s_.size()) return false;
      char e = s_[i_++];
      switch (e) {
        case '"': out += '"'; break;
        case '\\': out += '\\'; break;
        case '/': out += '/'; break;
        case 'b': out += '\b'; break;
        case 'f': out += '\f'; break;
        case 'n': out += '\n'; break;
        case 'r': out += '\r'; break;
        case 't': out += '\t'; break;
        case 'u': {
          if (i_ + 4 > s_.size()) return false;
          unsigned cp = 0;
          for (int k = 0; k < 4; ++k) {
            char h = s_[i_++];
            if (!std::isxdigit(static_cast<unsigned char>(h))) return false;
            cp = cp * 16 + static_cast<unsigned>(std::isdigit(static_cast<unsigned char>(h)) ? h - '0'
                                                                                              : (std::tolower(h) - 'a' + 10));
          }
          if (cp < 0x80) {
            out += static_cast<char>(cp);
          } else if (cp < 0x800) {
            out += static_cast<char>(0xc0 | (cp >> 6));
            out += static_cast<char>(0x80 | (cp & 0x3f));
          } else {
            out += static_cast<char>(0xe0 | (cp >> 12));
            out += static_cast<char>(0x80 | ((cp >> 6) & 0x3f));
            out += static_cast<char>(0x80 | (cp & 0x3f));
          }
          break;
        }
        default: return false;
      }
    }
    return false;
  }

  bool number(json& out) {
    auto start = i_;
    if (i_ < s_.size() && s_[i_] == '-') ++i_;
    while (i_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[i_])) || s_[i_] == '.' || s_[i_] == 'e' ||
                              s_[i_] == 'E' || s_[i_] == '+' || s_[i_] == '-'))
      ++i_;
    auto text = std::string(s_.substr(start, i_ - start));
    if (text.empty() || text == "-") return false;
    try {
      std::size_t used = 0;
      if (text.find_first_of(".eE") == std::string::npos) {
        long long v = std::stoll(text, &used);
        out = v;
      } else {
        double v = std::stod(text, &used);
        out = v;
      }
      return used == text.size();
    } catch (const std::exception&) {
      return false;
    }
  }

  bool value(json& out, int depth) {
    if (depth > 32) return false;
    skip_ws();
    if (i_ >= s_.size()) return false;
    char c = s_[i_];
    if (c == '{') {
      ++i_;
      out = json::object();
      skip_ws();
      if (i_ < s_.size() && s_[i_] == '}') {
        ++i_;
        return true;
      }
      while (true) {
        skip_ws();
        std::string key;
        if (!string(key)) return false;
        skip_ws();
        if (i_ >= s_.size() || s_[i_++] != ':') return false;
        json v;
        if (!value(v, depth + 1)) return false;
        out[key] = std::move(v);
        skip_ws();
        if (i_ >= s_.size()) return false;
        if (s_[i_] == ',') {
          ++i_;
          continue;
        }
        if (s_[i_] == '}') {
          ++i_;
          return true;
        }
        return false;
      }
    }
    if (c == '[') {
      ++i_;
      out = json::array();
      skip_ws();
      if (i_ < s_.size() && s_[i_] == ']') {
        ++i_;
        return true;
      }
      while (true) {
        json v;
        if (!value(v, depth + 1)) return false;
        out.push_back(std::move(v));
        skip_ws();
        if (i_ >= s_.size()) return false;
        if (s_[i_] == ',') {
          ++i_;
          continue;
        }
        if (s_[i_] == ']') {
          ++i_;
          return true;
        }
        return false;
      }
    }
    if (c == '"') {
      std::string s;
      if (!string(s)) return false;
      out = std::move(s);
      return true;
    }
    if (literal("true")) {
      out = true;
      return true;
    }
    if (literal("false")) {
      out = false;
      return true;
    }
    if (literal("null")) {
      out = nullptr;
      return true;
    }
    return number(out);
  }

  std::string_view s_;
  std::size_t i_ = 0;
};

std::string dump(const json& j) { return j.dump(-1, ' ', false, json::error_handler_t::replace); }

HttpResponse reply(int status, const json& body) {
  HttpResponse r;
  r.status = status;
  r.body = dump(body);
  return r;
}

HttpResponse message(int status, const std::string& text) { return reply(status, json{{"message", text}}); }

std::vector<std::uint8_t> pack(const std::vector<std::uint8_t>& hits) {
  std::vector<std::uint8_t> bytes((hits.size() + 7) / 8, 0);
  for (std::size_t k = 0; k < hits.size(); ++k)
    if (hits[k]) bytes[k / 8] |= static_cast<std::uint8_t>(1u << (k % 8));
  return bytes;
}

bool parse_long(std::string_view s, long& out) {
  if (s.empty() || s.size() > 12) return false;
  bool neg = s.front() == '-';
  if (neg) s.remove_prefix(1);
  if (s.empty()) return false;
  long v = 0;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    v = v * 10 + (c - '0');
  }
  out = neg ? -v : v;
  return true;
}

bool valid_branch_name(const std::string& name) {
  if (name.empty() || name.size() > 255 || name.front() == '-' || name.find("..") != std::string::npos)
    return false;
  return std::none_of(name.begin(), name.end(), [](char c) {
    auto u = static_cast<unsigned char>(c);
    return u <= 0x20 || c == '~' || c == '^' || c == ':' || c == '\\' || c == '?' || c == '*' || c == '[';
  });
}

}  // namespace

const std::vector<InjectedBug>& injected_bug_catalog() {
  static const std::vector<InjectedBug> bugs = {
      {"B1", "branch or commit file_path with an invalid UTF-8 byte sequence", "fault.invalid_utf8",
       "commit file_path 'admin\\xd7@example.com' answered with 500"},
      {"B2", "'|' inside a path segment reaching the URI splitter", "fault.uri_pipe",
       "'/storefront/|add_item?include=line_items' answered with 500"},
      {"B3", "unknown HTTP method falling through the router", "fault.unknown_method",
       "request type 'GKT' answered with 500"},
  };
  return bugs;
}

const std::vector<std::string>& reference_manifest() { return kBlockNames; }

int block_index(std::string_view name) {
  auto it = std::find(kBlockNames.begin(), kBlockNames.end(), name);
  return it == kBlockNames.end() ? -1 : static_cast<int>(it - kBlockNames.begin());
}

ReferenceTarget::ReferenceTarget() {
  static_assert(kBlockCount > 0);
  reset();
}

void ReferenceTarget::hit(std::string_view name) { hit(block_index(name)); }

void ReferenceTarget::reset() {
  projects_.clear();
  next_id_ = kFirstProjectId;
  reset_coverage();
}

void ReferenceTarget::reset_coverage() {
  log_.clear();
  union_.assign(kBlockCount, 0);
  current_.assign(kBlockCount, 0);
}

std::vector<std::uint8_t> ReferenceTarget::coverage_union() const { return pack(union_); }

HttpResponse ReferenceTarget::handle(const HttpRequest& req) {
  if (starts_with(req.target, "/__")) return side_channel(req);
  current_.assign(kBlockCount, 0);
  HttpResponse resp = app(req);
  for (std::size_t k = 0; k < current_.size(); ++k) union_[k] |= current_[k];
  log_.push_back(pack(current_));
  return resp;
}

HttpResponse ReferenceTarget::side_channel(const HttpRequest& req) {
  if (req.method == "POST" && req.target == "/__reset__") {
    reset();
    return reply(200, json{{"reset", true}});
  }
  if (req.method == "POST" && req.target == "/__coverage__/reset") {
    reset_coverage();
    return reply(200, json{{"reset", true}});
  }
  if (req.method == "GET" && req.target == "/__coverage__/manifest") return reply(200, json{{"blocks", kBlockNames}});
  if (req.method == "GET" && (req.target == "/__coverage__" || req.target == "/__coverage__?reset=1")) {
    json requests = json::array();
    for (const auto& b : log_) requests.push_back(to_hex(b));
    auto body = json{{"block_count", static_cast<int>(kBlockCount)},
                     {"bitmap", to_hex(coverage_union())},
                     {"requests", requests}};
    if (req.target.ends_with("reset=1")) reset_coverage();
    return reply(200, body);
  }
  return message(404, "unknown side channel");
}

HttpResponse ReferenceTarget::app(const HttpRequest& req) {
  hit(kEntry);
  if (req.malformed) {
    hit(kMalformed);
    return message(400, "malformed request");
  }

  hit(kUriSplit);
  auto qpos = req.target.find('?');
  std::string path = req.target.substr(0, qpos);
  std::string query = qpos == std::string::npos ? "" : req.target.substr(qpos + 1);
  std::vector<std::string> segments = split(path, '/');
  if (!segments.empty() && segments.front().empty()) segments.erase(segments.begin());
  for (const auto& seg : segments) {
    if (seg.find('|') != std::string::npos) {
      // The splitter indexes a route table by the text before '|' and
      // dereferences a missing entry.
      hit(kFaultUriPipe);
      return message(500, "Internal Server Error");
    }
  }

  static const std::set<std::string> known = {"GET", "POST", "PUT", "DELETE", "PATCH", "HEAD", "OPTIONS"};
  if (!known.count(req.method)) {
    hit(kFaultUnknownMethod);
    return message(500, "Internal Server Error");
  }
  hit(kMethodDispatch);

  json body = json::object();
  if (!req.body.empty()) {
    hit(kBodyParse);
    if (!LenientJson(req.body).parse(body)) {
      hit(kBodyInvalidJson);
      return message(400, "body is not valid JSON");
    }
    if (!body.is_object()) {
      hit(kBodyNotObject);
      return message(400, "body must be a JSON object");
    }
    hit(kParamsDecode);
    // Path-like parameters are converted to the internal encoding without
    // validation; ill-formed UTF-8 raises an unhandled conversion error.
    std::vector<const json*> path_like;
    if (body.contains("branch")) path_like.push_back(&body["branch"]);
    if (body.contains("actions") && body["actions"].is_array())
      for (const auto& a : body["actions"])
        if (a.is_object() && a.contains("file_path")) path_like.push_back(&a["file_path"]);
    for (const auto* v : path_like) {
      if (v->is_string() && !is_valid_utf8(v->get_ref<const std::string&>())) {
        hit(kFaultInvalidUtf8);
        return message(500, "Internal Server Error");
      }
    }
  }

  std::map<std::string, std::string> params;
  if (!query.empty()) {
    hit(kUriQuery);
    for (const auto& kv : split(query, '&')) {
      auto eq = kv.find('=');
      params[kv.substr(0, eq)] = eq == std::string::npos ? "" : kv.substr(eq + 1);
    }
  }

  hit(kAuthCheck);
  auto token = req.header("PRIVATE-TOKEN");
  if (token.empty()) {
    hit(kAuthMissing);
    return message(401, "401 Unauthorized");
  }
  if (token != kToken) {
    hit(kAuthInvalid);
    return message(401, "401 Unauthorized");
  }

  hit(kRouteMatch);
  const auto n = segments.size();
  auto not_allowed = [&] {
    hit(kRouteMethodNotAllowed);
    return message(405, "405 Method Not Allowed");
  };
  if (n < 2 || segments[0] != "api" || segments[1] != "projects") {
    hit(kRouteNotFound);
    return message(404, "404 Not Found");
  }

  auto string_field = [&](const char* key) -> const std::string* {
    if (!body.contains(key) || !body[key].is_string()) return nullptr;
    return &body[key].get_ref<const std::string&>();
  };

  if (n == 2) {
    if (req.method == "POST") {
      hit(kProjectsCreate);
      const auto* name = string_field("name");
      if (!name) {
        hit(kProjectsCreateMissingName);
        return message(400, "name is missing");
      }
      if (name->empty() || name->size() > 255 || !is_valid_utf8(*name)) {
        hit(kProjectsCreateBadName);
        return message(400, "name is invalid");
      }
      for (const auto& [id, p] : projects_) {
        if (p.name == *name) {
          hit(kProjectsCreateNameTaken);
          return message(409, "name has already been taken");
        }
      }
      hit(kProjectsCreateOk);
      Project p;
      p.id = next_id_++;
      p.name = *name;
      p.branches["master"] = Branch{};
      projects_[p.id] = p;
      return reply(201, json{{"id", p.id}, {"name", p.name}});
    }
    if (req.method == "GET") {
      hit(kProjectsList);
      long page = 1;
      if (params.count("page")) {
        hit(kProjectsListPageParam);
        if (!parse_long(params["page"], page) || page < 1) {
          hit(kProjectsListBadPage);
          return message(400, "page is invalid");
        }
      }
      json items = json::array();
      long skip = (page - 1) * kPageSize, index = 0;
      for (const auto& [id, p] : projects_) {
        if (index++ < skip) continue;
        if (static_cast<long>(items.size()) == kPageSize) break;
        items.push_back(json{{"id", p.id}, {"name", p.name}});
      }
      hit(items.empty() ? kProjectsListEmpty : kProjectsListItems);
      return reply(200, items);
    }
    return not_allowed();
  }

  hit(kProjectLookup);
  long pid = 0;
  if (!parse_long(segments[2], pid)) {
    hit(kProjectBadId);
    return message(400, "project id is invalid");
  }
  auto pit = projects_.find(pid);
  if (pit == projects_.end()) {
    hit(kProjectNotFound);
    return message(404, "404 Project Not Found");
  }
  Project& project = pit->second;

  if (n == 3) {
    if (req.method == "GET") {
      hit(kProjectsGetOk);
      return reply(200, json{{"id", project.id}, {"name", project.name}});
    }
    if (req.method == "DELETE") {
      hit(kProjectsDeleteOk);
      projects_.erase(pit);
      return reply(202, json{{"message", "202 Accepted"}});
    }
    if (req.method == "PUT") {
      hit(kProjectsUpdate);
      const auto* name = string_field("name");
      if (!name || name->empty() || !is_valid_utf8(*name)) {
        hit(kProjectsUpdateBadName);
        return message(400, "name is invalid");
      }
      hit(kProjectsUpdateOk);
      project.name = *name;
      return reply(200, json{{"id", project.id}, {"name", project.name}});
    }
    return not_allowed();
  }

  if (n < 5 || segments[3] != "repository") {
    hit(kRouteNotFound);
    return message(404, "404 Not Found");
  }

  if (segments[4] == "branches" && n == 5) {
    if (req.method == "POST") {
      hit(kBranchesCreate);
      const auto* name = string_field("branch");
      const auto* ref = string_field("ref");
      static const std::string kDefaultRef = "master";
      if (!ref && !body.contains("ref")) ref = &kDefaultRef;
      if (!name || !ref) {
        hit(kBranchesCreateMissingField);
        return message(400, "branch is required and ref must be a string");
      }
      if (!valid_branch_name(*name)) {
        hit(kBranchesCreateBadName);
        return message(400, "Branch name is invalid");
      }
      if (!project.branches.count(*ref)) {
        hit(kBranchesCreateRefNotFound);
        return message(404, "Invalid reference name");
      }
      if (project.branches.count(*name)) {
        hit(kBranchesCreateExists);
        return message(409, "Branch already exists");
      }
      hit(kBranchesCreateOk);
      project.branches[*name] = project.branches[*ref];
      return reply(201, json{{"branch", *name}, {"name", *name}, {"protected", false}});
    }
    if (req.method == "GET") {
      hit(kBranchesList);
      json items = json::array();
      for (const auto& [name, b] : project.branches) items.push_back(json{{"name", name}, {"commits", b.commits}});
      hit(kBranchesListOk);
      return reply(200, items);
    }
    return not_allowed();
  }

  if (segments[4] == "branches" && n == 6) {
    hit(kBranchLookup);
    auto bit = project.branches.find(segments[5]);
    if (bit == project.branches.end()) {
      hit(kBranchNotFound);
      return message(404, "404 Branch Not Found");
    }
    if (req.method == "GET") {
      hit(kBranchesGetOk);
      return reply(200, json{{"name", bit->first}, {"commits", bit->second.commits}});
    }
    if (req.method == "DELETE") {
      if (bit->first == "master") {
        hit(kBranchesDeleteDefault);
        return message(400, "Cannot remove the default branch");
      }
      hit(kBranchesDeleteOk);
      project.branches.erase(bit);
      return reply(204, json::object());
    }
    return not_allowed();
  }

  if (segments[4] == "commits" && n == 5) {
    if (req.method == "POST") {
      hit(kCommitsCreate);
      const auto* branch = string_field("branch");
      const auto* msg = string_field("commit_message");
      if (!branch || !msg || !body.contains("actions")) {
        hit(kCommitsCreateMissingField);
        return message(400, "branch, commit_message and actions are required");
      }
      auto bit = project.branches.find(*branch);
      if (bit == project.branches.end()) {
        hit(kCommitsCreateBranchNotFound);
        return message(400, "You can only create or edit files when you are on a branch");
      }
      const auto& actions = body["actions"];
      if (!actions.is_array() || actions.empty()) {
        hit(kCommitsCreateBadActions);
        return message(400, "actions is invalid");
      }
      auto files = bit->second.files;
      for (const auto& a : actions) {
        if (!a.is_object() || !a.contains("action") || !a["action"].is_string() || !a.contains("file_path") ||
            !a["file_path"].is_string()) {
          hit(kCommitsCreateBadActions);
          return message(400, "actions is invalid");
        }
        const auto& kind = a["action"].get_ref<const std::string&>();
        const auto& file = a["file_path"].get_ref<const std::string&>();
        bool exists = files.count(file) > 0;
        if (kind == "create") {
          hit(kCommitsActionCreate);
          if (exists) {
            hit(kCommitsFileExists);
            return message(400, "A file with this name already exists");
          }
          files.insert(file);
          continue;
        }
        int block = kind == "delete"   ? kCommitsActionDelete
                    : kind == "move"   ? kCommitsActionMove
                    : kind == "update" ? kCommitsActionUpdate
                    : kind == "chmod"  ? kCommitsActionChmod
                                       : -1;
        if (block < 0) {
          hit(kCommitsActionUnknown);
          return message(400, "Unknown action '" + kind + "'");
        }
        hit(block);
        if (!exists) {
          hit(kCommitsFileMissing);
          return message(400, "A file with this name doesn't exist");
        }
        if (kind == "delete" || kind == "move") files.erase(file);
      }
      hit(kCommitsCreateOk);
      bit->second.files = std::move(files);
      ++bit->second.commits;
      return reply(201, json{{"id", to_hex({static_cast<std::uint8_t>(project.id & 0xff),
                                            static_cast<std::uint8_t>(bit->second.commits)})},
                             {"branch", bit->first},
                             {"message", *msg}});
    }
    if (req.method == "GET") {
      hit(kCommitsList);
      json items = json::array();
      for (const auto& [name, b] : project.branches)
        if (b.commits) items.push_back(json{{"branch", name}, {"count", b.commits}});
      hit(kCommitsListOk);
      return reply(200, items);
    }
    return not_allowed();
  }

  hit(kRouteNotFound);
  return message(404, "404 Not Found");
}

ReferenceServer::ReferenceServer() = default;

int ReferenceServer::start(int port) {
  server_ = std::make_unique<HttpServer>([this](const HttpRequest& r) { return target_.handle(r); });
  return server_->start(port);
}

void ReferenceServer::stop() {
  if (server_) server_->stop();
}

std::string ReferenceServer::base_url() const {
  return "http://127.0.0.1:" + std::to_string(server_ ? server_->port() : 0);
}

}  // namespace seqfuzz
