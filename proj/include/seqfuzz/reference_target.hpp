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
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "seqfuzz/http.hpp"

namespace seqfuzz {

struct InjectedBug {
  std::string id;
  std::string trigger;
  std::string fault_block;
  std::string analogue;
};

// The three 500-class faults planted in the reference target.
const std::vector<InjectedBug>& injected_bug_catalog();

// Ordered block names; a block's index is its bit in coverage bitmaps.
const std::vector<std::string>& reference_manifest();
int block_index(std::string_view name);

// A GitLab-like projects/branches/commits service with declared basic
// blocks. Not thread-safe; the server serializes calls.
class ReferenceTarget {
 public:
  ReferenceTarget();

  HttpResponse handle(const HttpRequest& req);
  void reset();

  // Blocks hit since the last coverage reset: the union and one bitmap per
  // application request, both as packed bytes (bit k of byte k/8, LSB first).
  std::vector<std::uint8_t> coverage_union() const;
  const std::vector<std::vector<std::uint8_t>>& coverage_log() const { return log_; }
  void reset_coverage();

 private:
  struct Branch {
    std::set<std::string> files;
    int commits = 0;
  };
  struct Project {
    long id = 0;
    std::string name;
    std::map<std::string, Branch> branches;
  };

  HttpResponse side_channel(const HttpRequest& req);
  HttpResponse app(const HttpRequest& req);
  void hit(int block) { current_[static_cast<std::size_t>(block)] = 1; }
  void hit(std::string_view name);

  std::map<long, Project> projects_;
  long next_id_ = 0;
  std::vector<std::uint8_t> current_;
  std::vector<std::vector<std::uint8_t>> log_;
  std::vector<std::uint8_t> union_;
};

// The target behind an HttpServer on 127.0.0.1.
class ReferenceServer {
 public:
  ReferenceServer();
  int start(int port = 0);
  void stop();
  std::string base_url() const;

 private:
  ReferenceTarget target_;
  std::unique_ptr<HttpServer> server_;
};

}  // namespace seqfuzz
