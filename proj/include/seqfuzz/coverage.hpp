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
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace seqfuzz {

class CoverageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Block coverage, one bit per declared block (bit k lives in byte k/8,
// LSB first).
class CoverageBitmap {
 public:
  CoverageBitmap() = default;
  explicit CoverageBitmap(std::size_t width) : width_(width), bytes_((width + 7) / 8, 0) {}
  // `width` 0 takes 8 bits per hex byte. Bits at or past `width` must be clear.
  static CoverageBitmap from_hex(std::string_view hex, std::size_t width = 0);
  static CoverageBitmap from_bytes(std::vector<std::uint8_t> bytes, std::size_t width = 0);

  std::string to_hex() const;
  std::size_t width() const { return width_; }
  const std::vector<std::uint8_t>& bytes() const { return bytes_; }

  bool test(std::size_t k) const;
  void set(std::size_t k);
  std::size_t count() const;

  // Bits set here but not in `seen`.
  std::size_t count_new(const CoverageBitmap& seen) const;
  // ORs `other` in; returns the number of newly set bits.
  std::size_t merge(const CoverageBitmap& other);

  bool operator==(const CoverageBitmap&) const = default;

 private:
  void check_width(const CoverageBitmap& other) const;

  std::size_t width_ = 0;
  std::vector<std::uint8_t> bytes_;
};

// True iff `b` sets a block absent from `global`; `global` absorbs `b`
// exactly when true. An empty (width 0) global adopts b's width.
bool is_new_path(const CoverageBitmap& b, CoverageBitmap& global);

// Greedy first-seen pass in corpus order: keeps each entry that reaches a
// block none of the kept entries reached. Returns kept indices.
std::vector<std::size_t> distill(const std::vector<CoverageBitmap>& entries);

struct BugObservation {
  std::string test_id;
  std::size_t request_index = 0;  // first request answered with 500
  CoverageBitmap bitmap;          // that request's coverage
};

struct BugGroup {
  std::string key;                   // hex bitmap
  std::vector<std::size_t> members;  // indices into the observations
};

// Groups 500s by the bitmap of the first failing request; groups are
// ordered by first occurrence.
std::vector<BugGroup> dedup_bugs(const std::vector<BugObservation>& bugs);

}  // namespace seqfuzz
