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

#include "seqfuzz/coverage.hpp"

#include <bit>
#include <map>

#include "seqfuzz/util.hpp"

namespace seqfuzz {

CoverageBitmap CoverageBitmap::from_hex(std::string_view hex, std::size_t width) {
  return from_bytes(seqfuzz::from_hex(hex), width);
}

CoverageBitmap CoverageBitmap::from_bytes(std::vector<std::uint8_t> bytes, std::size_t width) {
  if (width == 0) width = bytes.size() * 8;
  if (bytes.size() != (width + 7) / 8)
    throw CoverageError("bitmap has " + std::to_string(bytes.size()) + " bytes, width " + std::to_string(width) +
                        " needs " + std::to_string((width + 7) / 8));
  if (width % 8 && (bytes.back() >> (width % 8)))
    throw CoverageError("bitmap sets blocks past its width");
  CoverageBitmap b;
  b.width_ = width;
  b.bytes_ = std::move(bytes);
  return b;
}

std::string CoverageBitmap::to_hex() const { return seqfuzz::to_hex(bytes_); }

bool CoverageBitmap::test(std::size_t k) const { return k < width_ && ((bytes_[k / 8] >> (k % 8)) & 1); }

void CoverageBitmap::set(std::size_t k) {
  if (k >= width_) throw CoverageError("block " + std::to_string(k) + " outside width " + std::to_string(width_));
  bytes_[k / 8] |= static_cast<std::uint8_t>(1u << (k % 8));
}

std::size_t CoverageBitmap::count() const {
  std::size_t n = 0;
  for (auto b : bytes_) n += static_cast<std::size_t>(std::popcount(b));
  return n;
}

void CoverageBitmap::check_width(const CoverageBitmap& other) const {
  if (other.width_ != width_)
    throw CoverageError("bitmap width mismatch: " + std::to_string(width_) + " vs " + std::to_string(other.width_));
}

std::size_t CoverageBitmap::count_new(const CoverageBitmap& seen) const {
  check_width(seen);
  std::size_t n = 0;
  for (std::size_t i = 0; i < bytes_.size(); ++i)
    n += static_cast<std::size_t>(std::popcount(static_cast<std::uint8_t>(bytes_[i] & ~seen.bytes_[i])));
  return n;
}

std::size_t CoverageBitmap::merge(const CoverageBitmap& other) {
  auto added = other.count_new(*this);
  for (std::size_t i = 0; i < bytes_.size(); ++i) bytes_[i] |= other.bytes_[i];
  return added;
}

bool is_new_path(const CoverageBitmap& b, CoverageBitmap& global) {
  if (global.width() == 0 && b.width() != 0) global = CoverageBitmap(b.width());
  if (b.count_new(global) == 0) return false;
  global.merge(b);
  return true;
}

std::vector<std::size_t> distill(const std::vector<CoverageBitmap>& entries) {
  std::vector<std::size_t> kept;
  CoverageBitmap global;
  for (std::size_t i = 0; i < entries.size(); ++i)
    if (is_new_path(entries[i], global)) kept.push_back(i);
  return kept;
}

std::vector<BugGroup> dedup_bugs(const std::vector<BugObservation>& bugs) {
  std::vector<BugGroup> groups;
  std::map<std::string, std::size_t> by_key;
  for (std::size_t i = 0; i < bugs.size(); ++i) {
    auto key = bugs[i].bitmap.to_hex();
    auto [it, fresh] = by_key.emplace(key, groups.size());
    if (fresh) groups.push_back({key, {}});
    groups[it->second].members.push_back(i);
  }
  return groups;
}

}  // namespace seqfuzz
