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
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace seqfuzz {

using Rng = std::mt19937_64;

// Byte-escaping used by grammar files, seed files and transcripts.
// Printable ASCII passes through; backslash and everything else become
// \\, \n, \t, \r or \xHH. `escape_spaces` additionally escapes ' ' so a
// request line stays splittable.
std::string escape_bytes(std::string_view raw, bool escape_spaces = false);
std::string unescape_bytes(std::string_view text);

std::string to_hex(const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> from_hex(std::string_view hex);

bool is_valid_utf8(std::string_view s);

std::vector<std::string> split(std::string_view s, char sep);
std::string_view trim(std::string_view s);
bool starts_with(std::string_view s, std::string_view prefix);

// Random RFC 4122 version-4 identifier drawn from `rng`.
std::string random_uuid(Rng& rng);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

std::uint64_t fnv1a(std::string_view data, std::uint64_t seed = 14695981039346656037ull);

}  // namespace seqfuzz
