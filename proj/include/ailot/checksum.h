// Copyright 2026 The AILOT Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef AILOT_CHECKSUM_H_
#define AILOT_CHECKSUM_H_

#include <filesystem>
#include <string>
#include <string_view>

namespace ailot {

// Lowercase hex SHA-256.
std::string Sha256Hex(std::string_view data);
std::string Sha256File(const std::filesystem::path& path);

// Writes through a temporary sibling and renames it into place.
void WriteFileAtomic(const std::filesystem::path& path, std::string_view data);
std::string ReadFile(const std::filesystem::path& path);

}  // namespace ailot

#endif  // AILOT_CHECKSUM_H_
