// Copyright 2026 The thzsense Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace thz::ad {

/// Named float32 array inside a checkpoint container.
struct Blob {
  std::string name;
  std::vector<std::uint32_t> dims;
  std::vector<float> data;
};

// Container layout (little-endian):
//   "CRN1" | u32 version | u32 blob count |
//   per blob: u32 name length | name bytes | u32 ndims | u32 dims[ndims] |
//             f32 data[prod(dims)]
inline constexpr std::uint32_t kCheckpointVersion = 1;

void write_container(const std::filesystem::path& path, const std::vector<Blob>& blobs);
std::vector<Blob> read_container(const std::filesystem::path& path);

/// Lookup by name; throws FormatError if absent.
const Blob& find_blob(const std::vector<Blob>& blobs, std::string_view name);
const Blob* find_blob_or_null(const std::vector<Blob>& blobs, std::string_view name);

}  // namespace thz::ad
