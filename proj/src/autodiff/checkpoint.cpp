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

#include "thz/autodiff/checkpoint.hpp"

#include <fstream>
#include <functional>
#include <numeric>

#include "thz/common/binary_io.hpp"
#include "thz/common/errors.hpp"

namespace thz::ad {

namespace {
constexpr char kMagic[4] = {'C', 'R', 'N', '1'};
}

void write_container(const std::filesystem::path& path, const std::vector<Blob>& blobs) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  os.write(kMagic, 4);
  binio::put_u32(os, kCheckpointVersion);
  binio::put_u32(os, static_cast<std::uint32_t>(blobs.size()));
  for (const Blob& b : blobs) {
    const std::size_t expected = std::accumulate(b.dims.begin(), b.dims.end(), std::size_t{1},
                                                 std::multiplies<>());
    if (expected != b.data.size()) {
      throw ShapeError("checkpoint blob " + b.name + ": dims do not match data size");
    }
    binio::put_u32(os, static_cast<std::uint32_t>(b.name.size()));
    os.write(b.name.data(), static_cast<std::streamsize>(b.name.size()));
    binio::put_u32(os, static_cast<std::uint32_t>(b.dims.size()));
    for (std::uint32_t d : b.dims) binio::put_u32(os, d);
    for (float v : b.data) binio::put_f32(os, v);
  }
  os.flush();
  if (!os) throw IoError("write failed for " + path.string());
}

std::vector<Blob> read_container(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path.string());
  binio::Reader r(is, path.string());
  char magic[4];
  r.read_bytes(magic, 4, "magic");
  if (std::string_view(magic, 4) != std::string_view(kMagic, 4)) r.fail("bad magic (expected CRN1)");
  const std::uint32_t version = r.u32("version");
  if (version != kCheckpointVersion) {
    r.fail("unsupported checkpoint version " + std::to_string(version) + " (expected " +
           std::to_string(kCheckpointVersion) + ")");
  }
  const std::uint32_t count = r.u32("blob count");
  std::vector<Blob> blobs;
  blobs.reserve(count);
  for (std::uint32_t k = 0; k < count; ++k) {
    Blob b;
    const std::uint32_t name_len = r.u32("name length");
    if (name_len > 4096) r.fail("implausible blob name length " + std::to_string(name_len));
    b.name.resize(name_len);
    r.read_bytes(b.name.data(), name_len, "blob name");
    const std::uint32_t ndims = r.u32("ndims");
    if (ndims > 8) r.fail("implausible dimension count for blob " + b.name);
    std::size_t n = 1;
    for (std::uint32_t d = 0; d < ndims; ++d) {
      b.dims.push_back(r.u32("dim"));
      n *= b.dims.back();
    }
    b.data.resize(n);
    for (float& v : b.data) v = r.f32("blob data");
    blobs.push_back(std::move(b));
  }
  return blobs;
}

const Blob* find_blob_or_null(const std::vector<Blob>& blobs, std::string_view name) {
  for (const Blob& b : blobs)
    if (b.name == name) return &b;
  return nullptr;
}

const Blob& find_blob(const std::vector<Blob>& blobs, std::string_view name) {
  if (const Blob* b = find_blob_or_null(blobs, name)) return *b;
  throw FormatError("checkpoint is missing blob '" + std::string(name) + "'");
}

}  // namespace thz::ad
