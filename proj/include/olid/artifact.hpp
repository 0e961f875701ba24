// Copyright 2026 The olidkit Authors.
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

#pragma once

// On-disk convention shared by every trained model: a directory holding
// `manifest.json` (format version, byte order, element widths, config,
// provenance) plus one raw little-endian array file per parameter tensor.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "olid/dense.hpp"

namespace olid {

using Json = nlohmann::json;

inline constexpr int kArtifactFormatVersion = 1;

/// Provenance block stamped into every artifact.
struct Provenance {
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string version;
};

Json to_json(const Provenance& p);

/// 64-bit FNV-1a, used for both n-gram hashing and config fingerprints.
std::uint64_t fnv1a64(std::string_view bytes) noexcept;

/// Hex FNV-1a digest of the canonical (sorted-key, compact) JSON dump.
std::string config_hash(const Json& config);

class ArtifactWriter {
 public:
  ArtifactWriter(std::filesystem::path dir, std::string kind);

  Json& meta() { return meta_; }

  void put(const std::string& name, const MatrixF& m);
  void put(const std::string& name, const MatrixD& m);
  void put(const std::string& name, const std::vector<std::int32_t>& v);
  void put(const std::string& name, const std::vector<float>& v);
  void put(const std::string& name, const std::vector<double>& v);

  /// Writes manifest.json; arrays are already on disk.
  void finish();

 private:
  void write_raw(const std::string& name, const std::string& dtype, std::vector<std::int64_t> shape,
                 const void* data, std::size_t count, std::size_t width);

  std::filesystem::path dir_;
  Json meta_;
  Json arrays_ = Json::array();
};

class ArtifactReader {
 public:
  explicit ArtifactReader(std::filesystem::path dir, const std::string& expected_kind = "");

  const Json& meta() const { return meta_; }
  const std::filesystem::path& dir() const { return dir_; }

  MatrixF matrix_f32(const std::string& name) const;
  MatrixD matrix_f64(const std::string& name) const;
  std::vector<std::int32_t> ints(const std::string& name) const;
  std::vector<float> floats(const std::string& name) const;
  std::vector<double> doubles(const std::string& name) const;

 private:
  const Json& entry(const std::string& name, const std::string& dtype) const;
  std::vector<char> read_raw(const Json& e, std::size_t width) const;

  std::filesystem::path dir_;
  Json meta_;
};

/// Reads a whole file; io error if missing.
std::string read_file(const std::filesystem::path& p);
void write_file(const std::filesystem::path& p, std::string_view contents);

}  // namespace olid
