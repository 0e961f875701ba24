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

#include "olid/artifact.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "olid/error.hpp"

namespace olid {
namespace fs = std::filesystem;

namespace {

// Array files are little-endian regardless of host.
void to_little_endian(char* data, std::size_t count, std::size_t width) {
  if constexpr (std::endian::native == std::endian::big) {
    for (std::size_t i = 0; i < count; ++i) std::reverse(data + i * width, data + (i + 1) * width);
  }
}

}  // namespace

Json to_json(const Provenance& p) {
  return Json{{"config_hash", p.config_hash}, {"seed", p.seed}, {"version", p.version}};
}

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string config_hash(const Json& config) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(config.dump())));
  return buf;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) fail(ErrorCategory::io, "cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, std::string_view contents) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCategory::io, "cannot write " + p.string());
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) fail(ErrorCategory::io, "short write to " + p.string());
}

ArtifactWriter::ArtifactWriter(fs::path dir, std::string kind) : dir_(std::move(dir)) {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec) fail(ErrorCategory::io, "cannot create " + dir_.string() + ": " + ec.message());
  meta_ = Json{{"format", "olidkit-artifact"},
               {"format_version", kArtifactFormatVersion},
               {"kind", std::move(kind)},
               {"byte_order", "little"}};
}

void ArtifactWriter::write_raw(const std::string& name, const std::string& dtype,
                               std::vector<std::int64_t> shape, const void* data,
                               std::size_t count, std::size_t width) {
  std::string bytes(count * width, '\0');
  if (count) std::memcpy(bytes.data(), data, bytes.size());
  to_little_endian(bytes.data(), count, width);
  const std::string file = name + "." + dtype;
  write_file(dir_ / file, bytes);
  arrays_.push_back(Json{{"name", name},
                         {"file", file},
                         {"dtype", dtype},
                         {"element_width", width},
                         {"shape", std::move(shape)}});
}

void ArtifactWriter::put(const std::string& name, const MatrixF& m) {
  write_raw(name, "f32", {m.rows(), m.cols()}, m.data(), static_cast<std::size_t>(m.size()), 4);
}
void ArtifactWriter::put(const std::string& name, const MatrixD& m) {
  write_raw(name, "f64", {m.rows(), m.cols()}, m.data(), static_cast<std::size_t>(m.size()), 8);
}
void ArtifactWriter::put(const std::string& name, const std::vector<std::int32_t>& v) {
  write_raw(name, "i32", {static_cast<std::int64_t>(v.size())}, v.data(), v.size(), 4);
}
void ArtifactWriter::put(const std::string& name, const std::vector<float>& v) {
  write_raw(name, "f32", {static_cast<std::int64_t>(v.size())}, v.data(), v.size(), 4);
}
void ArtifactWriter::put(const std::string& name, const std::vector<double>& v) {
  write_raw(name, "f64", {static_cast<std::int64_t>(v.size())}, v.data(), v.size(), 8);
}

void ArtifactWriter::finish() {
  meta_["arrays"] = arrays_;
  write_file(dir_ / "manifest.json", meta_.dump(2) + "\n");
}

ArtifactReader::ArtifactReader(fs::path dir, const std::string& expected_kind)
    : dir_(std::move(dir)) {
  try {
    meta_ = Json::parse(read_file(dir_ / "manifest.json"));
  } catch (const Json::exception& e) {
    fail(ErrorCategory::parse, "bad manifest in " + dir_.string() + ": " + e.what());
  }
  if (meta_.value("format", "") != "olidkit-artifact")
    fail(ErrorCategory::parse, dir_.string() + " is not an olidkit artifact");
  if (meta_.value("format_version", 0) != kArtifactFormatVersion)
    fail(ErrorCategory::parse, "unsupported artifact version in " + dir_.string());
  if (meta_.value("byte_order", "") != "little")
    fail(ErrorCategory::parse, "unsupported byte order in " + dir_.string());
  if (!expected_kind.empty() && meta_.value("kind", "") != expected_kind)
    fail(ErrorCategory::parse, dir_.string() + " holds a '" + meta_.value("kind", "") +
                                   "' artifact, expected '" + expected_kind + "'");
}

const Json& ArtifactReader::entry(const std::string& name, const std::string& dtype) const {
  for (const auto& e : meta_.at("arrays")) {
    if (e.at("name") == name) {
      if (e.at("dtype") != dtype)
        fail(ErrorCategory::parse, "array " + name + " has dtype " +
                                       e.at("dtype").get<std::string>() + ", expected " + dtype);
      return e;
    }
  }
  fail(ErrorCategory::parse, "array " + name + " missing from " + dir_.string());
}

std::vector<char> ArtifactReader::read_raw(const Json& e, std::size_t width) const {
  if (e.at("element_width").get<std::size_t>() != width)
    fail(ErrorCategory::parse, "element width mismatch for " + e.at("name").get<std::string>());
  std::size_t count = 1;
  for (auto d : e.at("shape")) count *= d.get<std::size_t>();
  const std::string bytes = read_file(dir_ / e.at("file").get<std::string>());
  if (bytes.size() != count * width)
    fail(ErrorCategory::parse, "array file " + e.at("file").get<std::string>() + " has " +
                                   std::to_string(bytes.size()) + " bytes, expected " +
                                   std::to_string(count * width));
  std::vector<char> out(bytes.begin(), bytes.end());
  to_little_endian(out.data(), count, width);
  return out;
}

namespace {
template <class M>
M load_matrix(const Json& e, const std::vector<char>& raw) {
  const auto& shape = e.at("shape");
  if (shape.size() != 2) fail(ErrorCategory::parse, "array is not a matrix");
  M m(shape[0].get<Eigen::Index>(), shape[1].get<Eigen::Index>());
  if (m.size()) std::memcpy(m.data(), raw.data(), raw.size());
  return m;
}
template <class T>
std::vector<T> load_vector(const std::vector<char>& raw) {
  std::vector<T> v(raw.size() / sizeof(T));
  if (!v.empty()) std::memcpy(v.data(), raw.data(), raw.size());
  return v;
}
}  // namespace

MatrixF ArtifactReader::matrix_f32(const std::string& name) const {
  const auto& e = entry(name, "f32");
  return load_matrix<MatrixF>(e, read_raw(e, 4));
}
MatrixD ArtifactReader::matrix_f64(const std::string& name) const {
  const auto& e = entry(name, "f64");
  return load_matrix<MatrixD>(e, read_raw(e, 8));
}
std::vector<std::int32_t> ArtifactReader::ints(const std::string& name) const {
  return load_vector<std::int32_t>(read_raw(entry(name, "i32"), 4));
}
std::vector<float> ArtifactReader::floats(const std::string& name) const {
  return load_vector<float>(read_raw(entry(name, "f32"), 4));
}
std::vector<double> ArtifactReader::doubles(const std::string& name) const {
  return load_vector<double>(read_raw(entry(name, "f64"), 8));
}

}  // namespace olid
