// Copyright 2026 The sfgan Authors
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

#include "sfgan/container.h"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace sfgan {

namespace {

constexpr char kMagic[4] = {'S', 'F', 'G', 'B'};

size_t dtype_size(DType t) {
  switch (t) {
    case DType::kF32: return 4;
    case DType::kU8: return 1;
    case DType::kI64: return 8;
    case DType::kF64: return 8;
  }
  throw std::runtime_error("container: unknown dtype");
}

// Payloads are stored in host order in memory and little-endian on disk.
void swap_elements(std::vector<uint8_t>& bytes, size_t width) {
  if constexpr (std::endian::native == std::endian::big) {
    for (size_t i = 0; i + width <= bytes.size(); i += width) {
      std::reverse(bytes.begin() + i, bytes.begin() + i + width);
    }
  } else {
    (void)bytes;
    (void)width;
  }
}

template <typename T>
void write_le(std::ostream& os, T value) {
  uint8_t buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(buf, buf + sizeof(T));
  }
  os.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

template <typename T>
T read_le(std::istream& is) {
  uint8_t buf[sizeof(T)];
  if (!is.read(reinterpret_cast<char*>(buf), sizeof(T))) {
    throw std::runtime_error("container: truncated file");
  }
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(buf, buf + sizeof(T));
  }
  T value;
  std::memcpy(&value, buf, sizeof(T));
  return value;
}

template <typename T>
Blob make_blob(DType dtype, std::vector<uint64_t> dims, std::span<const T> data) {
  Blob b;
  b.dtype = dtype;
  b.dims = std::move(dims);
  if (b.count() != data.size()) {
    throw std::invalid_argument("container: blob dims do not match data length");
  }
  b.bytes.resize(data.size_bytes());
  if (!data.empty()) std::memcpy(b.bytes.data(), data.data(), data.size_bytes());
  return b;
}

template <typename T>
std::vector<T> blob_values(const Blob& b, DType expect, const std::string& name) {
  if (b.dtype != expect) {
    throw std::runtime_error("container: blob '" + name + "' has wrong dtype");
  }
  std::vector<T> out(b.count());
  if (!out.empty()) std::memcpy(out.data(), b.bytes.data(), b.bytes.size());
  return out;
}

}  // namespace

uint64_t Blob::count() const {
  uint64_t n = 1;
  for (uint64_t d : dims) n *= d;
  return n;
}

void BlobFile::put_tensor(const std::string& name, const Tensor& t) {
  std::vector<uint64_t> dims(t.shape().dims().begin(), t.shape().dims().end());
  put_f32(name, std::move(dims), t.data());
}

void BlobFile::put_f32(const std::string& name, std::vector<uint64_t> dims,
                       std::span<const float> data) {
  blobs_[name] = make_blob(DType::kF32, std::move(dims), data);
}

void BlobFile::put_f64(const std::string& name, std::span<const double> data) {
  blobs_[name] = make_blob(DType::kF64, {data.size()}, data);
}

void BlobFile::put_u8(const std::string& name, std::span<const uint8_t> data) {
  blobs_[name] = make_blob(DType::kU8, {data.size()}, data);
}

void BlobFile::put_i64(const std::string& name, int64_t value) {
  put_i64s(name, std::span<const int64_t>(&value, 1));
}

void BlobFile::put_i64s(const std::string& name, std::span<const int64_t> data) {
  blobs_[name] = make_blob(DType::kI64, {data.size()}, data);
}

void BlobFile::put_string(const std::string& name, std::string_view text) {
  put_u8(name, std::span<const uint8_t>(
                   reinterpret_cast<const uint8_t*>(text.data()), text.size()));
}

bool BlobFile::contains(const std::string& name) const {
  return blobs_.contains(name);
}

std::vector<std::string> BlobFile::names(std::string_view prefix) const {
  std::vector<std::string> out;
  for (const auto& [name, blob] : blobs_) {
    if (name.starts_with(prefix)) out.push_back(name);
  }
  return out;
}

void BlobFile::erase_prefix(std::string_view prefix) {
  std::erase_if(blobs_, [&](const auto& kv) { return kv.first.starts_with(prefix); });
}

const Blob& BlobFile::get(const std::string& name) const {
  auto it = blobs_.find(name);
  if (it == blobs_.end()) {
    throw std::runtime_error("container: missing blob '" + name + "'");
  }
  return it->second;
}

Tensor BlobFile::get_tensor(const std::string& name) const {
  const Blob& b = get(name);
  std::vector<int64_t> dims(b.dims.begin(), b.dims.end());
  return Tensor(Shape(std::move(dims)), blob_values<float>(b, DType::kF32, name));
}

std::vector<float> BlobFile::get_f32(const std::string& name) const {
  return blob_values<float>(get(name), DType::kF32, name);
}

std::vector<double> BlobFile::get_f64(const std::string& name) const {
  return blob_values<double>(get(name), DType::kF64, name);
}

std::vector<uint8_t> BlobFile::get_u8(const std::string& name) const {
  return blob_values<uint8_t>(get(name), DType::kU8, name);
}

int64_t BlobFile::get_i64(const std::string& name) const {
  auto v = get_i64s(name);
  if (v.size() != 1) {
    throw std::runtime_error("container: blob '" + name + "' is not a scalar");
  }
  return v[0];
}

std::vector<int64_t> BlobFile::get_i64s(const std::string& name) const {
  return blob_values<int64_t>(get(name), DType::kI64, name);
}

std::string BlobFile::get_string(const std::string& name) const {
  auto bytes = get_u8(name);
  return std::string(bytes.begin(), bytes.end());
}

void BlobFile::save(const std::string& path) const {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("container: cannot open " + path + " for writing");
  os.write(kMagic, 4);
  write_le<uint32_t>(os, kVersion);
  write_le<uint32_t>(os, static_cast<uint32_t>(blobs_.size()));
  for (const auto& [name, blob] : blobs_) {
    write_le<uint32_t>(os, static_cast<uint32_t>(name.size()));
    os.write(name.data(), static_cast<std::streamsize>(name.size()));
    write_le<uint8_t>(os, static_cast<uint8_t>(blob.dtype));
    write_le<uint8_t>(os, static_cast<uint8_t>(blob.dims.size()));
    for (uint64_t d : blob.dims) write_le<uint64_t>(os, d);
    std::vector<uint8_t> payload = blob.bytes;
    swap_elements(payload, dtype_size(blob.dtype));
    os.write(reinterpret_cast<const char*>(payload.data()),
             static_cast<std::streamsize>(payload.size()));
  }
  if (!os) throw std::runtime_error("container: write failed for " + path);
}

BlobFile BlobFile::load(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("container: cannot open " + path);
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) {
    throw std::runtime_error("container: " + path + " is not an sfgan container");
  }
  const uint32_t version = read_le<uint32_t>(is);
  if (version != kVersion) {
    throw std::runtime_error("container: unsupported version " +
                             std::to_string(version));
  }
  const uint32_t count = read_le<uint32_t>(is);
  BlobFile file;
  for (uint32_t i = 0; i < count; ++i) {
    const uint32_t name_len = read_le<uint32_t>(is);
    if (name_len > (1u << 16)) throw std::runtime_error("container: corrupt name length");
    std::string name(name_len, '\0');
    if (!is.read(name.data(), name_len)) throw std::runtime_error("container: truncated file");
    Blob b;
    const uint8_t dtype = read_le<uint8_t>(is);
    if (dtype > 3) throw std::runtime_error("container: unknown dtype");
    b.dtype = static_cast<DType>(dtype);
    const uint8_t rank = read_le<uint8_t>(is);
    for (uint8_t r = 0; r < rank; ++r) b.dims.push_back(read_le<uint64_t>(is));
    const uint64_t bytes = b.count() * dtype_size(b.dtype);
    if (bytes > (uint64_t{1} << 34)) throw std::runtime_error("container: corrupt blob size");
    b.bytes.resize(bytes);
    if (!is.read(reinterpret_cast<char*>(b.bytes.data()),
                 static_cast<std::streamsize>(bytes))) {
      throw std::runtime_error("container: truncated file");
    }
    swap_elements(b.bytes, dtype_size(b.dtype));
    file.blobs_[name] = std::move(b);
  }
  return file;
}

bool BlobFile::operator==(const BlobFile& other) const {
  return blobs_ == other.blobs_;
}

}  // namespace sfgan
