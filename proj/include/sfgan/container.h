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

// Versioned little-endian container of named, shape-prefixed blobs. Used for
// feature dumps and checkpoints.
//
//   magic    "SFGB"
//   u32      format version (currently 1)
//   u32      entry count
//   entries, each:
//     u32    name length, followed by the UTF-8 name
//     u8     dtype (0 = f32, 1 = u8, 2 = i64, 3 = f64)
//     u8     rank
//     u64    dims[rank]
//     payload, product(dims) elements of dtype, little-endian

#ifndef SFGAN_CONTAINER_H_
#define SFGAN_CONTAINER_H_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sfgan/tensor.h"

namespace sfgan {

enum class DType : uint8_t { kF32 = 0, kU8 = 1, kI64 = 2, kF64 = 3 };

struct Blob {
  DType dtype = DType::kF32;
  std::vector<uint64_t> dims;
  std::vector<uint8_t> bytes;  // host-order payload

  uint64_t count() const;
  bool operator==(const Blob&) const = default;
};

class BlobFile {
 public:
  static constexpr uint32_t kVersion = 1;

  void put_tensor(const std::string& name, const Tensor& t);
  void put_f32(const std::string& name, std::vector<uint64_t> dims,
               std::span<const float> data);
  void put_f64(const std::string& name, std::span<const double> data);
  void put_u8(const std::string& name, std::span<const uint8_t> data);
  void put_i64(const std::string& name, int64_t value);
  void put_i64s(const std::string& name, std::span<const int64_t> data);
  void put_string(const std::string& name, std::string_view text);

  bool contains(const std::string& name) const;
  // Names starting with `prefix`, in lexicographic order.
  std::vector<std::string> names(std::string_view prefix = {}) const;
  void erase_prefix(std::string_view prefix);

  Tensor get_tensor(const std::string& name) const;
  std::vector<float> get_f32(const std::string& name) const;
  std::vector<double> get_f64(const std::string& name) const;
  std::vector<uint8_t> get_u8(const std::string& name) const;
  int64_t get_i64(const std::string& name) const;
  std::vector<int64_t> get_i64s(const std::string& name) const;
  std::string get_string(const std::string& name) const;
  const Blob& get(const std::string& name) const;

  void save(const std::string& path) const;
  static BlobFile load(const std::string& path);

  bool operator==(const BlobFile& other) const;

 private:
  std::map<std::string, Blob> blobs_;
};

}  // namespace sfgan

#endif  // SFGAN_CONTAINER_H_
