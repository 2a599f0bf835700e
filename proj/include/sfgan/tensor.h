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

#ifndef SFGAN_TENSOR_H_
#define SFGAN_TENSOR_H_

#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace sfgan {

// Dimension list of a dense tensor. Rank is 1..3; by convention a rank-3
// tensor is (batch, channels, time).
class Shape {
 public:
  Shape() = default;
  Shape(std::initializer_list<int64_t> dims);
  explicit Shape(std::vector<int64_t> dims);

  int rank() const { return static_cast<int>(dims_.size()); }
  int64_t operator[](int i) const { return dims_[i]; }
  int64_t numel() const;
  const std::vector<int64_t>& dims() const { return dims_; }

  bool operator==(const Shape& other) const { return dims_ == other.dims_; }
  bool operator!=(const Shape& other) const { return !(*this == other); }

  std::string str() const;

 private:
  std::vector<int64_t> dims_;
};

// Dense row-major float tensor with value semantics.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape, float fill = 0.0f);
  Tensor(Shape shape, std::vector<float> data);

  static Tensor scalar(float v) { return Tensor(Shape{1}, std::vector<float>{v}); }
  // (1, 1, n) view of a signal.
  static Tensor signal(std::span<const float> samples);

  const Shape& shape() const { return shape_; }
  int64_t numel() const { return static_cast<int64_t>(data_.size()); }
  bool empty() const { return data_.empty(); }

  std::span<float> data() { return data_; }
  std::span<const float> data() const { return data_; }
  const std::vector<float>& vec() const { return data_; }

  float& operator[](int64_t i) { return data_[i]; }
  const float& operator[](int64_t i) const { return data_[i]; }

  // Accessors for rank-3 tensors.
  int64_t batch() const { return shape_[0]; }
  int64_t channels() const { return shape_[1]; }
  int64_t length() const { return shape_[2]; }
  float& at(int64_t b, int64_t c, int64_t t) {
    return data_[(b * shape_[1] + c) * shape_[2] + t];
  }
  const float& at(int64_t b, int64_t c, int64_t t) const {
    return data_[(b * shape_[1] + c) * shape_[2] + t];
  }

  Tensor reshaped(Shape shape) const;
  void fill(float v);
  bool all_finite() const;

 private:
  Shape shape_;
  std::vector<float> data_;
};

}  // namespace sfgan

#endif  // SFGAN_TENSOR_H_
