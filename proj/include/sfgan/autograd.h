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

// Define-by-run reverse-mode differentiation. A Graph records every
// differentiable operation executed through sfgan::ops in execution order,
// which is a topological order by construction. Graph::backward walks the
// record in reverse and deposits gradients into the Parameters that were
// used as leaves.

#ifndef SFGAN_AUTOGRAD_H_
#define SFGAN_AUTOGRAD_H_

#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "sfgan/tensor.h"

namespace sfgan {

struct Parameter {
  std::string name;
  Tensor value;
  Tensor grad;  // same shape as value
  bool trainable = true;

  Parameter(std::string n, Tensor v, bool train = true);
  void zero_grad() { grad.fill(0.0f); }
};

// Ordered, named collection of parameters with stable addresses.
class ParameterStore {
 public:
  ParameterStore() = default;
  ParameterStore(const ParameterStore& other);
  ParameterStore& operator=(const ParameterStore& other);
  ParameterStore(ParameterStore&&) noexcept = default;
  ParameterStore& operator=(ParameterStore&&) noexcept = default;

  Parameter& add(std::string name, Tensor value, bool trainable = true);
  Parameter& get(std::string_view name);
  const Parameter& get(std::string_view name) const;
  Parameter* find(std::string_view name);
  const Parameter* find(std::string_view name) const;

  size_t size() const { return params_.size(); }
  Parameter& operator[](size_t i) { return *params_[i]; }
  const Parameter& operator[](size_t i) const { return *params_[i]; }

  // Total number of scalar weights.
  int64_t scalar_count() const;
  void zero_grad();

  auto begin() { return params_.begin(); }
  auto end() { return params_.end(); }
  auto begin() const { return params_.begin(); }
  auto end() const { return params_.end(); }

 private:
  std::vector<std::unique_ptr<Parameter>> params_;
};

class Graph;

// Handle to a value recorded in a Graph.
class Var {
 public:
  Var() = default;
  Var(Graph* graph, size_t id) : graph_(graph), id_(id) {}

  const Tensor& value() const;
  const Shape& shape() const { return value().shape(); }
  bool requires_grad() const;
  Graph& graph() const { return *graph_; }
  size_t id() const { return id_; }
  bool valid() const { return graph_ != nullptr; }

 private:
  Graph* graph_ = nullptr;
  size_t id_ = 0;
};

// Passed to an operation's backward function. Gradients of inputs that do
// not require one are reported as nullptr.
class BackwardContext {
 public:
  BackwardContext(Graph& graph, size_t node) : graph_(graph), node_(node) {}
  const Tensor& out_grad() const;
  const Tensor& output() const;
  const Tensor& input(size_t i) const;
  Tensor* input_grad(size_t i);

 private:
  Graph& graph_;
  size_t node_;
};

using BackwardFn = std::function<void(BackwardContext&)>;

class Graph {
 public:
  Graph() = default;
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  Var constant(Tensor value);
  // Leaf bound to a Parameter. Requires a gradient iff the parameter is
  // trainable and its store has not been frozen in this graph.
  Var param(Parameter& p);
  // Treat every parameter of `store` as a constant in this graph.
  void freeze(const ParameterStore& store);

  // Appends an operation. `fn` is dropped when no input requires a grad.
  Var record(Tensor value, std::vector<Var> inputs, BackwardFn fn);

  // Sets Parameter::grad = d(loss)/d(value) for every parameter leaf of
  // this graph. The graph can be differentiated only once.
  void backward(const Var& loss);

  size_t size() const { return nodes_.size(); }
  bool consumed() const { return consumed_; }

 private:
  friend class Var;
  friend class BackwardContext;

  struct Node {
    Tensor value;
    Tensor grad;
    std::vector<size_t> inputs;
    BackwardFn fn;
    Parameter* param = nullptr;
    bool requires_grad = false;
  };

  Node& node(size_t id) { return nodes_[id]; }
  const Node& node(size_t id) const { return nodes_[id]; }
  Tensor& grad_slot(size_t id);

  std::deque<Node> nodes_;
  std::unordered_set<const Parameter*> frozen_;
  bool consumed_ = false;
};

}  // namespace sfgan

#endif  // SFGAN_AUTOGRAD_H_
