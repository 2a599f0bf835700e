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

#include "sfgan/autograd.h"

#include <stdexcept>

namespace sfgan {

Parameter::Parameter(std::string n, Tensor v, bool train)
    : name(std::move(n)), value(std::move(v)), grad(value.shape()),
      trainable(train) {}

ParameterStore::ParameterStore(const ParameterStore& other) {
  params_.reserve(other.params_.size());
  for (const auto& p : other.params_) {
    params_.push_back(std::make_unique<Parameter>(*p));
  }
}

ParameterStore& ParameterStore::operator=(const ParameterStore& other) {
  if (this != &other) {
    ParameterStore copy(other);
    params_ = std::move(copy.params_);
  }
  return *this;
}

Parameter& ParameterStore::add(std::string name, Tensor value,
                               bool trainable) {
  if (find(name)) throw std::invalid_argument("duplicate parameter " + name);
  params_.push_back(
      std::make_unique<Parameter>(std::move(name), std::move(value), trainable));
  return *params_.back();
}

Parameter* ParameterStore::find(std::string_view name) {
  for (auto& p : params_) {
    if (p->name == name) return p.get();
  }
  return nullptr;
}

const Parameter* ParameterStore::find(std::string_view name) const {
  for (const auto& p : params_) {
    if (p->name == name) return p.get();
  }
  return nullptr;
}

Parameter& ParameterStore::get(std::string_view name) {
  Parameter* p = find(name);
  if (!p) throw std::out_of_range("no parameter named " + std::string(name));
  return *p;
}

const Parameter& ParameterStore::get(std::string_view name) const {
  const Parameter* p = find(name);
  if (!p) throw std::out_of_range("no parameter named " + std::string(name));
  return *p;
}

int64_t ParameterStore::scalar_count() const {
  int64_t n = 0;
  for (const auto& p : params_) n += p->value.numel();
  return n;
}

void ParameterStore::zero_grad() {
  for (auto& p : params_) p->zero_grad();
}

const Tensor& Var::value() const { return graph_->node(id_).value; }

bool Var::requires_grad() const { return graph_->node(id_).requires_grad; }

const Tensor& BackwardContext::out_grad() const {
  return graph_.node(node_).grad;
}

const Tensor& BackwardContext::output() const {
  return graph_.node(node_).value;
}

const Tensor& BackwardContext::input(size_t i) const {
  return graph_.node(graph_.node(node_).inputs.at(i)).value;
}

Tensor* BackwardContext::input_grad(size_t i) {
  size_t id = graph_.node(node_).inputs.at(i);
  if (!graph_.node(id).requires_grad) return nullptr;
  return &graph_.grad_slot(id);
}

Var Graph::constant(Tensor value) {
  Node n;
  n.value = std::move(value);
  nodes_.push_back(std::move(n));
  return Var(this, nodes_.size() - 1);
}

Var Graph::param(Parameter& p) {
  Node n;
  n.value = p.value;
  n.param = &p;
  n.requires_grad = p.trainable && !frozen_.contains(&p);
  nodes_.push_back(std::move(n));
  return Var(this, nodes_.size() - 1);
}

void Graph::freeze(const ParameterStore& store) {
  for (const auto& p : store) frozen_.insert(p.get());
}

Var Graph::record(Tensor value, std::vector<Var> inputs, BackwardFn fn) {
  Node n;
  n.value = std::move(value);
  n.inputs.reserve(inputs.size());
  for (const Var& v : inputs) {
    if (&v.graph() != this) {
      throw std::invalid_argument("operation mixes values from two graphs");
    }
    n.inputs.push_back(v.id());
    n.requires_grad = n.requires_grad || v.requires_grad();
  }
  if (n.requires_grad) n.fn = std::move(fn);
  nodes_.push_back(std::move(n));
  return Var(this, nodes_.size() - 1);
}

Tensor& Graph::grad_slot(size_t id) {
  Node& n = nodes_[id];
  if (n.grad.empty()) n.grad = Tensor(n.value.shape());
  return n.grad;
}

void Graph::backward(const Var& loss) {
  if (consumed_) throw std::logic_error("graph already consumed by backward");
  if (&loss.graph() != this) {
    throw std::invalid_argument("loss does not belong to this graph");
  }
  if (loss.value().numel() != 1) {
    throw std::invalid_argument("backward requires a scalar loss, got shape " +
                                loss.shape().str());
  }
  for (Node& n : nodes_) {
    if (n.param && n.requires_grad) n.param->zero_grad();
  }
  consumed_ = true;
  if (!node(loss.id()).requires_grad) return;

  grad_slot(loss.id())[0] = 1.0f;
  for (size_t i = loss.id() + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (n.grad.empty()) continue;
    if (n.fn) {
      BackwardContext ctx(*this, i);
      n.fn(ctx);
    }
    if (n.param && n.requires_grad) {
      auto dst = n.param->grad.data();
      auto src = n.grad.data();
      for (size_t k = 0; k < dst.size(); ++k) dst[k] += src[k];
    }
    // Intermediate gradients are no longer needed once propagated.
    n.grad = Tensor();
  }
}

}  // namespace sfgan
