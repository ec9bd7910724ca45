// Copyright (c) 2026 The unitvc Authors
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

#include "autograd/tensor.h"

#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace unitvc {
namespace ag {

namespace {
thread_local bool grad_enabled = true;
}  // namespace

int64_t NumElements(const Shape& shape) {
  int64_t n = 1;
  for (int64_t d : shape) n *= d;
  return n;
}

std::string ShapeToString(const Shape& shape) {
  std::ostringstream os;
  os << "[";
  for (size_t i = 0; i < shape.size(); ++i) {
    if (i) os << ", ";
    os << shape[i];
  }
  os << "]";
  return os.str();
}

std::vector<double>& Node::MutableGrad() {
  if (grad.empty()) grad.assign(value.size(), 0.0);
  return grad;
}

Tensor Tensor::Zeros(const Shape& shape, bool requires_grad) {
  auto node = std::make_shared<Node>();
  node->shape = shape;
  node->value.assign(NumElements(shape), 0.0);
  node->requires_grad = requires_grad;
  return Tensor(node);
}

Tensor Tensor::Full(const Shape& shape, double value) {
  Tensor t = Zeros(shape);
  std::fill(t.values().begin(), t.values().end(), value);
  return t;
}

Tensor Tensor::FromVector(const Shape& shape, std::vector<double> values,
                          bool requires_grad) {
  if (NumElements(shape) != static_cast<int64_t>(values.size())) {
    throw std::invalid_argument("tensor shape " + ShapeToString(shape) +
                                " does not match " +
                                std::to_string(values.size()) + " values");
  }
  auto node = std::make_shared<Node>();
  node->shape = shape;
  node->value = std::move(values);
  node->requires_grad = requires_grad;
  return Tensor(node);
}

Tensor Tensor::FromMatrix(const RowMatrix& m) {
  std::vector<double> v(m.data(), m.data() + m.size());
  return FromVector({m.rows(), m.cols()}, std::move(v));
}

Tensor Tensor::Scalar(double value) { return FromVector({1}, {value}); }

int64_t Tensor::dim(int axis) const {
  const Shape& s = node_->shape;
  if (axis < 0) axis += static_cast<int>(s.size());
  if (axis < 0 || axis >= static_cast<int>(s.size())) {
    throw std::out_of_range("axis out of range for shape " +
                            ShapeToString(s));
  }
  return s[axis];
}

double Tensor::item() const {
  if (numel() != 1) {
    throw std::logic_error("item() on tensor with shape " +
                           ShapeToString(shape()));
  }
  return node_->value[0];
}

double Tensor::at(int64_t r, int64_t c) const {
  return node_->value[r * node_->shape.back() + c];
}

const std::vector<double>& Tensor::grad() const {
  return node_->MutableGrad();
}

ConstMatrixMap Tensor::matrix() const {
  const Shape& s = node_->shape;
  if (s.size() == 1) return ConstMatrixMap(data(), 1, s[0]);
  if (s.size() != 2) {
    throw std::logic_error("matrix view needs rank <= 2, got " +
                           ShapeToString(s));
  }
  return ConstMatrixMap(data(), s[0], s[1]);
}

MatrixMap Tensor::mutable_matrix() {
  const Shape& s = node_->shape;
  if (s.size() == 1) return MatrixMap(data(), 1, s[0]);
  if (s.size() != 2) {
    throw std::logic_error("matrix view needs rank <= 2, got " +
                           ShapeToString(s));
  }
  return MatrixMap(data(), s[0], s[1]);
}

void Tensor::Backward() const {
  if (numel() != 1) {
    throw std::logic_error("Backward() needs a scalar, got " +
                           ShapeToString(shape()));
  }
  if (!node_->requires_grad) return;

  // Iterative post-order DFS gives a topological order.
  std::vector<Node*> order;
  std::unordered_set<Node*> visited;
  std::vector<std::pair<Node*, size_t>> stack;
  stack.emplace_back(node_.get(), 0);
  visited.insert(node_.get());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->inputs.size()) {
      Node* child = node->inputs[next++].get();
      if (child->requires_grad && visited.insert(child).second) {
        stack.emplace_back(child, 0);
      }
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }

  node_->MutableGrad()[0] += 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node* n = *it;
    if (n->backward && !n->grad.empty()) n->backward(*n);
  }
  // Intermediate grads are not needed after the sweep; leaves keep theirs.
  for (Node* n : order) {
    if (n->backward) std::vector<double>().swap(n->grad);
  }
}

Tensor Tensor::Detach() const {
  auto node = std::make_shared<Node>();
  node->shape = node_->shape;
  node->value = node_->value;
  return Tensor(node);
}

Tensor Tensor::Clone() const { return Detach(); }

NoGradGuard::NoGradGuard() : previous_(grad_enabled) { grad_enabled = false; }
NoGradGuard::~NoGradGuard() { grad_enabled = previous_; }

bool GradEnabled() { return grad_enabled; }

Tensor MakeResult(Shape shape, std::vector<double> value,
                  std::vector<Tensor> inputs,
                  std::function<void(Node& self)> backward) {
  auto node = std::make_shared<Node>();
  node->shape = std::move(shape);
  node->value = std::move(value);
  bool needs = false;
  if (grad_enabled) {
    for (const Tensor& t : inputs) needs = needs || t.requires_grad();
  }
  if (needs) {
    node->requires_grad = true;
    node->inputs.reserve(inputs.size());
    for (const Tensor& t : inputs) node->inputs.push_back(t.shared_node());
    node->backward = std::move(backward);
  }
  return Tensor(node);
}

}  // namespace ag
}  // namespace unitvc
