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

#ifndef AUTOGRAD_TENSOR_H_
#define AUTOGRAD_TENSOR_H_

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace unitvc {
namespace ag {

using Shape = std::vector<int64_t>;
using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatrixMap = Eigen::Map<RowMatrix>;
using ConstMatrixMap = Eigen::Map<const RowMatrix>;

int64_t NumElements(const Shape& shape);
std::string ShapeToString(const Shape& shape);

// One vertex of the computation graph. `backward` reads `grad` of this node
// and accumulates into the grads of `inputs`.
struct Node {
  Shape shape;
  std::vector<double> value;
  std::vector<double> grad;
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> inputs;
  std::function<void(Node& self)> backward;

  // Returns the gradient buffer, allocating zeros on first use.
  std::vector<double>& MutableGrad();
};

// Reference-semantics handle to a graph node. Copies share storage, which is
// what parameters and intermediate activations both want.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::shared_ptr<Node> node) : node_(std::move(node)) {}

  static Tensor Zeros(const Shape& shape, bool requires_grad = false);
  static Tensor Full(const Shape& shape, double value);
  static Tensor FromVector(const Shape& shape, std::vector<double> values,
                           bool requires_grad = false);
  static Tensor FromMatrix(const RowMatrix& m);
  static Tensor Scalar(double value);

  bool defined() const { return node_ != nullptr; }
  const Shape& shape() const { return node_->shape; }
  int64_t dim(int axis) const;
  int64_t numel() const { return static_cast<int64_t>(node_->value.size()); }
  int64_t rows() const { return dim(0); }
  int64_t cols() const { return dim(1); }

  double* data() { return node_->value.data(); }
  const double* data() const { return node_->value.data(); }
  std::vector<double>& values() { return node_->value; }
  const std::vector<double>& values() const { return node_->value; }
  double item() const;
  double at(int64_t r, int64_t c) const;

  bool requires_grad() const { return node_->requires_grad; }
  void set_requires_grad(bool value) { node_->requires_grad = value; }
  bool has_grad() const { return !node_->grad.empty(); }
  // Gradient buffer; zeros when nothing has been accumulated yet.
  const std::vector<double>& grad() const;
  std::vector<double>& mutable_grad() { return node_->MutableGrad(); }
  void ZeroGrad() { node_->grad.clear(); }

  // 2-d view of the value. Tensors of rank 1 are viewed as one row.
  ConstMatrixMap matrix() const;
  MatrixMap mutable_matrix();
  RowMatrix ToMatrix() const { return matrix(); }

  // Reverse-mode sweep from this scalar; seeds d(this)/d(this) = 1.
  void Backward() const;
  // Same value, no history.
  Tensor Detach() const;
  Tensor Clone() const;

  Node* node() const { return node_.get(); }
  const std::shared_ptr<Node>& shared_node() const { return node_; }

 private:
  std::shared_ptr<Node> node_;
};

// While alive, newly created ops record no history.
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

bool GradEnabled();

// Builds a result node; history is kept only when grad mode is on and at least
// one input requires grad.
Tensor MakeResult(Shape shape, std::vector<double> value,
                  std::vector<Tensor> inputs,
                  std::function<void(Node& self)> backward);

}  // namespace ag
}  // namespace unitvc

#endif  // AUTOGRAD_TENSOR_H_
