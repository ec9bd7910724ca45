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

// Differentiable operations. Sequences are [time, channels] matrices; 2-d
// feature maps are rank-3 [height, width, channels] tensors.

#ifndef AUTOGRAD_OPS_H_
#define AUTOGRAD_OPS_H_

#include <cstdint>
#include <vector>

#include "autograd/tensor.h"

namespace unitvc {
namespace ag {

// [n, k] x [k, m] -> [n, m]
Tensor MatMul(const Tensor& a, const Tensor& b);

Tensor Add(const Tensor& a, const Tensor& b);
Tensor Sub(const Tensor& a, const Tensor& b);
Tensor Mul(const Tensor& a, const Tensor& b);
Tensor Scale(const Tensor& a, double s);
Tensor AddScalar(const Tensor& a, double s);

// a: [n, m], bias: [m]; adds bias to every row.
Tensor AddRowVector(const Tensor& a, const Tensor& bias);
// a: [n, m], column: [n, 1] or [n]; adds column[i] to every entry of row i.
Tensor AddColumnVector(const Tensor& a, const Tensor& column);

Tensor Relu(const Tensor& a);
Tensor LeakyRelu(const Tensor& a, double slope);
Tensor Sigmoid(const Tensor& a);

Tensor Transpose(const Tensor& a);
Tensor Reshape(const Tensor& a, const Shape& shape);
Tensor SoftmaxRows(const Tensor& a);

Tensor ConcatColumns(const std::vector<Tensor>& parts);
Tensor SliceColumns(const Tensor& a, int64_t start, int64_t count);
// v: [m] or [1, m] -> [n, m]
Tensor RepeatRows(const Tensor& v, int64_t n);
// Row i of the result is row indices[i] of a; backward scatter-adds.
Tensor GatherRows(const Tensor& a, const std::vector<int64_t>& indices);
// Rows with keep[i] true come from a, the others from fill ([m] or [1, m]).
Tensor SelectRows(const std::vector<uint8_t>& keep, const Tensor& a,
                  const Tensor& fill);
// Mean over rows: [n, m] -> [1, m]
Tensor MeanRows(const Tensor& a);
// Divides each row by its sum. Throws when a row sums below `min_total`.
Tensor NormalizeRows(const Tensor& a, double min_total);

// Row-wise layer normalization with learnable gain and bias ([m] each).
Tensor LayerNormRows(const Tensor& a, const Tensor& gain, const Tensor& bias,
                     double eps = 1e-5);

// x: [t, cin]; weight: [kernel * cin, cout] (row index = tap * cin + channel);
// bias: [cout]. Zero padding on both ends.
Tensor Conv1d(const Tensor& x, const Tensor& weight, const Tensor& bias,
              int64_t kernel, int64_t stride, int64_t pad_left,
              int64_t pad_right);

// x: [h, w, cin]; weight: [kh * kw * cin, cout]; bias: [cout].
Tensor Conv2d(const Tensor& x, const Tensor& weight, const Tensor& bias,
              int64_t kernel_h, int64_t kernel_w, int64_t stride_h,
              int64_t stride_w, int64_t pad_h, int64_t pad_w);

// Scalar reductions and losses. Results have shape [1].
Tensor Sum(const Tensor& a);
Tensor Mean(const Tensor& a);
Tensor MeanAbsoluteError(const Tensor& a, const Tensor& b);
Tensor MeanSquaredError(const Tensor& a, const Tensor& b);
// Mean of (a - c)^2 for a constant c.
Tensor MeanSquaredToConstant(const Tensor& a, double c);
// Mean binary cross entropy between sigmoid(logits) and soft targets.
Tensor BinaryCrossEntropyWithLogits(const Tensor& logits,
                                    const Tensor& targets);

}  // namespace ag
}  // namespace unitvc

#endif  // AUTOGRAD_OPS_H_
