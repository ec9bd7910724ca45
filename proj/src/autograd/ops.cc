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

#include "autograd/ops.h"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>

namespace unitvc {
namespace ag {

namespace {

bool Needs(const Node& self, size_t i) {
  return self.inputs[i]->requires_grad;
}

std::vector<double>& GradOf(Node& self, size_t i) {
  return self.inputs[i]->MutableGrad();
}

ConstMatrixMap MatrixOf(const std::vector<double>& v, int64_t rows,
                        int64_t cols) {
  return ConstMatrixMap(v.data(), rows, cols);
}

MatrixMap MutableMatrixOf(std::vector<double>& v, int64_t rows,
                          int64_t cols) {
  return MatrixMap(v.data(), rows, cols);
}

void RequireRank2(const Tensor& t, const char* op) {
  if (t.shape().size() != 2) {
    throw std::invalid_argument(std::string(op) + " expects a matrix, got " +
                                ShapeToString(t.shape()));
  }
}

void RequireSameShape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() != b.shape()) {
    throw std::invalid_argument(std::string(op) + " shape mismatch: " +
                                ShapeToString(a.shape()) + " vs " +
                                ShapeToString(b.shape()));
  }
}

// Length of a vector-like tensor ([m] or [1, m]).
int64_t VectorLength(const Tensor& v, const char* op) {
  const Shape& s = v.shape();
  if (s.size() == 1) return s[0];
  if (s.size() == 2 && s[0] == 1) return s[1];
  throw std::invalid_argument(std::string(op) + " expects a vector, got " +
                              ShapeToString(s));
}

template <typename F, typename G>
Tensor Unary(const Tensor& a, F forward, G derivative) {
  std::vector<double> out(a.numel());
  const double* x = a.data();
  for (size_t i = 0; i < out.size(); ++i) out[i] = forward(x[i]);
  return MakeResult(a.shape(), std::move(out), {a},
                    [derivative](Node& self) {
                      if (!Needs(self, 0)) return;
                      auto& gx = GradOf(self, 0);
                      const auto& x = self.inputs[0]->value;
                      for (size_t i = 0; i < gx.size(); ++i) {
                        gx[i] += self.grad[i] * derivative(x[i], self.value[i]);
                      }
                    });
}

}  // namespace

Tensor MatMul(const Tensor& a, const Tensor& b) {
  RequireRank2(a, "MatMul");
  RequireRank2(b, "MatMul");
  const int64_t n = a.rows(), k = a.cols(), m = b.cols();
  if (b.rows() != k) {
    throw std::invalid_argument("MatMul inner dimension mismatch: " +
                                ShapeToString(a.shape()) + " x " +
                                ShapeToString(b.shape()));
  }
  std::vector<double> out(n * m);
  MutableMatrixOf(out, n, m).noalias() = a.matrix() * b.matrix();
  return MakeResult({n, m}, std::move(out), {a, b},
                    [n, k, m](Node& self) {
                      auto dy = MatrixOf(self.grad, n, m);
                      if (Needs(self, 0)) {
                        auto b = MatrixOf(self.inputs[1]->value, k, m);
                        MutableMatrixOf(GradOf(self, 0), n, k).noalias() +=
                            dy * b.transpose();
                      }
                      if (Needs(self, 1)) {
                        auto a = MatrixOf(self.inputs[0]->value, n, k);
                        MutableMatrixOf(GradOf(self, 1), k, m).noalias() +=
                            a.transpose() * dy;
                      }
                    });
}

Tensor Add(const Tensor& a, const Tensor& b) {
  RequireSameShape(a, b, "Add");
  std::vector<double> out(a.values());
  const double* y = b.data();
  for (size_t i = 0; i < out.size(); ++i) out[i] += y[i];
  return MakeResult(a.shape(), std::move(out), {a, b}, [](Node& self) {
    for (size_t k = 0; k < 2; ++k) {
      if (!Needs(self, k)) continue;
      auto& g = GradOf(self, k);
      for (size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
    }
  });
}

Tensor Sub(const Tensor& a, const Tensor& b) {
  RequireSameShape(a, b, "Sub");
  std::vector<double> out(a.values());
  const double* y = b.data();
  for (size_t i = 0; i < out.size(); ++i) out[i] -= y[i];
  return MakeResult(a.shape(), std::move(out), {a, b}, [](Node& self) {
    if (Needs(self, 0)) {
      auto& g = GradOf(self, 0);
      for (size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
    }
    if (Needs(self, 1)) {
      auto& g = GradOf(self, 1);
      for (size_t i = 0; i < g.size(); ++i) g[i] -= self.grad[i];
    }
  });
}

Tensor Mul(const Tensor& a, const Tensor& b) {
  RequireSameShape(a, b, "Mul");
  std::vector<double> out(a.values());
  const double* y = b.data();
  for (size_t i = 0; i < out.size(); ++i) out[i] *= y[i];
  return MakeResult(a.shape(), std::move(out), {a, b}, [](Node& self) {
    const auto& x = self.inputs[0]->value;
    const auto& y = self.inputs[1]->value;
    if (Needs(self, 0)) {
      auto& g = GradOf(self, 0);
      for (size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * y[i];
    }
    if (Needs(self, 1)) {
      auto& g = GradOf(self, 1);
      for (size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * x[i];
    }
  });
}

Tensor Scale(const Tensor& a, double s) {
  return Unary(
      a, [s](double x) { return x * s; },
      [s](double, double) { return s; });
}

Tensor AddScalar(const Tensor& a, double s) {
  return Unary(
      a, [s](double x) { return x + s; }, [](double, double) { return 1.0; });
}

Tensor AddRowVector(const Tensor& a, const Tensor& bias) {
  RequireRank2(a, "AddRowVector");
  const int64_t n = a.rows(), m = a.cols();
  if (VectorLength(bias, "AddRowVector") != m) {
    throw std::invalid_argument("AddRowVector width mismatch: " +
                                ShapeToString(a.shape()) + " + " +
                                ShapeToString(bias.shape()));
  }
  std::vector<double> out(a.values());
  MutableMatrixOf(out, n, m).rowwise() += bias.matrix().row(0);
  return MakeResult({n, m}, std::move(out), {a, bias}, [n, m](Node& self) {
    auto dy = MatrixOf(self.grad, n, m);
    if (Needs(self, 0)) MutableMatrixOf(GradOf(self, 0), n, m) += dy;
    if (Needs(self, 1)) {
      MutableMatrixOf(GradOf(self, 1), 1, m) += dy.colwise().sum();
    }
  });
}

Tensor AddColumnVector(const Tensor& a, const Tensor& column) {
  RequireRank2(a, "AddColumnVector");
  const int64_t n = a.rows(), m = a.cols();
  if (column.numel() != n) {
    throw std::invalid_argument("AddColumnVector length mismatch: " +
                                ShapeToString(a.shape()) + " + " +
                                ShapeToString(column.shape()));
  }
  std::vector<double> out(a.values());
  const double* c = column.data();
  for (int64_t i = 0; i < n; ++i) {
    for (int64_t j = 0; j < m; ++j) out[i * m + j] += c[i];
  }
  return MakeResult({n, m}, std::move(out), {a, column}, [n, m](Node& self) {
    auto dy = MatrixOf(self.grad, n, m);
    if (Needs(self, 0)) MutableMatrixOf(GradOf(self, 0), n, m) += dy;
    if (Needs(self, 1)) {
      auto& g = GradOf(self, 1);
      for (int64_t i = 0; i < n; ++i) g[i] += dy.row(i).sum();
    }
  });
}

Tensor Relu(const Tensor& a) {
  return Unary(
      a, [](double x) { return x > 0.0 ? x : 0.0; },
      [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
}

Tensor LeakyRelu(const Tensor& a, double slope) {
  return Unary(
      a, [slope](double x) { return x > 0.0 ? x : slope * x; },
      [slope](double x, double) { return x > 0.0 ? 1.0 : slope; });
}

Tensor Sigmoid(const Tensor& a) {
  return Unary(
      a,
      [](double x) {
        if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
        const double e = std::exp(x);
        return e / (1.0 + e);
      },
      [](double, double y) { return y * (1.0 - y); });
}

Tensor Transpose(const Tensor& a) {
  RequireRank2(a, "Transpose");
  const int64_t n = a.rows(), m = a.cols();
  std::vector<double> out(n * m);
  MutableMatrixOf(out, m, n) = a.matrix().transpose();
  return MakeResult({m, n}, std::move(out), {a}, [n, m](Node& self) {
    if (!Needs(self, 0)) return;
    MutableMatrixOf(GradOf(self, 0), n, m) +=
        MatrixOf(self.grad, m, n).transpose();
  });
}

Tensor Reshape(const Tensor& a, const Shape& shape) {
  if (NumElements(shape) != a.numel()) {
    throw std::invalid_argument("Reshape " + ShapeToString(a.shape()) +
                                " -> " + ShapeToString(shape));
  }
  return MakeResult(shape, a.values(), {a}, [](Node& self) {
    if (!Needs(self, 0)) return;
    auto& g = GradOf(self, 0);
    for (size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
  });
}

Tensor SoftmaxRows(const Tensor& a) {
  RequireRank2(a, "SoftmaxRows");
  const int64_t n = a.rows(), m = a.cols();
  std::vector<double> out(a.values());
  auto y = MutableMatrixOf(out, n, m);
  for (int64_t i = 0; i < n; ++i) {
    const double mx = y.row(i).maxCoeff();
    y.row(i) = (y.row(i).array() - mx).exp().matrix();
    y.row(i) /= y.row(i).sum();
  }
  return MakeResult({n, m}, std::move(out), {a}, [n, m](Node& self) {
    if (!Needs(self, 0)) return;
    auto y = MatrixOf(self.value, n, m);
    auto dy = MatrixOf(self.grad, n, m);
    auto dx = MutableMatrixOf(GradOf(self, 0), n, m);
    for (int64_t i = 0; i < n; ++i) {
      const double dot = dy.row(i).dot(y.row(i));
      dx.row(i).array() += y.row(i).array() * (dy.row(i).array() - dot);
    }
  });
}

Tensor ConcatColumns(const std::vector<Tensor>& parts) {
  if (parts.empty()) throw std::invalid_argument("ConcatColumns: no inputs");
  const int64_t n = parts[0].rows();
  std::vector<int64_t> widths;
  int64_t total = 0;
  for (const Tensor& p : parts) {
    RequireRank2(p, "ConcatColumns");
    if (p.rows() != n) {
      throw std::invalid_argument("ConcatColumns row mismatch: " +
                                  ShapeToString(parts[0].shape()) + " vs " +
                                  ShapeToString(p.shape()));
    }
    widths.push_back(p.cols());
    total += p.cols();
  }
  std::vector<double> out(n * total);
  auto y = MutableMatrixOf(out, n, total);
  int64_t offset = 0;
  for (size_t k = 0; k < parts.size(); ++k) {
    y.middleCols(offset, widths[k]) = parts[k].matrix();
    offset += widths[k];
  }
  return MakeResult({n, total}, std::move(out), parts,
                    [n, total, widths](Node& self) {
                      auto dy = MatrixOf(self.grad, n, total);
                      int64_t offset = 0;
                      for (size_t k = 0; k < widths.size(); ++k) {
                        if (Needs(self, k)) {
                          MutableMatrixOf(GradOf(self, k), n, widths[k]) +=
                              dy.middleCols(offset, widths[k]);
                        }
                        offset += widths[k];
                      }
                    });
}

Tensor SliceColumns(const Tensor& a, int64_t start, int64_t count) {
  RequireRank2(a, "SliceColumns");
  const int64_t n = a.rows(), m = a.cols();
  if (start < 0 || count < 1 || start + count > m) {
    throw std::out_of_range("SliceColumns out of range");
  }
  std::vector<double> out(n * count);
  MutableMatrixOf(out, n, count) = a.matrix().middleCols(start, count);
  return MakeResult({n, count}, std::move(out), {a},
                    [n, m, start, count](Node& self) {
                      if (!Needs(self, 0)) return;
                      MutableMatrixOf(GradOf(self, 0), n, m)
                          .middleCols(start, count) +=
                          MatrixOf(self.grad, n, count);
                    });
}

Tensor RepeatRows(const Tensor& v, int64_t n) {
  const int64_t m = VectorLength(v, "RepeatRows");
  if (n < 1) throw std::invalid_argument("RepeatRows needs n >= 1");
  std::vector<double> out(n * m);
  MutableMatrixOf(out, n, m).rowwise() = v.matrix().row(0);
  return MakeResult({n, m}, std::move(out), {v}, [n, m](Node& self) {
    if (!Needs(self, 0)) return;
    MutableMatrixOf(GradOf(self, 0), 1, m) +=
        MatrixOf(self.grad, n, m).colwise().sum();
  });
}

Tensor GatherRows(const Tensor& a, const std::vector<int64_t>& indices) {
  RequireRank2(a, "GatherRows");
  const int64_t rows = a.rows(), m = a.cols();
  const int64_t n = static_cast<int64_t>(indices.size());
  if (n < 1) throw std::invalid_argument("GatherRows: empty index list");
  std::vector<double> out(n * m);
  const double* x = a.data();
  for (int64_t i = 0; i < n; ++i) {
    const int64_t r = indices[i];
    if (r < 0 || r >= rows) {
      throw std::out_of_range("GatherRows index " + std::to_string(r) +
                              " outside [0, " + std::to_string(rows) + ")");
    }
    std::copy(x + r * m, x + (r + 1) * m, out.begin() + i * m);
  }
  return MakeResult({n, m}, std::move(out), {a},
                    [indices, m](Node& self) {
                      if (!Needs(self, 0)) return;
                      auto& g = GradOf(self, 0);
                      for (size_t i = 0; i < indices.size(); ++i) {
                        double* dst = g.data() + indices[i] * m;
                        const double* src = self.grad.data() + i * m;
                        for (int64_t j = 0; j < m; ++j) dst[j] += src[j];
                      }
                    });
}

Tensor SelectRows(const std::vector<uint8_t>& keep, const Tensor& a,
                  const Tensor& fill) {
  RequireRank2(a, "SelectRows");
  const int64_t n = a.rows(), m = a.cols();
  if (static_cast<int64_t>(keep.size()) != n) {
    throw std::invalid_argument("SelectRows: mask length " +
                                std::to_string(keep.size()) +
                                " does not match " + std::to_string(n) +
                                " rows");
  }
  if (VectorLength(fill, "SelectRows") != m) {
    throw std::invalid_argument("SelectRows: fill width mismatch");
  }
  std::vector<double> out(a.values());
  const double* f = fill.data();
  for (int64_t i = 0; i < n; ++i) {
    if (!keep[i]) std::copy(f, f + m, out.begin() + i * m);
  }
  return MakeResult({n, m}, std::move(out), {a, fill},
                    [keep, n, m](Node& self) {
                      const double* dy = self.grad.data();
                      if (Needs(self, 0)) {
                        auto& g = GradOf(self, 0);
                        for (int64_t i = 0; i < n; ++i) {
                          if (!keep[i]) continue;
                          for (int64_t j = 0; j < m; ++j) {
                            g[i * m + j] += dy[i * m + j];
                          }
                        }
                      }
                      if (Needs(self, 1)) {
                        auto& g = GradOf(self, 1);
                        for (int64_t i = 0; i < n; ++i) {
                          if (keep[i]) continue;
                          for (int64_t j = 0; j < m; ++j) {
                            g[j] += dy[i * m + j];
                          }
                        }
                      }
                    });
}

Tensor MeanRows(const Tensor& a) {
  RequireRank2(a, "MeanRows");
  const int64_t n = a.rows(), m = a.cols();
  std::vector<double> out(m);
  MutableMatrixOf(out, 1, m) = a.matrix().colwise().mean();
  return MakeResult({1, m}, std::move(out), {a}, [n, m](Node& self) {
    if (!Needs(self, 0)) return;
    MutableMatrixOf(GradOf(self, 0), n, m).rowwise() +=
        MatrixOf(self.grad, 1, m).row(0) / static_cast<double>(n);
  });
}

Tensor NormalizeRows(const Tensor& a, double min_total) {
  RequireRank2(a, "NormalizeRows");
  const int64_t n = a.rows(), m = a.cols();
  std::vector<double> out(a.values());
  std::vector<double> totals(n);
  auto y = MutableMatrixOf(out, n, m);
  for (int64_t i = 0; i < n; ++i) {
    totals[i] = y.row(i).sum();
    if (!(totals[i] >= min_total)) {
      throw std::domain_error("degenerate bin row " + std::to_string(i) +
                              " (total weight " +
                              std::to_string(totals[i]) + ")");
    }
    y.row(i) /= totals[i];
  }
  return MakeResult({n, m}, std::move(out), {a},
                    [totals, n, m](Node& self) {
                      if (!Needs(self, 0)) return;
                      auto y = MatrixOf(self.value, n, m);
                      auto dy = MatrixOf(self.grad, n, m);
                      auto dx = MutableMatrixOf(GradOf(self, 0), n, m);
                      for (int64_t i = 0; i < n; ++i) {
                        const double dot = dy.row(i).dot(y.row(i));
                        dx.row(i).array() +=
                            (dy.row(i).array() - dot) / totals[i];
                      }
                    });
}

Tensor LayerNormRows(const Tensor& a, const Tensor& gain, const Tensor& bias,
                     double eps) {
  RequireRank2(a, "LayerNormRows");
  const int64_t n = a.rows(), m = a.cols();
  if (VectorLength(gain, "LayerNormRows") != m ||
      VectorLength(bias, "LayerNormRows") != m) {
    throw std::invalid_argument("LayerNormRows parameter width mismatch");
  }
  auto normalized = std::make_shared<RowMatrix>(n, m);
  auto inv_std = std::make_shared<std::vector<double>>(n);
  auto x = a.matrix();
  for (int64_t i = 0; i < n; ++i) {
    const double mu = x.row(i).mean();
    const double var = (x.row(i).array() - mu).square().mean();
    (*inv_std)[i] = 1.0 / std::sqrt(var + eps);
    normalized->row(i) = (x.row(i).array() - mu) * (*inv_std)[i];
  }
  std::vector<double> out(n * m);
  auto y = MutableMatrixOf(out, n, m);
  auto g = gain.matrix().row(0);
  auto b = bias.matrix().row(0);
  for (int64_t i = 0; i < n; ++i) {
    y.row(i) = normalized->row(i).cwiseProduct(g) + b;
  }
  return MakeResult(
      {n, m}, std::move(out), {a, gain, bias},
      [normalized, inv_std, n, m](Node& self) {
        auto dy = MatrixOf(self.grad, n, m);
        auto g = MatrixOf(self.inputs[1]->value, 1, m).row(0);
        if (Needs(self, 0)) {
          auto dx = MutableMatrixOf(GradOf(self, 0), n, m);
          for (int64_t i = 0; i < n; ++i) {
            Eigen::RowVectorXd dxhat = dy.row(i).cwiseProduct(g);
            const double sum = dxhat.sum();
            const double dot = dxhat.dot(normalized->row(i));
            dx.row(i).array() +=
                (*inv_std)[i] / static_cast<double>(m) *
                (static_cast<double>(m) * dxhat.array() - sum -
                 normalized->row(i).array() * dot);
          }
        }
        if (Needs(self, 1)) {
          MutableMatrixOf(GradOf(self, 1), 1, m) +=
              dy.cwiseProduct(*normalized).colwise().sum();
        }
        if (Needs(self, 2)) {
          MutableMatrixOf(GradOf(self, 2), 1, m) += dy.colwise().sum();
        }
      });
}

Tensor Conv1d(const Tensor& x, const Tensor& weight, const Tensor& bias,
              int64_t kernel, int64_t stride, int64_t pad_left,
              int64_t pad_right) {
  RequireRank2(x, "Conv1d");
  const int64_t t = x.rows(), cin = x.cols();
  const int64_t cout = weight.cols();
  if (weight.rows() != kernel * cin) {
    throw std::invalid_argument("Conv1d weight " +
                                ShapeToString(weight.shape()) +
                                " does not match kernel " +
                                std::to_string(kernel) + " x " +
                                std::to_string(cin) + " channels");
  }
  const int64_t padded = t + pad_left + pad_right;
  if (padded < kernel) {
    throw std::invalid_argument("Conv1d input of length " +
                                std::to_string(t) + " shorter than kernel " +
                                std::to_string(kernel));
  }
  const int64_t tout = (padded - kernel) / stride + 1;
  auto cols = std::make_shared<RowMatrix>(RowMatrix::Zero(tout, kernel * cin));
  const double* xv = x.data();
  for (int64_t o = 0; o < tout; ++o) {
    for (int64_t tap = 0; tap < kernel; ++tap) {
      const int64_t src = o * stride + tap - pad_left;
      if (src < 0 || src >= t) continue;
      std::copy(xv + src * cin, xv + (src + 1) * cin,
                cols->data() + o * kernel * cin + tap * cin);
    }
  }
  std::vector<double> out(tout * cout);
  auto y = MutableMatrixOf(out, tout, cout);
  y.noalias() = (*cols) * weight.matrix();
  y.rowwise() += bias.matrix().row(0);
  return MakeResult(
      {tout, cout}, std::move(out), {x, weight, bias},
      [cols, t, cin, cout, tout, kernel, stride, pad_left](Node& self) {
        auto dy = MatrixOf(self.grad, tout, cout);
        if (Needs(self, 1)) {
          MutableMatrixOf(GradOf(self, 1), kernel * cin, cout).noalias() +=
              cols->transpose() * dy;
        }
        if (Needs(self, 2)) {
          MutableMatrixOf(GradOf(self, 2), 1, cout) += dy.colwise().sum();
        }
        if (Needs(self, 0)) {
          auto w = MatrixOf(self.inputs[1]->value, kernel * cin, cout);
          RowMatrix dcols = dy * w.transpose();
          auto& gx = GradOf(self, 0);
          for (int64_t o = 0; o < tout; ++o) {
            for (int64_t tap = 0; tap < kernel; ++tap) {
              const int64_t src = o * stride + tap - pad_left;
              if (src < 0 || src >= t) continue;
              const double* d = dcols.data() + o * kernel * cin + tap * cin;
              double* dst = gx.data() + src * cin;
              for (int64_t c = 0; c < cin; ++c) dst[c] += d[c];
            }
          }
        }
      });
}

Tensor Conv2d(const Tensor& x, const Tensor& weight, const Tensor& bias,
              int64_t kernel_h, int64_t kernel_w, int64_t stride_h,
              int64_t stride_w, int64_t pad_h, int64_t pad_w) {
  if (x.shape().size() != 3) {
    throw std::invalid_argument("Conv2d expects [h, w, c], got " +
                                ShapeToString(x.shape()));
  }
  const int64_t h = x.dim(0), w = x.dim(1), cin = x.dim(2);
  const int64_t cout = weight.cols();
  const int64_t patch = kernel_h * kernel_w * cin;
  if (weight.rows() != patch) {
    throw std::invalid_argument("Conv2d weight " +
                                ShapeToString(weight.shape()) +
                                " does not match patch size " +
                                std::to_string(patch));
  }
  if (h + 2 * pad_h < kernel_h || w + 2 * pad_w < kernel_w) {
    throw std::invalid_argument("Conv2d input " + ShapeToString(x.shape()) +
                                " smaller than kernel");
  }
  const int64_t ho = (h + 2 * pad_h - kernel_h) / stride_h + 1;
  const int64_t wo = (w + 2 * pad_w - kernel_w) / stride_w + 1;
  auto cols = std::make_shared<RowMatrix>(RowMatrix::Zero(ho * wo, patch));
  const double* xv = x.data();
  for (int64_t oi = 0; oi < ho; ++oi) {
    for (int64_t oj = 0; oj < wo; ++oj) {
      double* row = cols->data() + (oi * wo + oj) * patch;
      for (int64_t a = 0; a < kernel_h; ++a) {
        const int64_t si = oi * stride_h + a - pad_h;
        if (si < 0 || si >= h) continue;
        for (int64_t b = 0; b < kernel_w; ++b) {
          const int64_t sj = oj * stride_w + b - pad_w;
          if (sj < 0 || sj >= w) continue;
          std::copy(xv + (si * w + sj) * cin, xv + (si * w + sj + 1) * cin,
                    row + (a * kernel_w + b) * cin);
        }
      }
    }
  }
  std::vector<double> out(ho * wo * cout);
  auto y = MutableMatrixOf(out, ho * wo, cout);
  y.noalias() = (*cols) * weight.matrix();
  y.rowwise() += bias.matrix().row(0);
  return MakeResult(
      {ho, wo, cout}, std::move(out), {x, weight, bias},
      [cols, h, w, cin, cout, ho, wo, patch, kernel_h, kernel_w, stride_h,
       stride_w, pad_h, pad_w](Node& self) {
        auto dy = MatrixOf(self.grad, ho * wo, cout);
        if (Needs(self, 1)) {
          MutableMatrixOf(GradOf(self, 1), patch, cout).noalias() +=
              cols->transpose() * dy;
        }
        if (Needs(self, 2)) {
          MutableMatrixOf(GradOf(self, 2), 1, cout) += dy.colwise().sum();
        }
        if (Needs(self, 0)) {
          auto wm = MatrixOf(self.inputs[1]->value, patch, cout);
          RowMatrix dcols = dy * wm.transpose();
          auto& gx = GradOf(self, 0);
          for (int64_t oi = 0; oi < ho; ++oi) {
            for (int64_t oj = 0; oj < wo; ++oj) {
              const double* row = dcols.data() + (oi * wo + oj) * patch;
              for (int64_t a = 0; a < kernel_h; ++a) {
                const int64_t si = oi * stride_h + a - pad_h;
                if (si < 0 || si >= h) continue;
                for (int64_t b = 0; b < kernel_w; ++b) {
                  const int64_t sj = oj * stride_w + b - pad_w;
                  if (sj < 0 || sj >= w) continue;
                  const double* d = row + (a * kernel_w + b) * cin;
                  double* dst = gx.data() + (si * w + sj) * cin;
                  for (int64_t c = 0; c < cin; ++c) dst[c] += d[c];
                }
              }
            }
          }
        }
      });
}

Tensor Sum(const Tensor& a) {
  double total = 0.0;
  for (double v : a.values()) total += v;
  return MakeResult({1}, {total}, {a}, [](Node& self) {
    if (!Needs(self, 0)) return;
    auto& g = GradOf(self, 0);
    for (double& v : g) v += self.grad[0];
  });
}

Tensor Mean(const Tensor& a) {
  return Scale(Sum(a), 1.0 / static_cast<double>(a.numel()));
}

Tensor MeanAbsoluteError(const Tensor& a, const Tensor& b) {
  RequireSameShape(a, b, "MeanAbsoluteError");
  const double n = static_cast<double>(a.numel());
  double total = 0.0;
  for (int64_t i = 0; i < a.numel(); ++i) {
    total += std::abs(a.data()[i] - b.data()[i]);
  }
  return MakeResult({1}, {total / n}, {a, b}, [n](Node& self) {
    const auto& x = self.inputs[0]->value;
    const auto& y = self.inputs[1]->value;
    const double scale = self.grad[0] / n;
    for (size_t k = 0; k < 2; ++k) {
      if (!Needs(self, k)) continue;
      auto& g = GradOf(self, k);
      const double sign = k == 0 ? 1.0 : -1.0;
      for (size_t i = 0; i < g.size(); ++i) {
        const double d = x[i] - y[i];
        const double s = d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0);
        g[i] += sign * s * scale;
      }
    }
  });
}

Tensor MeanSquaredError(const Tensor& a, const Tensor& b) {
  RequireSameShape(a, b, "MeanSquaredError");
  const double n = static_cast<double>(a.numel());
  double total = 0.0;
  for (int64_t i = 0; i < a.numel(); ++i) {
    const double d = a.data()[i] - b.data()[i];
    total += d * d;
  }
  return MakeResult({1}, {total / n}, {a, b}, [n](Node& self) {
    const auto& x = self.inputs[0]->value;
    const auto& y = self.inputs[1]->value;
    const double scale = 2.0 * self.grad[0] / n;
    if (Needs(self, 0)) {
      auto& g = GradOf(self, 0);
      for (size_t i = 0; i < g.size(); ++i) g[i] += scale * (x[i] - y[i]);
    }
    if (Needs(self, 1)) {
      auto& g = GradOf(self, 1);
      for (size_t i = 0; i < g.size(); ++i) g[i] -= scale * (x[i] - y[i]);
    }
  });
}

Tensor MeanSquaredToConstant(const Tensor& a, double c) {
  const double n = static_cast<double>(a.numel());
  double total = 0.0;
  for (double v : a.values()) total += (v - c) * (v - c);
  return MakeResult({1}, {total / n}, {a}, [n, c](Node& self) {
    if (!Needs(self, 0)) return;
    const auto& x = self.inputs[0]->value;
    auto& g = GradOf(self, 0);
    const double scale = 2.0 * self.grad[0] / n;
    for (size_t i = 0; i < g.size(); ++i) g[i] += scale * (x[i] - c);
  });
}

Tensor BinaryCrossEntropyWithLogits(const Tensor& logits,
                                    const Tensor& targets) {
  RequireSameShape(logits, targets, "BinaryCrossEntropyWithLogits");
  const double n = static_cast<double>(logits.numel());
  double total = 0.0;
  for (int64_t i = 0; i < logits.numel(); ++i) {
    const double z = logits.data()[i];
    const double y = targets.data()[i];
    total += std::max(z, 0.0) - z * y + std::log1p(std::exp(-std::abs(z)));
  }
  return MakeResult({1}, {total / n}, {logits, targets}, [n](Node& self) {
    const auto& z = self.inputs[0]->value;
    const auto& y = self.inputs[1]->value;
    const double scale = self.grad[0] / n;
    if (Needs(self, 0)) {
      auto& g = GradOf(self, 0);
      for (size_t i = 0; i < g.size(); ++i) {
        const double s = z[i] >= 0.0 ? 1.0 / (1.0 + std::exp(-z[i]))
                                     : std::exp(z[i]) / (1.0 + std::exp(z[i]));
        g[i] += scale * (s - y[i]);
      }
    }
    if (Needs(self, 1)) {
      auto& g = GradOf(self, 1);
      for (size_t i = 0; i < g.size(); ++i) g[i] -= scale * z[i];
    }
  });
}

}  // namespace ag
}  // namespace unitvc
