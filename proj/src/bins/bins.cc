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

#include "bins/bins.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "autograd/ops.h"

namespace unitvc {

BinGrid::BinGrid(const GridConfig& cfg)
    : BinGrid(cfg.minimum, cfg.width, cfg.count, cfg.sigma) {}

BinGrid::BinGrid(double minimum, double width, int count, double sigma)
    : minimum_(minimum), width_(width), count_(count), sigma_(sigma) {
  if (!(width > 0.0)) throw std::invalid_argument("bin width must be > 0");
  if (count < 2) throw std::invalid_argument("bin count must be >= 2");
  if (!(sigma > 0.0)) throw std::invalid_argument("bin sigma must be > 0");
}

double BinGrid::Clamp(double value) const {
  return std::clamp(value, FirstCenter(), LastCenter());
}

RealMatrix GaussianBinWeights(const std::vector<double>& values,
                              const BinGrid& grid) {
  const int n = static_cast<int>(values.size());
  const int b = grid.count();
  const double inv = 1.0 / (2.0 * grid.sigma() * grid.sigma());
  RealMatrix w(n, b);
  for (int j = 0; j < n; ++j) {
    const double v = values[j];
    if (!std::isfinite(v)) {
      throw std::invalid_argument("non-finite value at frame " +
                                  std::to_string(j));
    }
    for (int i = 0; i < b; ++i) {
      // Distance measured in grid units so that shifting the value and the
      // grid minimum together gives the same weights.
      const double d = (v - grid.minimum()) - (i + 1) * grid.width();
      w(j, i) = std::exp(-d * d * inv);
    }
  }
  return w;
}

RealMatrix ClampedBinWeights(const std::vector<double>& values,
                             const BinGrid& grid) {
  std::vector<double> clamped(values.size());
  for (size_t j = 0; j < values.size(); ++j) {
    if (!std::isfinite(values[j])) {
      throw std::invalid_argument("non-finite value at frame " +
                                  std::to_string(j));
    }
    clamped[j] = grid.Clamp(values[j]);
  }
  return GaussianBinWeights(clamped, grid);
}

std::vector<double> DecodeScalar(const RealMatrix& weights,
                                 const BinGrid& grid) {
  if (weights.cols() != grid.count()) {
    throw std::invalid_argument("bin weights have " +
                                std::to_string(weights.cols()) +
                                " columns, grid has " +
                                std::to_string(grid.count()));
  }
  Eigen::VectorXd centers(grid.count());
  for (int i = 0; i < grid.count(); ++i) centers[i] = grid.Center(i);
  std::vector<double> out(weights.rows());
  for (int j = 0; j < weights.rows(); ++j) {
    const double total = weights.row(j).sum();
    if (!(total >= kMinBinRowTotal)) {
      throw std::domain_error("degenerate bin row " + std::to_string(j));
    }
    out[j] = weights.row(j).dot(centers.transpose()) / total;
  }
  return out;
}

BinEmbeddingTable::BinEmbeddingTable(int count, int dim, bool with_unvoiced) {
  table_ = ag::Tensor::Zeros({count, dim}, true);
  if (with_unvoiced) unvoiced_ = ag::Tensor::Zeros({dim}, true);
}

ag::Tensor EncodeWithEmbeddings(const ag::Tensor& weights,
                                const ag::Tensor& table) {
  if (weights.dim(1) != table.dim(0)) {
    throw std::invalid_argument("bin weights have " +
                                std::to_string(weights.dim(1)) +
                                " columns, table has " +
                                std::to_string(table.dim(0)) + " rows");
  }
  return ag::MatMul(ag::NormalizeRows(weights, kMinBinRowTotal), table);
}

ag::Tensor BinEmbeddingTable::Encode(const ag::Tensor& weights) const {
  return EncodeWithEmbeddings(weights, table_);
}

ag::Tensor BinEmbeddingTable::ApplyVoicing(
    const ag::Tensor& encoded, const std::vector<uint8_t>& voicing) const {
  if (!has_unvoiced()) {
    throw std::logic_error("table has no unvoiced embedding");
  }
  if (static_cast<int64_t>(voicing.size()) != encoded.dim(0)) {
    throw std::invalid_argument("voicing length " +
                                std::to_string(voicing.size()) +
                                " does not match " +
                                std::to_string(encoded.dim(0)) + " frames");
  }
  return ag::SelectRows(voicing, encoded, unvoiced_);
}

}  // namespace unitvc
