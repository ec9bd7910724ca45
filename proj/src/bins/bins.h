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

#ifndef BINS_BINS_H_
#define BINS_BINS_H_

#include <cstdint>
#include <utility>
#include <vector>

#include "autograd/tensor.h"
#include "config/system_config.h"
#include "frontend/stft.h"

namespace unitvc {

// Uniform grid of bin centers c_i = minimum + i * width, i = 1..count.
class BinGrid {
 public:
  explicit BinGrid(const GridConfig& cfg);
  BinGrid(double minimum, double width, int count, double sigma);

  int count() const { return count_; }
  double sigma() const { return sigma_; }
  double width() const { return width_; }
  double minimum() const { return minimum_; }
  // Zero-based: Center(0) is c_1.
  double Center(int index) const { return minimum_ + (index + 1) * width_; }
  double FirstCenter() const { return Center(0); }
  double LastCenter() const { return Center(count_ - 1); }
  // Clamps into [FirstCenter(), LastCenter()].
  double Clamp(double value) const;

 private:
  double minimum_;
  double width_;
  int count_;
  double sigma_;
};

// [values, count] matrix of exp(-(v - c_i)^2 / (2 sigma^2)), unnormalized.
// Throws on non-finite values.
RealMatrix GaussianBinWeights(const std::vector<double>& values,
                              const BinGrid& grid);
// Same, after clamping every value into the grid range.
RealMatrix ClampedBinWeights(const std::vector<double>& values,
                             const BinGrid& grid);

// Weighted mean of centers per row. Throws "degenerate bin row" when a row
// sums below kMinBinRowTotal.
std::vector<double> DecodeScalar(const RealMatrix& weights,
                                 const BinGrid& grid);

constexpr double kMinBinRowTotal = 1e-12;

// Learnable bin embeddings, optionally with an extra vector for unvoiced
// frames.
class BinEmbeddingTable {
 public:
  BinEmbeddingTable() = default;
  BinEmbeddingTable(int count, int dim, bool with_unvoiced);
  // Adopts existing parameter tensors; `unvoiced` may be undefined.
  BinEmbeddingTable(ag::Tensor table, ag::Tensor unvoiced)
      : table_(std::move(table)), unvoiced_(std::move(unvoiced)) {}

  int count() const { return static_cast<int>(table_.dim(0)); }
  int dim() const { return static_cast<int>(table_.dim(1)); }
  bool has_unvoiced() const { return unvoiced_.defined(); }
  ag::Tensor& table() { return table_; }
  const ag::Tensor& table() const { return table_; }
  ag::Tensor& unvoiced() { return unvoiced_; }
  const ag::Tensor& unvoiced() const { return unvoiced_; }

  // Row-normalized weights times the table: [frames, dim].
  ag::Tensor Encode(const ag::Tensor& weights) const;
  // Frames with voicing 0 are replaced by the unvoiced vector.
  ag::Tensor ApplyVoicing(const ag::Tensor& encoded,
                          const std::vector<uint8_t>& voicing) const;

 private:
  ag::Tensor table_;     // [count, dim]
  ag::Tensor unvoiced_;  // [dim]
};

ag::Tensor EncodeWithEmbeddings(const ag::Tensor& weights,
                                const ag::Tensor& table);

}  // namespace unitvc

#endif  // BINS_BINS_H_
