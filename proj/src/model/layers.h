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

#ifndef MODEL_LAYERS_H_
#define MODEL_LAYERS_H_

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "autograd/tensor.h"

namespace unitvc {

enum class ParamInit { kZeros, kOnes, kFanIn, kNormal };

struct NamedParameter {
  std::string name;
  ag::Tensor tensor;
  ParamInit init = ParamInit::kZeros;
  double scale = 0.0;  // fan-in for kFanIn, std for kNormal
};

// Owns named parameters and borrows child modules; names compose with '.'.
class Module {
 public:
  Module() = default;
  virtual ~Module() = default;
  Module(const Module&) = delete;
  Module& operator=(const Module&) = delete;

  std::vector<NamedParameter> NamedParameters(
      const std::string& prefix = "") const;
  std::vector<ag::Tensor> Parameters() const;

 protected:
  ag::Tensor Register(const std::string& name, const ag::Shape& shape,
                      ParamInit init, double scale = 0.0);
  void RegisterChild(const std::string& name, Module* child);

 private:
  void Collect(const std::string& prefix,
               std::vector<NamedParameter>* out) const;

  std::vector<NamedParameter> params_;
  std::vector<std::pair<std::string, Module*>> children_;
};

// Fills every parameter from a generator seeded by (seed, name), so adding a
// module never changes the initial values of the others.
void InitializeParameters(const std::vector<NamedParameter>& params,
                          uint64_t seed);

class Linear : public Module {
 public:
  Linear(int in_dim, int out_dim);
  ag::Tensor Forward(const ag::Tensor& x) const;  // [n, in] -> [n, out]
  int in_dim() const { return in_dim_; }
  int out_dim() const { return out_dim_; }

 private:
  int in_dim_, out_dim_;
  ag::Tensor weight_, bias_;
};

class Conv1dLayer : public Module {
 public:
  // pad < 0 selects "same" padding for stride 1.
  Conv1dLayer(int in_channels, int out_channels, int kernel, int stride = 1,
              int pad = -1);
  ag::Tensor Forward(const ag::Tensor& x) const;  // [t, cin] -> [t', cout]
  int kernel() const { return kernel_; }
  int stride() const { return stride_; }

 private:
  int kernel_, stride_, pad_left_, pad_right_;
  ag::Tensor weight_, bias_;
};

class Conv2dLayer : public Module {
 public:
  Conv2dLayer(int in_channels, int out_channels, int kernel_h, int kernel_w,
              int stride_h, int stride_w, int pad_h, int pad_w);
  ag::Tensor Forward(const ag::Tensor& x) const;  // [h, w, cin]

 private:
  int kh_, kw_, sh_, sw_, ph_, pw_;
  ag::Tensor weight_, bias_;
};

class LayerNorm : public Module {
 public:
  explicit LayerNorm(int dim);
  ag::Tensor Forward(const ag::Tensor& x) const;

 private:
  ag::Tensor gain_, bias_;
};

class Embedding : public Module {
 public:
  Embedding(int count, int dim, double init_std);
  ag::Tensor Lookup(const std::vector<int>& ids) const;
  const ag::Tensor& table() const { return table_; }
  int count() const { return static_cast<int>(table_.dim(0)); }

 private:
  ag::Tensor table_;
};

// conv -> ReLU -> linear -> residual -> layer norm, all at one width.
class ResidualBlock : public Module {
 public:
  ResidualBlock(int width, int kernel);
  ag::Tensor Forward(const ag::Tensor& x) const;

 private:
  Conv1dLayer conv_;
  Linear proj_;
  LayerNorm norm_;
};

// Row i of the result is row floor(i * rows / length) of x.
ag::Tensor NearestInterpolate(const ag::Tensor& x, int64_t length);

class ResidualStack : public Module {
 public:
  // When interpolate_after > 0, the sequence is resized to the requested
  // length after that many blocks.
  ResidualStack(int width, int kernel, int num_blocks,
                int interpolate_after = 0);
  ag::Tensor Forward(const ag::Tensor& x, int64_t target_length = -1) const;
  int num_blocks() const { return static_cast<int>(blocks_.size()); }
  int interpolate_after() const { return interpolate_after_; }

 private:
  std::vector<std::unique_ptr<ResidualBlock>> blocks_;
  int interpolate_after_;
};

// Post-norm transformer encoder layer (multi-head self-attention + FFN).
class TransformerLayer : public Module {
 public:
  TransformerLayer(int dim, int heads, int ffn_dim);
  ag::Tensor Forward(const ag::Tensor& x) const;

 private:
  int heads_;
  Linear query_, key_, value_, out_;
  LayerNorm attn_norm_;
  Linear ffn_in_, ffn_out_;
  LayerNorm ffn_norm_;
};

}  // namespace unitvc

#endif  // MODEL_LAYERS_H_
