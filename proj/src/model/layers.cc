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

#include "model/layers.h"

#include <cmath>
#include <random>
#include <stdexcept>

#include "autograd/ops.h"
#include "utils/string_util.h"

namespace unitvc {

std::vector<NamedParameter> Module::NamedParameters(
    const std::string& prefix) const {
  std::vector<NamedParameter> out;
  Collect(prefix, &out);
  return out;
}

std::vector<ag::Tensor> Module::Parameters() const {
  std::vector<ag::Tensor> out;
  for (auto& p : NamedParameters()) out.push_back(p.tensor);
  return out;
}

ag::Tensor Module::Register(const std::string& name, const ag::Shape& shape,
                            ParamInit init, double scale) {
  ag::Tensor t = ag::Tensor::Zeros(shape, true);
  params_.push_back({name, t, init, scale});
  return t;
}

void Module::RegisterChild(const std::string& name, Module* child) {
  children_.emplace_back(name, child);
}

void Module::Collect(const std::string& prefix,
                     std::vector<NamedParameter>* out) const {
  for (const auto& p : params_) {
    NamedParameter q = p;
    q.name = prefix + p.name;
    out->push_back(std::move(q));
  }
  for (const auto& [name, child] : children_) {
    child->Collect(prefix + name + ".", out);
  }
}

void InitializeParameters(const std::vector<NamedParameter>& params,
                          uint64_t seed) {
  for (const auto& p : params) {
    std::mt19937_64 rng(Fnv1a64(p.name, seed ^ 0x9e3779b97f4a7c15ULL));
    ag::Tensor t = p.tensor;
    std::vector<double>& v = t.values();
    switch (p.init) {
      case ParamInit::kZeros:
        std::fill(v.begin(), v.end(), 0.0);
        break;
      case ParamInit::kOnes:
        std::fill(v.begin(), v.end(), 1.0);
        break;
      case ParamInit::kFanIn: {
        const double bound = 1.0 / std::sqrt(p.scale);
        std::uniform_real_distribution<double> dist(-bound, bound);
        for (double& x : v) x = dist(rng);
        break;
      }
      case ParamInit::kNormal: {
        std::normal_distribution<double> dist(0.0, p.scale);
        for (double& x : v) x = dist(rng);
        break;
      }
    }
  }
}

Linear::Linear(int in_dim, int out_dim) : in_dim_(in_dim), out_dim_(out_dim) {
  weight_ = Register("weight", {in_dim, out_dim}, ParamInit::kFanIn, in_dim);
  bias_ = Register("bias", {out_dim}, ParamInit::kZeros);
}

ag::Tensor Linear::Forward(const ag::Tensor& x) const {
  return ag::AddRowVector(ag::MatMul(x, weight_), bias_);
}

Conv1dLayer::Conv1dLayer(int in_channels, int out_channels, int kernel,
                         int stride, int pad)
    : kernel_(kernel), stride_(stride) {
  if (pad < 0) {
    pad_left_ = (kernel - 1) / 2;
    pad_right_ = kernel - 1 - pad_left_;
  } else {
    pad_left_ = pad_right_ = pad;
  }
  weight_ = Register("weight", {kernel * in_channels, out_channels},
                     ParamInit::kFanIn, kernel * in_channels);
  bias_ = Register("bias", {out_channels}, ParamInit::kZeros);
}

ag::Tensor Conv1dLayer::Forward(const ag::Tensor& x) const {
  return ag::Conv1d(x, weight_, bias_, kernel_, stride_, pad_left_,
                    pad_right_);
}

Conv2dLayer::Conv2dLayer(int in_channels, int out_channels, int kernel_h,
                         int kernel_w, int stride_h, int stride_w, int pad_h,
                         int pad_w)
    : kh_(kernel_h), kw_(kernel_w), sh_(stride_h), sw_(stride_w), ph_(pad_h),
      pw_(pad_w) {
  const int fan_in = kernel_h * kernel_w * in_channels;
  weight_ = Register("weight", {fan_in, out_channels}, ParamInit::kFanIn,
                     fan_in);
  bias_ = Register("bias", {out_channels}, ParamInit::kZeros);
}

ag::Tensor Conv2dLayer::Forward(const ag::Tensor& x) const {
  return ag::Conv2d(x, weight_, bias_, kh_, kw_, sh_, sw_, ph_, pw_);
}

LayerNorm::LayerNorm(int dim) {
  gain_ = Register("gain", {dim}, ParamInit::kOnes);
  bias_ = Register("bias", {dim}, ParamInit::kZeros);
}

ag::Tensor LayerNorm::Forward(const ag::Tensor& x) const {
  return ag::LayerNormRows(x, gain_, bias_);
}

Embedding::Embedding(int count, int dim, double init_std) {
  table_ = Register("table", {count, dim}, ParamInit::kNormal, init_std);
}

ag::Tensor Embedding::Lookup(const std::vector<int>& ids) const {
  std::vector<int64_t> idx(ids.size());
  for (size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] < 0 || ids[i] >= count()) {
      throw std::out_of_range("unit id " + std::to_string(ids[i]) +
                              " outside vocabulary of " +
                              std::to_string(count()));
    }
    idx[i] = ids[i];
  }
  return ag::GatherRows(table_, idx);
}

ResidualBlock::ResidualBlock(int width, int kernel)
    : conv_(width, width, kernel), proj_(width, width), norm_(width) {
  RegisterChild("conv", &conv_);
  RegisterChild("proj", &proj_);
  RegisterChild("norm", &norm_);
}

ag::Tensor ResidualBlock::Forward(const ag::Tensor& x) const {
  ag::Tensor h = proj_.Forward(ag::Relu(conv_.Forward(x)));
  return norm_.Forward(ag::Add(x, h));
}

ag::Tensor NearestInterpolate(const ag::Tensor& x, int64_t length) {
  if (length < 1) throw std::invalid_argument("target length must be >= 1");
  const int64_t n = x.dim(0);
  if (n == length) return x;
  std::vector<int64_t> idx(length);
  for (int64_t i = 0; i < length; ++i) idx[i] = i * n / length;
  return ag::GatherRows(x, idx);
}

ResidualStack::ResidualStack(int width, int kernel, int num_blocks,
                             int interpolate_after)
    : interpolate_after_(interpolate_after) {
  if (interpolate_after < 0 || interpolate_after > num_blocks) {
    throw std::invalid_argument("interpolation point outside the stack");
  }
  for (int i = 0; i < num_blocks; ++i) {
    blocks_.push_back(std::make_unique<ResidualBlock>(width, kernel));
    RegisterChild("block" + std::to_string(i), blocks_.back().get());
  }
}

ag::Tensor ResidualStack::Forward(const ag::Tensor& x,
                                  int64_t target_length) const {
  ag::Tensor h = x;
  for (int i = 0; i < num_blocks(); ++i) {
    h = blocks_[i]->Forward(h);
    if (interpolate_after_ > 0 && i + 1 == interpolate_after_ &&
        target_length > 0) {
      h = NearestInterpolate(h, target_length);
    }
  }
  return h;
}

TransformerLayer::TransformerLayer(int dim, int heads, int ffn_dim)
    : heads_(heads),
      query_(dim, dim),
      key_(dim, dim),
      value_(dim, dim),
      out_(dim, dim),
      attn_norm_(dim),
      ffn_in_(dim, ffn_dim),
      ffn_out_(ffn_dim, dim),
      ffn_norm_(dim) {
  if (dim % heads != 0) {
    throw std::invalid_argument("attention width must divide into heads");
  }
  RegisterChild("query", &query_);
  RegisterChild("key", &key_);
  RegisterChild("value", &value_);
  RegisterChild("out", &out_);
  RegisterChild("attn_norm", &attn_norm_);
  RegisterChild("ffn_in", &ffn_in_);
  RegisterChild("ffn_out", &ffn_out_);
  RegisterChild("ffn_norm", &ffn_norm_);
}

ag::Tensor TransformerLayer::Forward(const ag::Tensor& x) const {
  const int64_t dim = x.dim(1);
  const int64_t head_dim = dim / heads_;
  const ag::Tensor q = query_.Forward(x);
  const ag::Tensor k = key_.Forward(x);
  const ag::Tensor v = value_.Forward(x);
  std::vector<ag::Tensor> heads;
  for (int h = 0; h < heads_; ++h) {
    const ag::Tensor qh = ag::SliceColumns(q, h * head_dim, head_dim);
    const ag::Tensor kh = ag::SliceColumns(k, h * head_dim, head_dim);
    const ag::Tensor vh = ag::SliceColumns(v, h * head_dim, head_dim);
    const ag::Tensor scores = ag::Scale(ag::MatMul(qh, ag::Transpose(kh)),
                                        1.0 / std::sqrt(double(head_dim)));
    heads.push_back(ag::MatMul(ag::SoftmaxRows(scores), vh));
  }
  ag::Tensor h = attn_norm_.Forward(
      ag::Add(x, out_.Forward(ag::ConcatColumns(heads))));
  ag::Tensor f = ffn_out_.Forward(ag::Relu(ffn_in_.Forward(h)));
  return ffn_norm_.Forward(ag::Add(h, f));
}

}  // namespace unitvc
