// Copyright 2026 The Momentfuse Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "momentfuse/layers.h"

#include <algorithm>
#include <cmath>

#include "momentfuse/error.h"

namespace mf {
namespace {

void RequireCache(bool cached, std::string_view kind) {
  if (!cached) {
    throw StateError(std::string(kind) +
                     ": backward called without a cached forward pass");
  }
}

void GlorotUniform(Tensor& w, std::size_t fan_in, std::size_t fan_out,
                   std::mt19937_64& rng) {
  const double limit =
      std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  std::uniform_real_distribution<double> dist(-limit, limit);
  for (double& v : w.storage()) v = dist(rng);
}

void RequireRank4(const Shape& s, std::string_view kind) {
  if (s.size() != 4) {
    throw ShapeError(std::string(kind) + " expects [N,C,H,W], got " +
                     ShapeToString(s));
  }
}

}  // namespace

std::string_view LayerKindName(LayerKind kind) {
  switch (kind) {
    case LayerKind::kDense: return "dense";
    case LayerKind::kConv3x3: return "conv3x3";
    case LayerKind::kConvKxK: return "conv_kxk";
    case LayerKind::kMaxPool2x2: return "maxpool2x2";
    case LayerKind::kBatchNorm: return "batchnorm";
    case LayerKind::kRelu: return "relu";
    case LayerKind::kGlobalAvgPool: return "global_avg_pool";
  }
  return "unknown";
}

std::vector<const Parameter*> Layer::parameters() const {
  auto mut = const_cast<Layer*>(this)->parameters();
  return {mut.begin(), mut.end()};
}

// ---------------------------------------------------------------- Dense

Dense::Dense(std::size_t in, std::size_t out)
    : in_(in),
      out_(out),
      weight_{"weight", Tensor({out, in}), Tensor({out, in}), true},
      bias_{"bias", Tensor({out}), Tensor({out}), true} {
  if (in == 0 || out == 0) throw ShapeError("dense: dimensions must be > 0");
}

LayerSpec Dense::spec() const {
  return {LayerKind::kDense,
          {static_cast<std::uint32_t>(in_), static_cast<std::uint32_t>(out_)}};
}

Shape Dense::OutputShape(const Shape& input) const {
  if (input.size() != 2 || input[1] != in_) {
    throw ShapeError("dense expects [N," + std::to_string(in_) + "], got " +
                     ShapeToString(input));
  }
  return {input[0], out_};
}

Tensor Dense::Infer(const Tensor& input) const {
  const Shape out_shape = OutputShape(input.shape());
  const std::size_t n = out_shape[0];
  Tensor out(out_shape);
  const double* w = weight_.value.data();
  const double* b = bias_.value.data();
  for (std::size_t r = 0; r < n; ++r) {
    const double* x = input.data() + r * in_;
    double* y = out.data() + r * out_;
    for (std::size_t o = 0; o < out_; ++o) {
      const double* wo = w + o * in_;
      double acc = b[o];
      for (std::size_t i = 0; i < in_; ++i) acc += wo[i] * x[i];
      y[o] = acc;
    }
  }
  return out;
}

Tensor Dense::Forward(const Tensor& input, Mode /*mode*/) {
  Tensor out = Infer(input);
  input_ = input;
  cached_ = true;
  return out;
}

Tensor Dense::Backward(const Tensor& grad_output) {
  RequireCache(cached_, "dense");
  const std::size_t n = input_.dim(0);
  if (grad_output.shape() != Shape{n, out_}) {
    throw ShapeError("dense: upstream gradient " +
                     ShapeToString(grad_output.shape()) + " != output shape");
  }
  weight_.grad = Tensor({out_, in_});
  bias_.grad = Tensor({out_});
  Tensor grad_input({n, in_});
  const double* w = weight_.value.data();
  double* gw = weight_.grad.data();
  double* gb = bias_.grad.data();
  for (std::size_t r = 0; r < n; ++r) {
    const double* x = input_.data() + r * in_;
    const double* g = grad_output.data() + r * out_;
    double* gx = grad_input.data() + r * in_;
    for (std::size_t o = 0; o < out_; ++o) {
      const double go = g[o];
      if (go == 0.0) continue;
      gb[o] += go;
      double* gwo = gw + o * in_;
      const double* wo = w + o * in_;
      for (std::size_t i = 0; i < in_; ++i) {
        gwo[i] += go * x[i];
        gx[i] += go * wo[i];
      }
    }
  }
  return grad_input;
}

void Dense::Initialize(std::mt19937_64& rng) {
  GlorotUniform(weight_.value, in_, out_, rng);
  bias_.value.Fill(0.0);
}

std::unique_ptr<Layer> Dense::Clone() const {
  return std::make_unique<Dense>(*this);
}

// ---------------------------------------------------------------- Conv2d

Conv2d::Conv2d(std::size_t in_channels, std::size_t out_channels,
               std::size_t kernel, std::size_t stride, std::size_t padding)
    : in_(in_channels),
      out_(out_channels),
      kernel_(kernel),
      stride_(stride),
      padding_(padding),
      weight_{"weight", Tensor({out_channels, in_channels, kernel, kernel}),
              Tensor({out_channels, in_channels, kernel, kernel}), true},
      bias_{"bias", Tensor({out_channels}), Tensor({out_channels}), true} {
  if (in_ == 0 || out_ == 0 || kernel_ == 0 || stride_ == 0) {
    throw ShapeError("conv: channels, kernel and stride must be > 0");
  }
}

std::unique_ptr<Conv2d> Conv2d::Same3x3(std::size_t in_channels,
                                        std::size_t out_channels) {
  return std::make_unique<Conv2d>(in_channels, out_channels, 3, 1, 1);
}

LayerSpec Conv2d::spec() const {
  if (kernel_ == 3 && stride_ == 1 && padding_ == 1) {
    return {LayerKind::kConv3x3,
            {static_cast<std::uint32_t>(in_), static_cast<std::uint32_t>(out_)}};
  }
  return {LayerKind::kConvKxK,
          {static_cast<std::uint32_t>(in_), static_cast<std::uint32_t>(out_),
           static_cast<std::uint32_t>(kernel_),
           static_cast<std::uint32_t>(stride_),
           static_cast<std::uint32_t>(padding_)}};
}

Shape Conv2d::OutputShape(const Shape& input) const {
  RequireRank4(input, "conv");
  if (input[1] != in_) {
    throw ShapeError("conv expects " + std::to_string(in_) +
                     " input channels, got " + ShapeToString(input));
  }
  const std::size_t h = input[2] + 2 * padding_;
  const std::size_t w = input[3] + 2 * padding_;
  if (h < kernel_ || w < kernel_) {
    throw ShapeError("conv kernel " + std::to_string(kernel_) +
                     " larger than padded input " + ShapeToString(input));
  }
  if ((h - kernel_) % stride_ != 0 || (w - kernel_) % stride_ != 0) {
    throw ShapeError("conv: non-integral output size for input " +
                     ShapeToString(input));
  }
  return {input[0], out_, (h - kernel_) / stride_ + 1,
          (w - kernel_) / stride_ + 1};
}

namespace {

// Valid output-column range [lo, hi) for kernel column kw such that
// iw = ow*stride - pad + kw lies in [0, in_w).
struct ColRange {
  std::size_t lo, hi;
};

ColRange ValidOutputCols(std::size_t kw, std::size_t stride, std::size_t pad,
                         std::size_t in_w, std::size_t out_w) {
  const long s = static_cast<long>(stride);
  const long off = static_cast<long>(kw) - static_cast<long>(pad);
  // smallest ow with ow*s + off >= 0
  long lo = off >= 0 ? 0 : (-off + s - 1) / s;
  // largest ow with ow*s + off <= in_w - 1
  long last = static_cast<long>(in_w) - 1 - off;
  long hi = last < 0 ? 0 : last / s + 1;
  hi = std::min(hi, static_cast<long>(out_w));
  if (lo > hi) lo = hi;
  return {static_cast<std::size_t>(lo), static_cast<std::size_t>(hi)};
}

}  // namespace

// Scatter formulation: each kernel tap adds a scaled, shifted input row into
// the output row. Checked against the direct-summation oracle in tests.
Tensor Conv2d::Infer(const Tensor& input) const {
  const Shape os = OutputShape(input.shape());
  const std::size_t n = os[0], oh = os[2], ow = os[3];
  const std::size_t ih = input.dim(2), iw = input.dim(3);
  Tensor out(os);
  const double* w = weight_.value.data();
  for (std::size_t b = 0; b < n; ++b) {
    for (std::size_t oc = 0; oc < out_; ++oc) {
      double* plane = out.data() + ((b * out_ + oc) * oh) * ow;
      std::fill(plane, plane + oh * ow, bias_.value[oc]);
      for (std::size_t ic = 0; ic < in_; ++ic) {
        const double* src = input.data() + ((b * in_ + ic) * ih) * iw;
        const double* wk = w + ((oc * in_ + ic) * kernel_) * kernel_;
        for (std::size_t kh = 0; kh < kernel_; ++kh) {
          for (std::size_t kw = 0; kw < kernel_; ++kw) {
            const double wv = wk[kh * kernel_ + kw];
            if (wv == 0.0) continue;
            const ColRange cols =
                ValidOutputCols(kw, stride_, padding_, iw, ow);
            for (std::size_t y = 0; y < oh; ++y) {
              const long sy = static_cast<long>(y * stride_ + kh) -
                              static_cast<long>(padding_);
              if (sy < 0 || sy >= static_cast<long>(ih)) continue;
              const double* srow = src + static_cast<std::size_t>(sy) * iw;
              double* drow = plane + y * ow;
              for (std::size_t x = cols.lo; x < cols.hi; ++x) {
                drow[x] += wv * srow[x * stride_ + kw - padding_];
              }
            }
          }
        }
      }
    }
  }
  return out;
}

Tensor Conv2d::Forward(const Tensor& input, Mode /*mode*/) {
  Tensor out = Infer(input);
  input_ = input;
  cached_ = true;
  return out;
}

Tensor Conv2d::Backward(const Tensor& grad_output) {
  RequireCache(cached_, "conv");
  const Shape os = OutputShape(input_.shape());
  if (grad_output.shape() != os) {
    throw ShapeError("conv: upstream gradient " +
                     ShapeToString(grad_output.shape()) + " != output " +
                     ShapeToString(os));
  }
  const std::size_t n = os[0], oh = os[2], ow = os[3];
  const std::size_t ih = input_.dim(2), iw = input_.dim(3);
  weight_.grad = Tensor(weight_.value.shape());
  bias_.grad = Tensor({out_});
  Tensor grad_input(input_.shape());
  const double* w = weight_.value.data();
  double* gw = weight_.grad.data();
  for (std::size_t b = 0; b < n; ++b) {
    for (std::size_t oc = 0; oc < out_; ++oc) {
      const double* gplane = grad_output.data() + ((b * out_ + oc) * oh) * ow;
      double bsum = 0.0;
      for (std::size_t i = 0; i < oh * ow; ++i) bsum += gplane[i];
      bias_.grad[oc] += bsum;
      for (std::size_t ic = 0; ic < in_; ++ic) {
        const double* src = input_.data() + ((b * in_ + ic) * ih) * iw;
        double* gsrc = grad_input.data() + ((b * in_ + ic) * ih) * iw;
        const std::size_t wbase = ((oc * in_ + ic) * kernel_) * kernel_;
        for (std::size_t kh = 0; kh < kernel_; ++kh) {
          for (std::size_t kw = 0; kw < kernel_; ++kw) {
            const double wv = w[wbase + kh * kernel_ + kw];
            const ColRange cols =
                ValidOutputCols(kw, stride_, padding_, iw, ow);
            double acc = 0.0;
            for (std::size_t y = 0; y < oh; ++y) {
              const long sy = static_cast<long>(y * stride_ + kh) -
                              static_cast<long>(padding_);
              if (sy < 0 || sy >= static_cast<long>(ih)) continue;
              const std::size_t row = static_cast<std::size_t>(sy) * iw;
              const double* grow = gplane + y * ow;
              for (std::size_t x = cols.lo; x < cols.hi; ++x) {
                const std::size_t col = x * stride_ + kw - padding_;
                acc += grow[x] * src[row + col];
                gsrc[row + col] += grow[x] * wv;
              }
            }
            gw[wbase + kh * kernel_ + kw] += acc;
          }
        }
      }
    }
  }
  return grad_input;
}

void Conv2d::Initialize(std::mt19937_64& rng) {
  const std::size_t area = kernel_ * kernel_;
  GlorotUniform(weight_.value, in_ * area, out_ * area, rng);
  bias_.value.Fill(0.0);
}

std::unique_ptr<Layer> Conv2d::Clone() const {
  return std::make_unique<Conv2d>(*this);
}

// ---------------------------------------------------------------- MaxPool

LayerSpec MaxPool2x2::spec() const { return {LayerKind::kMaxPool2x2, {}}; }

Shape MaxPool2x2::OutputShape(const Shape& input) const {
  RequireRank4(input, "maxpool2x2");
  if (input[2] % 2 != 0 || input[3] % 2 != 0) {
    throw ShapeError("maxpool2x2 requires even spatial dims, got " +
                     ShapeToString(input));
  }
  return {input[0], input[1], input[2] / 2, input[3] / 2};
}

namespace {

Tensor MaxPoolImpl(const Tensor& input, const Shape& os,
                   std::vector<std::size_t>* argmax) {
  Tensor out(os);
  const std::size_t planes = os[0] * os[1];
  const std::size_t oh = os[2], ow = os[3];
  const std::size_t iw = input.dim(3);
  if (argmax) argmax->assign(out.size(), 0);
  for (std::size_t p = 0; p < planes; ++p) {
    const std::size_t in_base = p * (oh * 2) * iw;
    for (std::size_t y = 0; y < oh; ++y) {
      for (std::size_t x = 0; x < ow; ++x) {
        const std::size_t cand[4] = {
            in_base + (2 * y) * iw + 2 * x, in_base + (2 * y) * iw + 2 * x + 1,
            in_base + (2 * y + 1) * iw + 2 * x,
            in_base + (2 * y + 1) * iw + 2 * x + 1};
        std::size_t best = cand[0];
        for (int k = 1; k < 4; ++k) {
          if (input[cand[k]] > input[best]) best = cand[k];
        }
        const std::size_t o = (p * oh + y) * ow + x;
        out[o] = input[best];
        if (argmax) (*argmax)[o] = best;
      }
    }
  }
  return out;
}

}  // namespace

Tensor MaxPool2x2::Infer(const Tensor& input) const {
  return MaxPoolImpl(input, OutputShape(input.shape()), nullptr);
}

Tensor MaxPool2x2::Forward(const Tensor& input, Mode /*mode*/) {
  Tensor out = MaxPoolImpl(input, OutputShape(input.shape()), &argmax_);
  input_shape_ = input.shape();
  cached_ = true;
  return out;
}

Tensor MaxPool2x2::Backward(const Tensor& grad_output) {
  RequireCache(cached_, "maxpool2x2");
  if (grad_output.size() != argmax_.size()) {
    throw ShapeError("maxpool2x2: upstream gradient size mismatch");
  }
  Tensor grad_input(input_shape_);
  for (std::size_t o = 0; o < argmax_.size(); ++o) {
    grad_input[argmax_[o]] += grad_output[o];
  }
  return grad_input;
}

std::unique_ptr<Layer> MaxPool2x2::Clone() const {
  return std::make_unique<MaxPool2x2>(*this);
}

// ---------------------------------------------------------------- BatchNorm

BatchNorm::BatchNorm(std::size_t features)
    : features_(features),
      gamma_{"gamma", Tensor({features}, 1.0), Tensor({features}), true},
      beta_{"beta", Tensor({features}), Tensor({features}), true},
      running_mean_{"running_mean", Tensor({features}), Tensor({features}),
                    false},
      running_var_{"running_var", Tensor({features}, 1.0), Tensor({features}),
                   false} {
  if (features == 0) throw ShapeError("batchnorm: features must be > 0");
}

LayerSpec BatchNorm::spec() const {
  return {LayerKind::kBatchNorm, {static_cast<std::uint32_t>(features_)}};
}

Shape BatchNorm::OutputShape(const Shape& input) const {
  if ((input.size() != 2 && input.size() != 4) || input[1] != features_) {
    throw ShapeError("batchnorm(" + std::to_string(features_) +
                     ") expects [N,F] or [N,C,H,W], got " +
                     ShapeToString(input));
  }
  return input;
}

namespace {

// Element (b, f, s) of [N, F, S] where S = H*W (or 1 for rank-2 inputs).
struct Layout {
  std::size_t n, f, s;
};

Layout LayoutOf(const Shape& shape) {
  return {shape[0], shape[1], shape.size() == 4 ? shape[2] * shape[3] : 1};
}

}  // namespace

Tensor BatchNorm::Infer(const Tensor& input) const {
  OutputShape(input.shape());
  const Layout l = LayoutOf(input.shape());
  Tensor out(input.shape());
  for (std::size_t f = 0; f < l.f; ++f) {
    const double inv = 1.0 / std::sqrt(running_var_.value[f] + kEpsilon);
    const double scale = gamma_.value[f] * inv;
    const double shift = beta_.value[f] - running_mean_.value[f] * scale;
    for (std::size_t b = 0; b < l.n; ++b) {
      const std::size_t base = (b * l.f + f) * l.s;
      for (std::size_t i = 0; i < l.s; ++i) {
        out[base + i] = input[base + i] * scale + shift;
      }
    }
  }
  return out;
}

Tensor BatchNorm::Forward(const Tensor& input, Mode mode) {
  OutputShape(input.shape());
  const Layout l = LayoutOf(input.shape());
  xhat_ = Tensor(input.shape());
  inv_std_.assign(l.f, 0.0);
  Tensor out(input.shape());
  const double count = static_cast<double>(l.n * l.s);
  for (std::size_t f = 0; f < l.f; ++f) {
    double mean, var;
    if (mode == Mode::kTrain) {
      double sum = 0.0;
      for (std::size_t b = 0; b < l.n; ++b) {
        const std::size_t base = (b * l.f + f) * l.s;
        for (std::size_t i = 0; i < l.s; ++i) sum += input[base + i];
      }
      mean = sum / count;
      double sq = 0.0;
      for (std::size_t b = 0; b < l.n; ++b) {
        const std::size_t base = (b * l.f + f) * l.s;
        for (std::size_t i = 0; i < l.s; ++i) {
          const double d = input[base + i] - mean;
          sq += d * d;
        }
      }
      var = sq / count;
      const double unbiased = count > 1.0 ? sq / (count - 1.0) : var;
      running_mean_.value[f] =
          (1.0 - kMomentum) * running_mean_.value[f] + kMomentum * mean;
      running_var_.value[f] =
          (1.0 - kMomentum) * running_var_.value[f] + kMomentum * unbiased;
    } else {
      mean = running_mean_.value[f];
      var = running_var_.value[f];
    }
    const double inv = 1.0 / std::sqrt(var + kEpsilon);
    inv_std_[f] = inv;
    for (std::size_t b = 0; b < l.n; ++b) {
      const std::size_t base = (b * l.f + f) * l.s;
      for (std::size_t i = 0; i < l.s; ++i) {
        const double xh = (input[base + i] - mean) * inv;
        xhat_[base + i] = xh;
        out[base + i] = gamma_.value[f] * xh + beta_.value[f];
      }
    }
  }
  cached_mode_ = mode;
  cached_ = true;
  return out;
}

Tensor BatchNorm::Backward(const Tensor& grad_output) {
  RequireCache(cached_, "batchnorm");
  if (grad_output.shape() != xhat_.shape()) {
    throw ShapeError("batchnorm: upstream gradient shape mismatch");
  }
  const Layout l = LayoutOf(xhat_.shape());
  const double count = static_cast<double>(l.n * l.s);
  gamma_.grad = Tensor({features_});
  beta_.grad = Tensor({features_});
  Tensor grad_input(xhat_.shape());
  for (std::size_t f = 0; f < l.f; ++f) {
    double sum_g = 0.0, sum_gx = 0.0;
    for (std::size_t b = 0; b < l.n; ++b) {
      const std::size_t base = (b * l.f + f) * l.s;
      for (std::size_t i = 0; i < l.s; ++i) {
        sum_g += grad_output[base + i];
        sum_gx += grad_output[base + i] * xhat_[base + i];
      }
    }
    gamma_.grad[f] = sum_gx;
    beta_.grad[f] = sum_g;
    const double g = gamma_.value[f];
    const double inv = inv_std_[f];
    for (std::size_t b = 0; b < l.n; ++b) {
      const std::size_t base = (b * l.f + f) * l.s;
      for (std::size_t i = 0; i < l.s; ++i) {
        const double go = grad_output[base + i];
        if (cached_mode_ == Mode::kTrain) {
          grad_input[base + i] =
              g * inv *
              (go - sum_g / count - xhat_[base + i] * sum_gx / count);
        } else {
          grad_input[base + i] = g * inv * go;
        }
      }
    }
  }
  return grad_input;
}

std::unique_ptr<Layer> BatchNorm::Clone() const {
  return std::make_unique<BatchNorm>(*this);
}

// ---------------------------------------------------------------- Relu

LayerSpec Relu::spec() const { return {LayerKind::kRelu, {}}; }

Tensor Relu::Infer(const Tensor& input) const {
  Tensor out = input;
  for (double& v : out.storage()) v = v > 0.0 ? v : 0.0;
  return out;
}

Tensor Relu::Forward(const Tensor& input, Mode /*mode*/) {
  input_ = input;
  cached_ = true;
  return Infer(input);
}

Tensor Relu::Backward(const Tensor& grad_output) {
  RequireCache(cached_, "relu");
  if (grad_output.shape() != input_.shape()) {
    throw ShapeError("relu: upstream gradient shape mismatch");
  }
  Tensor grad_input(input_.shape());
  for (std::size_t i = 0; i < grad_input.size(); ++i) {
    grad_input[i] = input_[i] > 0.0 ? grad_output[i] : 0.0;
  }
  return grad_input;
}

std::unique_ptr<Layer> Relu::Clone() const {
  return std::make_unique<Relu>(*this);
}

// ---------------------------------------------------------------- GAP

LayerSpec GlobalAvgPool::spec() const {
  return {LayerKind::kGlobalAvgPool, {}};
}

Shape GlobalAvgPool::OutputShape(const Shape& input) const {
  RequireRank4(input, "global_avg_pool");
  return {input[0], input[1]};
}

Tensor GlobalAvgPool::Infer(const Tensor& input) const {
  const Shape os = OutputShape(input.shape());
  const std::size_t area = input.dim(2) * input.dim(3);
  Tensor out(os);
  for (std::size_t p = 0; p < out.size(); ++p) {
    double sum = 0.0;
    for (std::size_t i = 0; i < area; ++i) sum += input[p * area + i];
    out[p] = sum / static_cast<double>(area);
  }
  return out;
}

Tensor GlobalAvgPool::Forward(const Tensor& input, Mode /*mode*/) {
  Tensor out = Infer(input);
  input_shape_ = input.shape();
  cached_ = true;
  return out;
}

Tensor GlobalAvgPool::Backward(const Tensor& grad_output) {
  RequireCache(cached_, "global_avg_pool");
  const std::size_t area = input_shape_[2] * input_shape_[3];
  if (grad_output.size() * area != NumElements(input_shape_)) {
    throw ShapeError("global_avg_pool: upstream gradient size mismatch");
  }
  Tensor grad_input(input_shape_);
  const double scale = 1.0 / static_cast<double>(area);
  for (std::size_t p = 0; p < grad_output.size(); ++p) {
    for (std::size_t i = 0; i < area; ++i) {
      grad_input[p * area + i] = grad_output[p] * scale;
    }
  }
  return grad_input;
}

std::unique_ptr<Layer> GlobalAvgPool::Clone() const {
  return std::make_unique<GlobalAvgPool>(*this);
}

// ---------------------------------------------------------------- factory

std::unique_ptr<Layer> MakeLayer(const LayerSpec& spec) {
  auto need = [&](std::size_t n) {
    if (spec.dims.size() != n) {
      throw FormatError(std::string(LayerKindName(spec.kind)) + " expects " +
                        std::to_string(n) + " dims, got " +
                        std::to_string(spec.dims.size()));
    }
  };
  switch (spec.kind) {
    case LayerKind::kDense:
      need(2);
      return std::make_unique<Dense>(spec.dims[0], spec.dims[1]);
    case LayerKind::kConv3x3:
      need(2);
      return Conv2d::Same3x3(spec.dims[0], spec.dims[1]);
    case LayerKind::kConvKxK:
      need(5);
      return std::make_unique<Conv2d>(spec.dims[0], spec.dims[1], spec.dims[2],
                                      spec.dims[3], spec.dims[4]);
    case LayerKind::kMaxPool2x2:
      need(0);
      return std::make_unique<MaxPool2x2>();
    case LayerKind::kBatchNorm:
      need(1);
      return std::make_unique<BatchNorm>(spec.dims[0]);
    case LayerKind::kRelu:
      need(0);
      return std::make_unique<Relu>();
    case LayerKind::kGlobalAvgPool:
      need(0);
      return std::make_unique<GlobalAvgPool>();
  }
  throw FormatError("unknown layer kind tag " +
                    std::to_string(static_cast<std::uint32_t>(spec.kind)));
}

}  // namespace mf
