// Copyright 2026 The TabStruct Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include "tabstruct/kernels.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "tabstruct/error.h"

namespace tabstruct {

Tensor3::Tensor3(int channels, int height, int width, double fill)
    : channels_(channels), height_(height), width_(width) {
  if (channels < 0 || height < 0 || width < 0) {
    throw Error(ErrorCategory::kConfig, "negative tensor extent");
  }
  values_.assign(static_cast<std::size_t>(channels) * height * width, fill);
}

Tensor3 Tensor3::Random(int channels, int height, int width,
                        std::mt19937_64& rng, double lo, double hi) {
  Tensor3 t(channels, height, width);
  std::uniform_real_distribution<double> dist(lo, hi);
  for (double& v : t.values_) v = dist(rng);
  return t;
}

double MaxAbsDiff(const Tensor3& a, const Tensor3& b) {
  if (!a.SameShape(b)) return std::numeric_limits<double>::infinity();
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    worst = std::max(worst, std::abs(a.data()[i] - b.data()[i]));
  }
  return worst;
}

Kernel2D Kernel2D::Identity(int h, int w) {
  Kernel2D k(h, w);
  k.at(h / 2, w / 2) = 1.0;
  return k;
}

namespace {

void CheckKernels(const Tensor3& x, std::span<const Kernel2D> kernels) {
  if (static_cast<int>(kernels.size()) != x.channels()) {
    throw Error(ErrorCategory::kConfig,
                fmt::format("{} kernels for {} channels", kernels.size(),
                            x.channels()));
  }
  for (const auto& k : kernels) {
    if (k.height % 2 == 0 || k.width % 2 == 0 || k.height < 1 ||
        k.width < 1) {
      throw Error(ErrorCategory::kConfig,
                  fmt::format("kernel {}x{} must have odd extents", k.height,
                              k.width));
    }
    if (k.values.size() != static_cast<std::size_t>(k.height) * k.width) {
      throw Error(ErrorCategory::kConfig, "kernel value count mismatch");
    }
  }
}

void CheckSameShape(const Tensor3& a, const Tensor3& b, const char* what) {
  if (!a.SameShape(b)) {
    throw Error(ErrorCategory::kConfig,
                fmt::format("{}: shape ({},{},{}) vs ({},{},{})", what,
                            a.channels(), a.height(), a.width(), b.channels(),
                            b.height(), b.width()));
  }
}

}  // namespace

Tensor3 DepthwiseConv2d(const Tensor3& x, std::span<const Kernel2D> kernels) {
  CheckKernels(x, kernels);
  Tensor3 out(x.channels(), x.height(), x.width());
  for (int c = 0; c < x.channels(); ++c) {
    const Kernel2D& k = kernels[c];
    const int ph = k.height / 2;
    const int pw = k.width / 2;
    for (int i = 0; i < x.height(); ++i) {
      for (int j = 0; j < x.width(); ++j) {
        double acc = 0.0;
        for (int u = 0; u < k.height; ++u) {
          const int y = i + u - ph;
          if (y < 0 || y >= x.height()) continue;
          for (int v = 0; v < k.width; ++v) {
            const int xx = j + v - pw;
            if (xx < 0 || xx >= x.width()) continue;
            acc += k.at(u, v) * x.at(c, y, xx);
          }
        }
        out.at(c, i, j) = acc;
      }
    }
  }
  return out;
}

DepthwiseConvGrads DepthwiseConv2dBackward(const Tensor3& x,
                                           std::span<const Kernel2D> kernels,
                                           const Tensor3& grad_out) {
  CheckKernels(x, kernels);
  CheckSameShape(x, grad_out, "depthwise backward");
  DepthwiseConvGrads grads{Tensor3(x.channels(), x.height(), x.width()), {}};
  for (int c = 0; c < x.channels(); ++c) {
    const Kernel2D& k = kernels[c];
    Kernel2D dk(k.height, k.width);
    const int ph = k.height / 2;
    const int pw = k.width / 2;
    for (int i = 0; i < x.height(); ++i) {
      for (int j = 0; j < x.width(); ++j) {
        const double g = grad_out.at(c, i, j);
        for (int u = 0; u < k.height; ++u) {
          const int y = i + u - ph;
          if (y < 0 || y >= x.height()) continue;
          for (int v = 0; v < k.width; ++v) {
            const int xx = j + v - pw;
            if (xx < 0 || xx >= x.width()) continue;
            grads.input.at(c, y, xx) += k.at(u, v) * g;
            dk.at(u, v) += x.at(c, y, xx) * g;
          }
        }
      }
    }
    grads.kernels.push_back(std::move(dk));
  }
  return grads;
}

SeparableKernels SeparableKernels::Zero(int channels, int length) {
  SeparableKernels k;
  k.length = length;
  k.vertical.assign(channels, Kernel2D(length, 1));
  k.horizontal.assign(channels, Kernel2D(1, length));
  return k;
}

Tensor3 SeparablePair(const Tensor3& x, const SeparableKernels& kernels) {
  return DepthwiseConv2d(DepthwiseConv2d(x, kernels.vertical),
                         kernels.horizontal);
}

SeparablePairGrads SeparablePairBackward(const Tensor3& x,
                                         const SeparableKernels& kernels,
                                         const Tensor3& grad_out) {
  const Tensor3 mid = DepthwiseConv2d(x, kernels.vertical);
  DepthwiseConvGrads h = DepthwiseConv2dBackward(mid, kernels.horizontal,
                                                 grad_out);
  DepthwiseConvGrads v = DepthwiseConv2dBackward(x, kernels.vertical, h.input);
  return {std::move(v.input), std::move(v.kernels), std::move(h.kernels)};
}

PointwiseProjection PointwiseProjection::Zero(int in_channels,
                                              int out_channels) {
  return {in_channels, out_channels,
          std::vector<double>(static_cast<std::size_t>(in_channels) *
                                  out_channels,
                              0.0),
          std::vector<double>(out_channels, 0.0)};
}

Tensor3 Pointwise(const Tensor3& x, const PointwiseProjection& proj) {
  if (x.channels() != proj.in_channels) {
    throw Error(ErrorCategory::kConfig,
                fmt::format("projection expects {} channels, got {}",
                            proj.in_channels, x.channels()));
  }
  Tensor3 out(proj.out_channels, x.height(), x.width());
  for (int o = 0; o < proj.out_channels; ++o) {
    for (int i = 0; i < x.height(); ++i) {
      for (int j = 0; j < x.width(); ++j) {
        double acc = proj.bias[o];
        for (int c = 0; c < proj.in_channels; ++c) {
          acc += proj.weight(o, c) * x.at(c, i, j);
        }
        out.at(o, i, j) = acc;
      }
    }
  }
  return out;
}

PointwiseGrads PointwiseBackward(const Tensor3& x,
                                 const PointwiseProjection& proj,
                                 const Tensor3& grad_out) {
  if (x.channels() != proj.in_channels ||
      grad_out.channels() != proj.out_channels ||
      grad_out.height() != x.height() || grad_out.width() != x.width()) {
    throw Error(ErrorCategory::kConfig, "pointwise backward shape mismatch");
  }
  PointwiseGrads grads{Tensor3(x.channels(), x.height(), x.width()),
                       std::vector<double>(proj.weights.size(), 0.0),
                       std::vector<double>(proj.bias.size(), 0.0)};
  for (int o = 0; o < proj.out_channels; ++o) {
    for (int i = 0; i < x.height(); ++i) {
      for (int j = 0; j < x.width(); ++j) {
        const double g = grad_out.at(o, i, j);
        grads.bias[o] += g;
        for (int c = 0; c < proj.in_channels; ++c) {
          grads.weights[static_cast<std::size_t>(o) * proj.in_channels + c] +=
              g * x.at(c, i, j);
          grads.input.at(c, i, j) += proj.weight(o, c) * g;
        }
      }
    }
  }
  return grads;
}

Tensor3 Multiply(const Tensor3& a, const Tensor3& b) {
  CheckSameShape(a, b, "multiply");
  Tensor3 out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] *= b.data()[i];
  return out;
}

Tensor3 ConcatChannels(std::span<const Tensor3> parts) {
  if (parts.empty()) return {};
  int channels = 0;
  for (const auto& p : parts) {
    if (p.height() != parts[0].height() || p.width() != parts[0].width()) {
      throw Error(ErrorCategory::kConfig, "concat of mismatched spatial sizes");
    }
    channels += p.channels();
  }
  Tensor3 out(channels, parts[0].height(), parts[0].width());
  auto dst = out.data().begin();
  for (const auto& p : parts) dst = std::copy(p.data().begin(), p.data().end(), dst);
  return out;
}

SpatialAttentionParams SpatialAttentionParams::Zero(
    int channels, const std::vector<int>& lengths) {
  SpatialAttentionParams params;
  for (int length : lengths) {
    params.branches.push_back(SeparableKernels::Zero(channels, length));
  }
  params.projection = PointwiseProjection::Zero(
      channels * static_cast<int>(lengths.size()), channels);
  return params;
}

std::size_t SpatialAttentionParams::ParameterCount() const {
  std::size_t count = projection.weights.size() + projection.bias.size();
  for (const auto& b : branches) {
    count += 2 * b.vertical.size() * static_cast<std::size_t>(b.length);
  }
  return count;
}

std::vector<double> SpatialAttentionParams::Flatten() const {
  std::vector<double> flat;
  flat.reserve(ParameterCount());
  for (const auto& b : branches) {
    for (const auto& k : b.vertical) {
      flat.insert(flat.end(), k.values.begin(), k.values.end());
    }
    for (const auto& k : b.horizontal) {
      flat.insert(flat.end(), k.values.begin(), k.values.end());
    }
  }
  flat.insert(flat.end(), projection.weights.begin(), projection.weights.end());
  flat.insert(flat.end(), projection.bias.begin(), projection.bias.end());
  return flat;
}

void SpatialAttentionParams::Unflatten(std::span<const double> flat) {
  if (flat.size() != ParameterCount()) {
    throw Error(ErrorCategory::kConfig,
                fmt::format("{} parameters for a layout of {}", flat.size(),
                            ParameterCount()));
  }
  auto src = flat.begin();
  const auto take = [&](std::vector<double>& dst) {
    std::copy(src, src + static_cast<std::ptrdiff_t>(dst.size()), dst.begin());
    src += static_cast<std::ptrdiff_t>(dst.size());
  };
  for (auto& b : branches) {
    for (auto& k : b.vertical) take(k.values);
    for (auto& k : b.horizontal) take(k.values);
  }
  take(projection.weights);
  take(projection.bias);
}

namespace {

void CheckAttentionInput(const Tensor3& x,
                         const SpatialAttentionParams& params) {
  if (x.channels() != params.channels() ||
      params.projection.in_channels !=
          params.channels() * static_cast<int>(params.branches.size())) {
    throw Error(ErrorCategory::kConfig,
                fmt::format("attention configured for {} channels, input has {}",
                            params.channels(), x.channels()));
  }
}

std::vector<Tensor3> BranchOutputs(const Tensor3& x,
                                   const SpatialAttentionParams& params) {
  std::vector<Tensor3> outs;
  outs.reserve(params.branches.size());
  for (const auto& b : params.branches) outs.push_back(SeparablePair(x, b));
  return outs;
}

}  // namespace

Tensor3 SpatialAttentionForward(const Tensor3& x,
                                const SpatialAttentionParams& params) {
  CheckAttentionInput(x, params);
  const std::vector<Tensor3> branches = BranchOutputs(x, params);
  const Tensor3 attention = Pointwise(ConcatChannels(branches), params.projection);
  return Multiply(attention, x);
}

SpatialAttentionGrads SpatialAttentionBackward(
    const Tensor3& x, const SpatialAttentionParams& params,
    const Tensor3& grad_out) {
  CheckAttentionInput(x, params);
  CheckSameShape(x, grad_out, "attention backward");
  const std::vector<Tensor3> branches = BranchOutputs(x, params);
  const Tensor3 stacked = ConcatChannels(branches);
  const Tensor3 attention = Pointwise(stacked, params.projection);

  SpatialAttentionGrads grads{Multiply(grad_out, attention), params};
  const Tensor3 grad_attention = Multiply(grad_out, x);
  PointwiseGrads proj = PointwiseBackward(stacked, params.projection,
                                          grad_attention);
  grads.params.projection.weights = std::move(proj.weights);
  grads.params.projection.bias = std::move(proj.bias);

  const int c = x.channels();
  const std::size_t block = static_cast<std::size_t>(c) * x.height() * x.width();
  for (std::size_t b = 0; b < params.branches.size(); ++b) {
    Tensor3 grad_branch(c, x.height(), x.width());
    std::copy(proj.input.data().begin() + static_cast<std::ptrdiff_t>(b * block),
              proj.input.data().begin() +
                  static_cast<std::ptrdiff_t>((b + 1) * block),
              grad_branch.data().begin());
    SeparablePairGrads sg =
        SeparablePairBackward(x, params.branches[b], grad_branch);
    for (std::size_t i = 0; i < grads.input.size(); ++i) {
      grads.input.data()[i] += sg.input.data()[i];
    }
    grads.params.branches[b].vertical = std::move(sg.vertical);
    grads.params.branches[b].horizontal = std::move(sg.horizontal);
  }
  return grads;
}

double BilinearSample(const Tensor3& x, int c, double y, double x_pos) {
  const double fy = std::floor(y);
  const double fx = std::floor(x_pos);
  const double ly = y - fy;
  const double lx = x_pos - fx;
  const int y0 = static_cast<int>(fy);
  const int x0 = static_cast<int>(fx);
  const auto read = [&](int yy, int xx) {
    if (yy < 0 || yy >= x.height() || xx < 0 || xx >= x.width()) return 0.0;
    return x.at(c, yy, xx);
  };
  double value = 0.0;
  // Zero-weight taps are skipped so integer positions are reproduced exactly.
  const double wy[2] = {1.0 - ly, ly};
  const double wx[2] = {1.0 - lx, lx};
  for (int dy = 0; dy < 2; ++dy) {
    if (wy[dy] == 0.0) continue;
    for (int dx = 0; dx < 2; ++dx) {
      if (wx[dx] == 0.0) continue;
      value += wy[dy] * wx[dx] * read(y0 + dy, x0 + dx);
    }
  }
  return value;
}

Tensor3 DeformableConvForward(const Tensor3& x,
                              const DeformableParams& params) {
  const int k = params.kernel_size;
  if (k < 1 || k % 2 == 0) {
    throw Error(ErrorCategory::kConfig,
                fmt::format("deformable kernel size {} must be odd", k));
  }
  std::vector<Kernel2D> kernels = params.weights;
  CheckKernels(x, kernels);
  for (const auto& w : kernels) {
    if (w.height != k || w.width != k) {
      throw Error(ErrorCategory::kConfig, "deformable weights must be k x k");
    }
  }
  const Tensor3& off = params.offsets;
  if (off.channels() != 2 * k * k || off.height() != x.height() ||
      off.width() != x.width()) {
    throw Error(ErrorCategory::kConfig,
                fmt::format("offsets ({},{},{}) do not match (2k^2={},{},{})",
                            off.channels(), off.height(), off.width(), 2 * k * k,
                            x.height(), x.width()));
  }
  for (double v : off.data()) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCategory::kConfig, "non-finite deformable offset");
    }
  }

  const int pad = k / 2;
  Tensor3 out(x.channels(), x.height(), x.width());
  for (int c = 0; c < x.channels(); ++c) {
    for (int i = 0; i < x.height(); ++i) {
      for (int j = 0; j < x.width(); ++j) {
        double acc = 0.0;
        for (int u = 0; u < k; ++u) {
          for (int v = 0; v < k; ++v) {
            const int tap = u * k + v;
            const double y = i + u - pad + off.at(2 * tap, i, j);
            const double xx = j + v - pad + off.at(2 * tap + 1, i, j);
            acc += kernels[c].at(u, v) * BilinearSample(x, c, y, xx);
          }
        }
        out.at(c, i, j) = acc;
      }
    }
  }
  return out;
}

// --- Differentiable ops over flat parameter vectors ---

namespace {

void CheckParamCount(std::span<const double> params, std::size_t expected,
                     const std::string& op) {
  if (params.size() != expected) {
    throw Error(ErrorCategory::kConfig,
                fmt::format("{}: {} parameters, expected {}", op, params.size(),
                            expected));
  }
}

void AppendKernels(const std::vector<Kernel2D>& kernels,
                   std::vector<double>& flat) {
  for (const auto& k : kernels) {
    flat.insert(flat.end(), k.values.begin(), k.values.end());
  }
}

}  // namespace

DepthwiseConvOp::DepthwiseConvOp(int channels, int kernel_height,
                                 int kernel_width)
    : channels_(channels),
      kernel_height_(kernel_height),
      kernel_width_(kernel_width) {}

std::size_t DepthwiseConvOp::ParameterCount() const {
  return static_cast<std::size_t>(channels_) * kernel_height_ * kernel_width_;
}

std::vector<Kernel2D> DepthwiseConvOp::Unpack(
    std::span<const double> params) const {
  CheckParamCount(params, ParameterCount(), name());
  std::vector<Kernel2D> kernels(channels_,
                                Kernel2D(kernel_height_, kernel_width_));
  auto src = params.begin();
  for (auto& k : kernels) {
    std::copy(src, src + static_cast<std::ptrdiff_t>(k.values.size()),
              k.values.begin());
    src += static_cast<std::ptrdiff_t>(k.values.size());
  }
  return kernels;
}

Tensor3 DepthwiseConvOp::Forward(const Tensor3& x,
                                 std::span<const double> params) const {
  return DepthwiseConv2d(x, Unpack(params));
}

Tensor3 DepthwiseConvOp::Backward(const Tensor3& x,
                                  std::span<const double> params,
                                  const Tensor3& grad_out,
                                  std::vector<double>* grad_params) const {
  DepthwiseConvGrads g = DepthwiseConv2dBackward(x, Unpack(params), grad_out);
  grad_params->clear();
  AppendKernels(g.kernels, *grad_params);
  return std::move(g.input);
}

SeparablePairOp::SeparablePairOp(int channels, int length)
    : channels_(channels), length_(length) {}

std::size_t SeparablePairOp::ParameterCount() const {
  return 2 * static_cast<std::size_t>(channels_) * length_;
}

SeparableKernels SeparablePairOp::Unpack(std::span<const double> params) const {
  CheckParamCount(params, ParameterCount(), name());
  SeparableKernels k = SeparableKernels::Zero(channels_, length_);
  auto src = params.begin();
  for (auto* group : {&k.vertical, &k.horizontal}) {
    for (auto& kernel : *group) {
      std::copy(src, src + length_, kernel.values.begin());
      src += length_;
    }
  }
  return k;
}

Tensor3 SeparablePairOp::Forward(const Tensor3& x,
                                 std::span<const double> params) const {
  return SeparablePair(x, Unpack(params));
}

Tensor3 SeparablePairOp::Backward(const Tensor3& x,
                                  std::span<const double> params,
                                  const Tensor3& grad_out,
                                  std::vector<double>* grad_params) const {
  SeparablePairGrads g = SeparablePairBackward(x, Unpack(params), grad_out);
  grad_params->clear();
  AppendKernels(g.vertical, *grad_params);
  AppendKernels(g.horizontal, *grad_params);
  return std::move(g.input);
}

PointwiseProjectionOp::PointwiseProjectionOp(int in_channels, int out_channels)
    : in_channels_(in_channels), out_channels_(out_channels) {}

std::size_t PointwiseProjectionOp::ParameterCount() const {
  return static_cast<std::size_t>(in_channels_) * out_channels_ + out_channels_;
}

PointwiseProjection PointwiseProjectionOp::Unpack(
    std::span<const double> params) const {
  CheckParamCount(params, ParameterCount(), name());
  PointwiseProjection p = PointwiseProjection::Zero(in_channels_, out_channels_);
  std::copy(params.begin(), params.begin() + p.weights.size(), p.weights.begin());
  std::copy(params.begin() + p.weights.size(), params.end(), p.bias.begin());
  return p;
}

Tensor3 PointwiseProjectionOp::Forward(const Tensor3& x,
                                       std::span<const double> params) const {
  return Pointwise(x, Unpack(params));
}

Tensor3 PointwiseProjectionOp::Backward(const Tensor3& x,
                                        std::span<const double> params,
                                        const Tensor3& grad_out,
                                        std::vector<double>* grad_params) const {
  PointwiseGrads g = PointwiseBackward(x, Unpack(params), grad_out);
  *grad_params = std::move(g.weights);
  grad_params->insert(grad_params->end(), g.bias.begin(), g.bias.end());
  return std::move(g.input);
}

Tensor3 ElementwiseMultiplyOp::Forward(const Tensor3& x,
                                       std::span<const double> params) const {
  CheckParamCount(params, x.size(), name());
  Tensor3 out = x;
  for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] *= params[i];
  return out;
}

Tensor3 ElementwiseMultiplyOp::Backward(const Tensor3& x,
                                        std::span<const double> params,
                                        const Tensor3& grad_out,
                                        std::vector<double>* grad_params) const {
  CheckParamCount(params, x.size(), name());
  CheckSameShape(x, grad_out, "multiply backward");
  Tensor3 grad_x = grad_out;
  grad_params->assign(x.size(), 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    grad_x.data()[i] *= params[i];
    (*grad_params)[i] = grad_out.data()[i] * x.data()[i];
  }
  return grad_x;
}

SpatialAttentionOp::SpatialAttentionOp(int channels, std::vector<int> lengths)
    : channels_(channels), lengths_(std::move(lengths)) {}

std::size_t SpatialAttentionOp::ParameterCount() const {
  return SpatialAttentionParams::Zero(channels_, lengths_).ParameterCount();
}

SpatialAttentionParams SpatialAttentionOp::Unpack(
    std::span<const double> params) const {
  SpatialAttentionParams p = SpatialAttentionParams::Zero(channels_, lengths_);
  p.Unflatten(params);
  return p;
}

Tensor3 SpatialAttentionOp::Forward(const Tensor3& x,
                                    std::span<const double> params) const {
  return SpatialAttentionForward(x, Unpack(params));
}

Tensor3 SpatialAttentionOp::Backward(const Tensor3& x,
                                     std::span<const double> params,
                                     const Tensor3& grad_out,
                                     std::vector<double>* grad_params) const {
  SpatialAttentionGrads g = SpatialAttentionBackward(x, Unpack(params), grad_out);
  *grad_params = g.params.Flatten();
  return std::move(g.input);
}

// --- Gradient checking ---

namespace {

double ProbeLoss(const Tensor3& y, const Tensor3& probe) {
  double loss = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    loss += probe.data()[i] * y.data()[i];
  }
  return loss;
}

double RelativeError(double analytic, double numeric) {
  const double scale =
      std::max({std::abs(analytic), std::abs(numeric), 1.0});
  return std::abs(analytic - numeric) / scale;
}

void RequireFinite(std::span<const double> values, const std::string& what) {
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCategory::kNumerical, "non-finite " + what);
    }
  }
}

}  // namespace

GradCheckResult GradCheck(const DifferentiableOp& op, const Tensor3& x,
                          std::span<const double> params, double epsilon,
                          std::uint64_t seed) {
  if (!(epsilon > 0.0)) {
    throw Error(ErrorCategory::kConfig, "finite-difference step must be > 0");
  }
  const Tensor3 y = op.Forward(x, params);
  std::mt19937_64 rng(seed);
  const Tensor3 probe =
      Tensor3::Random(y.channels(), y.height(), y.width(), rng);

  GradCheckResult result;
  result.grad_input = op.Backward(x, params, probe, &result.grad_params);
  RequireFinite(result.grad_input.data(), op.name() + " input gradient");
  RequireFinite(result.grad_params, op.name() + " parameter gradient");
  if (result.grad_params.size() != params.size()) {
    throw Error(ErrorCategory::kNumerical,
                op.name() + " returned a parameter gradient of the wrong size");
  }

  Tensor3 xp = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double saved = xp.data()[i];
    xp.data()[i] = saved + epsilon;
    const double plus = ProbeLoss(op.Forward(xp, params), probe);
    xp.data()[i] = saved - epsilon;
    const double minus = ProbeLoss(op.Forward(xp, params), probe);
    xp.data()[i] = saved;
    const double numeric = (plus - minus) / (2.0 * epsilon);
    if (!std::isfinite(numeric)) {
      throw Error(ErrorCategory::kNumerical,
                  op.name() + " finite difference is not finite");
    }
    result.max_rel_error_input =
        std::max(result.max_rel_error_input,
                 RelativeError(result.grad_input.data()[i], numeric));
  }

  std::vector<double> pp(params.begin(), params.end());
  for (std::size_t i = 0; i < pp.size(); ++i) {
    const double saved = pp[i];
    pp[i] = saved + epsilon;
    const double plus = ProbeLoss(op.Forward(x, pp), probe);
    pp[i] = saved - epsilon;
    const double minus = ProbeLoss(op.Forward(x, pp), probe);
    pp[i] = saved;
    const double numeric = (plus - minus) / (2.0 * epsilon);
    if (!std::isfinite(numeric)) {
      throw Error(ErrorCategory::kNumerical,
                  op.name() + " finite difference is not finite");
    }
    result.max_rel_error_params =
        std::max(result.max_rel_error_params,
                 RelativeError(result.grad_params[i], numeric));
  }
  result.max_rel_error =
      std::max(result.max_rel_error_input, result.max_rel_error_params);
  return result;
}

}  // namespace tabstruct
