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
#ifndef TABSTRUCT_KERNELS_H_
#define TABSTRUCT_KERNELS_H_

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace tabstruct {

// Dense (C, H, W) feature map, row-major, double precision.
class Tensor3 {
 public:
  Tensor3() = default;
  Tensor3(int channels, int height, int width, double fill = 0.0);

  int channels() const { return channels_; }
  int height() const { return height_; }
  int width() const { return width_; }
  std::size_t size() const { return values_.size(); }

  double& at(int c, int h, int w) { return values_[Index(c, h, w)]; }
  double at(int c, int h, int w) const { return values_[Index(c, h, w)]; }

  std::span<double> data() { return values_; }
  std::span<const double> data() const { return values_; }

  bool SameShape(const Tensor3& other) const {
    return channels_ == other.channels_ && height_ == other.height_ &&
           width_ == other.width_;
  }

  static Tensor3 Random(int channels, int height, int width,
                        std::mt19937_64& rng, double lo = -1.0,
                        double hi = 1.0);

  friend bool operator==(const Tensor3&, const Tensor3&) = default;

 private:
  std::size_t Index(int c, int h, int w) const {
    return (static_cast<std::size_t>(c) * height_ + h) * width_ + w;
  }

  int channels_ = 0;
  int height_ = 0;
  int width_ = 0;
  std::vector<double> values_;
};

// Largest absolute element-wise difference; infinity on shape mismatch.
double MaxAbsDiff(const Tensor3& a, const Tensor3& b);

struct Kernel2D {
  int height = 1;
  int width = 1;
  std::vector<double> values;  // row-major

  Kernel2D() : values(1, 0.0) {}
  Kernel2D(int h, int w, double fill = 0.0)
      : height(h), width(w), values(static_cast<std::size_t>(h) * w, fill) {}

  double& at(int u, int v) { return values[static_cast<std::size_t>(u) * width + v]; }
  double at(int u, int v) const {
    return values[static_cast<std::size_t>(u) * width + v];
  }

  // 1 at the center, 0 elsewhere.
  static Kernel2D Identity(int h, int w);
};

// Per-channel cross-correlation, zero padding, output size equals input size.
// Throws a config error for even kernel extents or a channel-count mismatch.
Tensor3 DepthwiseConv2d(const Tensor3& x, std::span<const Kernel2D> kernels);

struct DepthwiseConvGrads {
  Tensor3 input;
  std::vector<Kernel2D> kernels;
};

DepthwiseConvGrads DepthwiseConv2dBackward(const Tensor3& x,
                                           std::span<const Kernel2D> kernels,
                                           const Tensor3& grad_out);

// A k x 1 kernel followed by a 1 x k kernel, per channel.
struct SeparableKernels {
  int length = 1;
  std::vector<Kernel2D> vertical;    // k x 1
  std::vector<Kernel2D> horizontal;  // 1 x k

  static SeparableKernels Zero(int channels, int length);
};

Tensor3 SeparablePair(const Tensor3& x, const SeparableKernels& kernels);

struct SeparablePairGrads {
  Tensor3 input;
  std::vector<Kernel2D> vertical;
  std::vector<Kernel2D> horizontal;
};

SeparablePairGrads SeparablePairBackward(const Tensor3& x,
                                         const SeparableKernels& kernels,
                                         const Tensor3& grad_out);

// 1 x 1 convolution: out[o] = sum_c weights[o][c] * x[c] + bias[o].
struct PointwiseProjection {
  int in_channels = 0;
  int out_channels = 0;
  std::vector<double> weights;  // out x in, row-major
  std::vector<double> bias;     // out

  static PointwiseProjection Zero(int in_channels, int out_channels);
  double& weight(int o, int c) {
    return weights[static_cast<std::size_t>(o) * in_channels + c];
  }
  double weight(int o, int c) const {
    return weights[static_cast<std::size_t>(o) * in_channels + c];
  }
};

Tensor3 Pointwise(const Tensor3& x, const PointwiseProjection& proj);

struct PointwiseGrads {
  Tensor3 input;
  std::vector<double> weights;
  std::vector<double> bias;
};

PointwiseGrads PointwiseBackward(const Tensor3& x,
                                 const PointwiseProjection& proj,
                                 const Tensor3& grad_out);

// Element-wise product; throws a config error on shape mismatch.
Tensor3 Multiply(const Tensor3& a, const Tensor3& b);

// Stacks tensors of equal spatial size along the channel axis.
Tensor3 ConcatChannels(std::span<const Tensor3> parts);

// Multi-branch large-kernel attention: each branch is a separable pair, the
// branch outputs are concatenated and projected back to C channels, and the
// result gates the input element-wise.
struct SpatialAttentionParams {
  std::vector<SeparableKernels> branches;
  PointwiseProjection projection;  // (branches * C) -> C

  int channels() const { return projection.out_channels; }

  static SpatialAttentionParams Zero(int channels,
                                     const std::vector<int>& lengths = {7, 11,
                                                                        21});
  // Flat parameter vector: per branch the vertical then horizontal taps of
  // each channel, then projection weights, then bias.
  std::vector<double> Flatten() const;
  void Unflatten(std::span<const double> flat);
  std::size_t ParameterCount() const;
};

// Throws a config error when the input channels do not match the params.
Tensor3 SpatialAttentionForward(const Tensor3& x,
                                const SpatialAttentionParams& params);

struct SpatialAttentionGrads {
  Tensor3 input;
  SpatialAttentionParams params;  // same layout, holding gradients
};

SpatialAttentionGrads SpatialAttentionBackward(
    const Tensor3& x, const SpatialAttentionParams& params,
    const Tensor3& grad_out);

// Depthwise deformable convolution. Offsets hold (dy, dx) for tap n in
// channels 2n and 2n + 1, taps in row-major kernel order.
struct DeformableParams {
  int kernel_size = 3;
  std::vector<Kernel2D> weights;  // per channel, k x k
  Tensor3 offsets;                // (2 k^2, H, W)
};

// Bilinear read of channel c at a real position; taps outside the map read
// zero. Integer positions return the stored value exactly.
double BilinearSample(const Tensor3& x, int c, double y, double x_pos);

// z(p0) = sum_n w(p_n) x(p0 + p_n + dp_n), sampled bilinearly. Throws a
// config error on offset shape mismatch or non-finite offsets.
Tensor3 DeformableConvForward(const Tensor3& x, const DeformableParams& params);

// An operation with hand-written gradients over a flat parameter vector.
class DifferentiableOp {
 public:
  virtual ~DifferentiableOp() = default;
  virtual std::string name() const = 0;
  virtual Tensor3 Forward(const Tensor3& x,
                          std::span<const double> params) const = 0;
  // Returns the input gradient; writes parameter gradients to `grad_params`.
  virtual Tensor3 Backward(const Tensor3& x, std::span<const double> params,
                           const Tensor3& grad_out,
                           std::vector<double>* grad_params) const = 0;
};

class DepthwiseConvOp : public DifferentiableOp {
 public:
  DepthwiseConvOp(int channels, int kernel_height, int kernel_width);
  std::string name() const override { return "depthwise_conv"; }
  std::size_t ParameterCount() const;
  Tensor3 Forward(const Tensor3& x,
                  std::span<const double> params) const override;
  Tensor3 Backward(const Tensor3& x, std::span<const double> params,
                   const Tensor3& grad_out,
                   std::vector<double>* grad_params) const override;

 private:
  std::vector<Kernel2D> Unpack(std::span<const double> params) const;
  int channels_;
  int kernel_height_;
  int kernel_width_;
};

class SeparablePairOp : public DifferentiableOp {
 public:
  SeparablePairOp(int channels, int length);
  std::string name() const override { return "separable_pair"; }
  std::size_t ParameterCount() const;
  Tensor3 Forward(const Tensor3& x,
                  std::span<const double> params) const override;
  Tensor3 Backward(const Tensor3& x, std::span<const double> params,
                   const Tensor3& grad_out,
                   std::vector<double>* grad_params) const override;

 private:
  SeparableKernels Unpack(std::span<const double> params) const;
  int channels_;
  int length_;
};

class PointwiseProjectionOp : public DifferentiableOp {
 public:
  PointwiseProjectionOp(int in_channels, int out_channels);
  std::string name() const override { return "pointwise_projection"; }
  std::size_t ParameterCount() const;
  Tensor3 Forward(const Tensor3& x,
                  std::span<const double> params) const override;
  Tensor3 Backward(const Tensor3& x, std::span<const double> params,
                   const Tensor3& grad_out,
                   std::vector<double>* grad_params) const override;

 private:
  PointwiseProjection Unpack(std::span<const double> params) const;
  int in_channels_;
  int out_channels_;
};

// x * gate, with the gate tensor as the parameter vector.
class ElementwiseMultiplyOp : public DifferentiableOp {
 public:
  std::string name() const override { return "elementwise_multiply"; }
  Tensor3 Forward(const Tensor3& x,
                  std::span<const double> params) const override;
  Tensor3 Backward(const Tensor3& x, std::span<const double> params,
                   const Tensor3& grad_out,
                   std::vector<double>* grad_params) const override;
};

class SpatialAttentionOp : public DifferentiableOp {
 public:
  explicit SpatialAttentionOp(int channels,
                              std::vector<int> lengths = {7, 11, 21});
  std::string name() const override { return "spatial_attention"; }
  std::size_t ParameterCount() const;
  Tensor3 Forward(const Tensor3& x,
                  std::span<const double> params) const override;
  Tensor3 Backward(const Tensor3& x, std::span<const double> params,
                   const Tensor3& grad_out,
                   std::vector<double>* grad_params) const override;

 private:
  SpatialAttentionParams Unpack(std::span<const double> params) const;
  int channels_;
  std::vector<int> lengths_;
};

struct GradCheckResult {
  double max_rel_error_input = 0.0;
  double max_rel_error_params = 0.0;
  double max_rel_error = 0.0;
  // Analytic gradients of the probe loss.
  Tensor3 grad_input;
  std::vector<double> grad_params;
};

// Compares analytic gradients of L = sum(r * op(x)), r a seeded random probe,
// with central differences of step `epsilon`. Error per element is
// |a - n| / max(|a|, |n|, 1). Throws a numerical error on non-finite
// gradients.
GradCheckResult GradCheck(const DifferentiableOp& op, const Tensor3& x,
                          std::span<const double> params,
                          double epsilon = 1e-5, std::uint64_t seed = 7);

struct KernelCheck {
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double tolerance = 0.0;
};

// Seeded self-test of the kernel invariants (zero-offset deformable equals
// convolution, separable equals rank-1 kernel, shape preservation, linearity,
// gradient checks).
std::vector<KernelCheck> RunKernelChecks(std::uint64_t seed = 2024);

}  // namespace tabstruct

#endif  // TABSTRUCT_KERNELS_H_
