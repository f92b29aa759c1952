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
#include <algorithm>
#include <array>
#include <cmath>
#include <random>

#include "tabstruct/kernels.h"

namespace tabstruct {
namespace {

std::vector<Kernel2D> RandomKernels(int channels, int h, int w,
                                    std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<Kernel2D> kernels(channels, Kernel2D(h, w));
  for (auto& k : kernels) {
    for (double& v : k.values) v = dist(rng);
  }
  return kernels;
}

std::vector<double> RandomVector(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = dist(rng);
  return v;
}

Tensor3 Combine(double a, const Tensor3& x, double b, const Tensor3& y) {
  Tensor3 out = x;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.data()[i] = a * x.data()[i] + b * y.data()[i];
  }
  return out;
}

KernelCheck AtMost(std::string name, double measured, double tolerance) {
  return {std::move(name), measured <= tolerance, measured, tolerance};
}

}  // namespace

std::vector<KernelCheck> RunKernelChecks(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<KernelCheck> checks;

  {
    const Tensor3 x = Tensor3::Random(3, 9, 7, rng);
    const std::vector<Kernel2D> ids(3, Kernel2D::Identity(5, 3));
    checks.push_back(
        AtMost("depthwise_identity", MaxAbsDiff(DepthwiseConv2d(x, ids), x), 0.0));
  }

  {
    const Tensor3 x = Tensor3::Random(2, 8, 10, rng);
    DeformableParams params;
    params.kernel_size = 3;
    params.weights = RandomKernels(2, 3, 3, rng);
    params.offsets = Tensor3(18, 8, 10);
    const double diff = MaxAbsDiff(DeformableConvForward(x, params),
                                   DepthwiseConv2d(x, params.weights));
    checks.push_back(AtMost("deformable_zero_offset", diff, 1e-12));
  }

  {
    const int k = 7;
    const Tensor3 x = Tensor3::Random(2, 12, 11, rng);
    SeparableKernels sep = SeparableKernels::Zero(2, k);
    sep.vertical = RandomKernels(2, k, 1, rng);
    sep.horizontal = RandomKernels(2, 1, k, rng);
    std::vector<Kernel2D> full(2, Kernel2D(k, k));
    for (int c = 0; c < 2; ++c) {
      for (int u = 0; u < k; ++u) {
        for (int v = 0; v < k; ++v) {
          full[c].at(u, v) = sep.vertical[c].at(u, 0) * sep.horizontal[c].at(0, v);
        }
      }
    }
    checks.push_back(AtMost("separable_rank1",
                            MaxAbsDiff(SeparablePair(x, sep),
                                       DepthwiseConv2d(x, full)),
                            1e-9));
  }

  {
    double worst = 0.0;
    for (const auto& [c, h, w] : std::vector<std::array<int, 3>>{
             {1, 1, 1}, {1, 5, 9}, {2, 8, 8}, {3, 16, 7}, {8, 32, 32}}) {
      const Tensor3 x = Tensor3::Random(c, h, w, rng);
      SpatialAttentionParams params = SpatialAttentionParams::Zero(c);
      params.Unflatten(RandomVector(params.ParameterCount(), rng));
      const Tensor3 y = SpatialAttentionForward(x, params);
      if (!y.SameShape(x)) worst = 1.0;
    }
    checks.push_back(AtMost("attention_shape", worst, 0.0));
  }

  {
    const Tensor3 x = Tensor3::Random(2, 7, 9, rng);
    const Tensor3 y = Tensor3::Random(2, 7, 9, rng);
    const double a = 1.7;
    const double b = -0.4;
    const Tensor3 xy = Combine(a, x, b, y);
    const std::vector<Kernel2D> kernels = RandomKernels(2, 3, 5, rng);
    SeparableKernels sep = SeparableKernels::Zero(2, 11);
    sep.vertical = RandomKernels(2, 11, 1, rng);
    sep.horizontal = RandomKernels(2, 1, 11, rng);
    DeformableParams def;
    def.weights = RandomKernels(2, 3, 3, rng);
    def.offsets = Tensor3::Random(18, 7, 9, rng, -1.5, 1.5);
    double worst = 0.0;
    const auto check = [&](auto f) {
      worst = std::max(worst, MaxAbsDiff(f(xy), Combine(a, f(x), b, f(y))));
    };
    check([&](const Tensor3& t) { return DepthwiseConv2d(t, kernels); });
    check([&](const Tensor3& t) { return SeparablePair(t, sep); });
    check([&](const Tensor3& t) { return DeformableConvForward(t, def); });
    checks.push_back(AtMost("conv_linearity", worst, 1e-9));
  }

  {
    const Tensor3 x = Tensor3::Random(3, 5, 4, rng);
    const PointwiseProjectionOp op(3, 2);
    const auto params = RandomVector(op.ParameterCount(), rng);
    checks.push_back(AtMost("gradcheck_pointwise",
                            GradCheck(op, x, params).max_rel_error, 1e-7));
  }
  {
    const Tensor3 x = Tensor3::Random(2, 6, 5, rng);
    const DepthwiseConvOp op(2, 3, 5);
    const auto params = RandomVector(op.ParameterCount(), rng);
    checks.push_back(AtMost("gradcheck_depthwise",
                            GradCheck(op, x, params).max_rel_error, 1e-6));
  }
  {
    const Tensor3 x = Tensor3::Random(2, 6, 6, rng);
    const SeparablePairOp op(2, 7);
    const auto params = RandomVector(op.ParameterCount(), rng);
    checks.push_back(AtMost("gradcheck_separable",
                            GradCheck(op, x, params).max_rel_error, 1e-6));
  }
  {
    const Tensor3 x = Tensor3::Random(2, 4, 4, rng);
    const ElementwiseMultiplyOp op;
    const auto params = RandomVector(x.size(), rng);
    checks.push_back(AtMost("gradcheck_multiply",
                            GradCheck(op, x, params).max_rel_error, 1e-7));
  }
  {
    const Tensor3 x = Tensor3::Random(2, 6, 6, rng);
    const SpatialAttentionOp op(2);
    const auto params = RandomVector(op.ParameterCount(), rng);
    checks.push_back(AtMost("gradcheck_spatial_attention",
                            GradCheck(op, x, params).max_rel_error, 1e-4));
  }
  return checks;
}

}  // namespace tabstruct
