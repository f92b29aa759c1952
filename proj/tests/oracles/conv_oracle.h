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
#ifndef TABSTRUCT_TESTS_ORACLES_CONV_ORACLE_H_
#define TABSTRUCT_TESTS_ORACLES_CONV_ORACLE_H_

#include <vector>

#include "tabstruct/kernels.h"

namespace tabstruct::oracle {

// Copies the input into an explicitly zero-padded buffer, then runs a
// "valid" cross-correlation over it with plain nested loops.
inline Tensor3 PaddedConv(const Tensor3& x, const std::vector<Kernel2D>& k) {
  Tensor3 out(x.channels(), x.height(), x.width());
  for (int c = 0; c < x.channels(); ++c) {
    const int ph = k[c].height / 2;
    const int pw = k[c].width / 2;
    const int hp = x.height() + 2 * ph;
    const int wp = x.width() + 2 * pw;
    std::vector<double> padded(static_cast<std::size_t>(hp) * wp, 0.0);
    for (int i = 0; i < x.height(); ++i) {
      for (int j = 0; j < x.width(); ++j) {
        padded[static_cast<std::size_t>(i + ph) * wp + (j + pw)] = x.at(c, i, j);
      }
    }
    for (int i = 0; i < x.height(); ++i) {
      for (int j = 0; j < x.width(); ++j) {
        double sum = 0.0;
        for (int u = 0; u < k[c].height; ++u) {
          for (int v = 0; v < k[c].width; ++v) {
            sum += k[c].values[static_cast<std::size_t>(u) * k[c].width + v] *
                   padded[static_cast<std::size_t>(i + u) * wp + (j + v)];
          }
        }
        out.at(c, i, j) = sum;
      }
    }
  }
  return out;
}

// Outer product u * v^T of a k x 1 and a 1 x k kernel.
inline Kernel2D OuterProduct(const Kernel2D& u, const Kernel2D& v) {
  Kernel2D full(u.height, v.width);
  for (int a = 0; a < u.height; ++a) {
    for (int b = 0; b < v.width; ++b) full.at(a, b) = u.values[a] * v.values[b];
  }
  return full;
}

// 1 x 1 projection with explicit loops, bias included.
inline Tensor3 NaiveProjection(const Tensor3& x,
                               const std::vector<std::vector<double>>& w,
                               const std::vector<double>& bias) {
  Tensor3 out(static_cast<int>(w.size()), x.height(), x.width());
  for (std::size_t o = 0; o < w.size(); ++o) {
    for (int i = 0; i < x.height(); ++i) {
      for (int j = 0; j < x.width(); ++j) {
        double s = bias[o];
        for (int c = 0; c < x.channels(); ++c) s += w[o][c] * x.at(c, i, j);
        out.at(static_cast<int>(o), i, j) = s;
      }
    }
  }
  return out;
}

}  // namespace tabstruct::oracle

#endif  // TABSTRUCT_TESTS_ORACLES_CONV_ORACLE_H_
