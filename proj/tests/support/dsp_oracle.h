// Copyright 2026 The TTML Authors
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

#ifndef TTML_TESTS_SUPPORT_DSP_ORACLE_H_
#define TTML_TESTS_SUPPORT_DSP_ORACLE_H_

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <vector>

namespace ttml::testing {

// Direct O(N^2) DFT magnitude of x (zero-padded to n points) at bin k.
inline double DftMagnitude(const std::vector<double>& x, int k, int n) {
  std::complex<double> acc = 0.0;
  for (int i = 0; i < static_cast<int>(x.size()); ++i) {
    acc += x[i] * std::polar(1.0, -2 * std::numbers::pi * k * i / n);
  }
  return std::abs(acc);
}

// 400 samples from `start`, times a periodic Hann window.
inline std::vector<double> HannFrame(const std::vector<float>& x, size_t start) {
  std::vector<double> f(400);
  for (int i = 0; i < 400; ++i) f[i] = x[start + i] * (0.5 - 0.5 * std::cos(2 * std::numbers::pi * i / 400));
  return f;
}

}  // namespace ttml::testing

#endif  // TTML_TESTS_SUPPORT_DSP_ORACLE_H_
