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

#ifndef TTML_AUDIO_FFT_H_
#define TTML_AUDIO_FFT_H_

#include <complex>
#include <span>

namespace ttml {

// In-place iterative radix-2 FFT (forward, unnormalized). The length must
// be a power of two.
void Fft(std::span<std::complex<double>> data);

}  // namespace ttml

#endif  // TTML_AUDIO_FFT_H_
