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

#ifndef TTML_MODEL_FIXTURES_H_
#define TTML_MODEL_FIXTURES_H_

#include <cstdint>
#include <string_view>

#include "model/graph.h"

namespace ttml {

// Architecture-faithful graphs with seeded random (He-scaled) weights. They
// stand in for pretrained backbones wherever only shapes, sizes and a
// deterministic feature map matter. Real weights can be loaded into the same
// layout: conv kernels HWIO, depthwise (kh, kw, C, 1), dense (F, K).

// MobileNetV2 (width 1.0) without its classifier:
// (?, 224, 224, 3) -> (?, 7, 7, 1280).
ModelGraph MakeMobileNetV2Backbone(uint64_t seed);

// YAMNet-layout MobileNetV1 stack on (?, 96, 64, 1) log-mel patches giving
// (?, 3, 2, 1024). With include_top, three trailing prediction layers
// (global_average_pool, dense to 521 scores, sigmoid) are appended.
ModelGraph MakeYamnetFixture(uint64_t seed, bool include_top);

// Small weight-dominated classifier with >10^6 parameters:
// (?, 16, 16, 8) -> conv -> flatten -> dense 16384x64 -> dense 64x10 -> softmax.
ModelGraph MakeDenseClassifierFixture(uint64_t seed);

// Cheap stand-ins with the image or audio input shape:
// (?, 224, 224, 3) -> (?, 14, 14, 64) and (?, 96, 64, 1) -> (?, 12, 8, 64).
ModelGraph MakeTinyBackbone(uint64_t seed, bool audio);

// Dispatches on "mobilenet_v2", "yamnet", "yamnet_top", "dense_classifier",
// "tiny_image" or "tiny_audio".
ModelGraph MakeFixture(std::string_view kind, uint64_t seed);

}  // namespace ttml

#endif  // TTML_MODEL_FIXTURES_H_
