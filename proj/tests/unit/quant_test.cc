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

#include <filesystem>

#include "common/error.h"
#include "common/format.h"
#include "gtest/gtest.h"
#include "model/fixtures.h"
#include "model/model_io.h"
#include "quant/quantizer.h"
#include "support/test_util.h"

namespace ttml {
namespace {

using testing::RandomTensor;
using testing::TempDir;

TEST(QuantizeBlobTest, WorkedExample) {
  Tensor q = QuantizeBlob(Tensor::FromData({3}, {0.5f, -1.0f, 1.27f}));
  EXPECT_NEAR(q.scale(), 0.01f, 1e-9);
  EXPECT_EQ(std::vector<int8_t>(q.qdata().begin(), q.qdata().end()),
            (std::vector<int8_t>{50, -100, 127}));
  EXPECT_EQ(q.zero_point(), 0);
}

TEST(QuantizeBlobTest, AllZeroTensorUsesUnitScale) {
  Tensor q = QuantizeBlob(Tensor::Zeros({4}));
  EXPECT_EQ(q.scale(), 1.0f);
  for (int8_t v : q.qdata()) EXPECT_EQ(v, 0);
}

TEST(QuantizeBlobTest, RoundsHalfAwayFromZero) {
  // scale = 1.27 / 127 = 0.01; 0.005 / 0.01 = 0.5 -> 1, -0.005 -> -1
  Tensor q = QuantizeBlob(Tensor::FromData({3}, {1.27f, 0.125f, -0.125f}));
  const float s = q.scale();
  EXPECT_EQ(q.qdata()[1], static_cast<int8_t>(std::round(0.125f / s)));
  EXPECT_EQ(q.qdata()[2], -q.qdata()[1]);
}

TEST(DequantizeTest, WorkedExample) {
  Tensor w = DequantizeBlob(Tensor::Quantized({3}, {50, -100, 127}, 0.01f));
  EXPECT_NEAR(w.data()[0], 0.5f, 1e-6);
  EXPECT_NEAR(w.data()[1], -1.0f, 1e-6);
  EXPECT_NEAR(w.data()[2], 1.27f, 1e-6);
  Tensor z = DequantizeBlob(Tensor::Quantized({2}, {0, 0}, 0.3f));
  EXPECT_EQ(z, Tensor::Zeros({2}));
}

TEST(DequantizeTest, RoundTripErrorWithinHalfStep) {
  Rng rng(1);
  for (int trial = 0; trial < 100; ++trial) {
    const double range = rng.Uniform(1e-3, 10.0);
    Tensor w = RandomTensor({1 + static_cast<int64_t>(rng.UniformInt(300))}, rng, -range, range);
    Tensor q = QuantizeBlob(w);
    Tensor back = DequantizeBlob(q);
    for (size_t i = 0; i < w.data().size(); ++i) {
      ASSERT_LE(std::fabs(back.data()[i] - w.data()[i]), q.scale() / 2 * (1 + 1e-6))
          << "trial " << trial << " i " << i;
      ASSERT_GE(q.qdata()[i], -127);
    }
  }
}

TEST(DequantizeTest, ExactErrorNeverExceedsHalfStep) {
  // Values near a rounding boundary must land on the nearer level.
  Rng rng(3);
  Tensor w = RandomTensor({1 << 20}, rng, -0.05, 0.05);
  Tensor q = QuantizeBlob(w);
  const double half = q.scale() / 2.0;
  for (size_t i = 0; i < w.data().size(); ++i) {
    ASSERT_LE(std::fabs(static_cast<double>(q.scale()) * q.qdata()[i] - w.data()[i]), half) << i;
  }
}

TEST(DequantizeTest, RequantizingDequantizedWeightsIsStable) {
  Rng rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    Tensor q = QuantizeBlob(RandomTensor({64}, rng, -2.0, 2.0));
    Tensor again = QuantizeBlob(DequantizeBlob(q));
    EXPECT_TRUE(std::equal(q.qdata().begin(), q.qdata().end(), again.qdata().begin()));
  }
}

TEST(QuantizeModelTest, KernelsQuantizedBiasesKept) {
  ModelGraph g = MakeDenseClassifierFixture(3);
  ModelGraph q = QuantizeModel(g);
  for (const GraphNode& n : q.nodes) {
    if (n.weight_refs.empty()) continue;
    EXPECT_TRUE(q.weights.at(n.weight_refs[0]).is_quantized());
    EXPECT_FALSE(q.weights.at(n.weight_refs[1]).is_quantized());
  }
  EXPECT_EQ(Validate(q), Validate(g));
  EXPECT_EQ(q.metadata.at(std::string(meta::kQuantization)), kQuantizationScheme);
}

TEST(QuantizeModelTest, SecondPassIsRejected) {
  ModelGraph q = QuantizeModel(MakeDenseClassifierFixture(3));
  try {
    QuantizeModel(q);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kAlreadyQuantized);
  }
}

TEST(SizeReportTest, TableTwoMobileNetFigures) {
  EXPECT_EQ(FormatPercent(SizeReduction(8'900'000, 2'300'000)), "74.2%");
  EXPECT_EQ(SizeReduction(1234, 1234), 0.0);
}

TEST(SizeReportTest, WeightDominatedFixtureShrinksAboutThreeQuarters) {
  TempDir dir("size");
  ModelGraph g = MakeDenseClassifierFixture(4);
  int64_t params = 0;
  for (const auto& [id, t] : g.weights) params += t.size();
  ASSERT_GE(params, 1'000'000);
  SaveModel(g, dir / "f.ttml");
  SaveModel(QuantizeModel(g), dir / "q.ttml");
  SizeReport r = MakeSizeReport(dir / "f.ttml", dir / "q.ttml");
  EXPECT_GE(r.reduction, 0.70);
  EXPECT_LE(r.reduction, 0.78);
  EXPECT_EQ(r.before_bytes, std::filesystem::file_size(dir / "f.ttml"));
  EXPECT_NE(r.ToTable().find("reduction"), std::string::npos);
}

TEST(SizeReportTest, MissingFileIsIoError) {
  try {
    MakeSizeReport("/nonexistent/a.ttml", "/nonexistent/b.ttml");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIoError);
  }
}

}  // namespace
}  // namespace ttml
