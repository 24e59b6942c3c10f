#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "tsrlab/arch.hpp"

using namespace tsrlab;

namespace {

EncoderSpec single_conv(int k, int s, int p, int input) {
  EncoderSpec e;
  e.name = "conv";
  e.input_h = e.input_w = input;
  e.layers.push_back(LayerSpec::conv(k, s, p, 3, 8));
  return e;
}

bool within(double value, double target, double rel) {
  return std::abs(value - target) <= rel * target;
}

}  // namespace

TEST(Geometry, SingleConvTrace) {
  const auto trace = trace_geometry(single_conv(3, 2, 1, 448));
  ASSERT_EQ(trace.size(), 1u);
  EXPECT_EQ(trace[0].rf, 3);
  EXPECT_EQ(trace[0].jump, 2);
  EXPECT_EQ(trace[0].out_h, 224);
  EXPECT_EQ(trace[0].out_w, 224);
}

TEST(Geometry, PatchifyReceptiveFieldEqualsPatch) {
  EncoderSpec e;
  e.input_h = e.input_w = 448;
  e.layers.push_back(LayerSpec::patchify(28, 3, 512));
  const auto g = final_geometry(e);
  EXPECT_EQ(g.rf, 28);
  EXPECT_EQ(g.out_h, 16);
  EXPECT_EQ(g.out_w, 16);
}

TEST(Geometry, ResnetReceptiveFields) {
  EXPECT_EQ(receptive_field(preset("resnet18").encoder), 435);
  EXPECT_EQ(receptive_field(preset("resnet34").encoder), 899);
  EXPECT_EQ(receptive_field(preset("resnet50").encoder), 427);
}

TEST(Geometry, RfRatios) {
  EXPECT_DOUBLE_EQ(rf_ratio(preset("resnet18").encoder), 97.10);
  EXPECT_DOUBLE_EQ(rf_ratio(preset("resnet34").encoder), 100.00);
  EXPECT_DOUBLE_EQ(rf_ratio(preset("resnet50").encoder), 95.31);
  EXPECT_DOUBLE_EQ(rf_ratio(preset("linearproj-14").encoder), 3.13);
  EXPECT_DOUBLE_EQ(rf_ratio(preset("linearproj-16").encoder), 3.57);
  EXPECT_DOUBLE_EQ(rf_ratio(preset("linearproj-28").encoder), 6.25);
  EXPECT_DOUBLE_EQ(rf_ratio(preset("linearproj-56").encoder), 12.50);
  EXPECT_DOUBLE_EQ(rf_ratio(preset("linearproj-112").encoder), 25.00);
  EXPECT_DOUBLE_EQ(rf_ratio(preset("convstem-r1").encoder), 6.92);
}

TEST(Geometry, SequenceLengths) {
  EXPECT_EQ(sequence_length(preset("resnet18").encoder), 784);
  EXPECT_EQ(sequence_length(preset("resnet34").encoder), 784);
  EXPECT_EQ(sequence_length(preset("resnet50").encoder), 784);
  EXPECT_EQ(sequence_length(preset("linearproj-14").encoder), 1024);
  EXPECT_EQ(sequence_length(preset("linearproj-16").encoder), 784);
  EXPECT_EQ(sequence_length(preset("linearproj-28").encoder), 256);
  EXPECT_EQ(sequence_length(preset("linearproj-56").encoder), 64);
  EXPECT_EQ(sequence_length(preset("linearproj-112").encoder), 16);
  EXPECT_EQ(sequence_length(preset("convstem").encoder), 729);
  EXPECT_EQ(sequence_length(preset("convstem-n3").encoder), 900);
}

TEST(Geometry, DegenerateOutputIsRejected) {
  EXPECT_THROW(trace_geometry(single_conv(9, 1, 0, 4)), Error);
}

TEST(Geometry, RfMonotoneAndJumpIsStrideProduct) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    EncoderSpec e;
    e.input_h = e.input_w = 128;
    const int depth = 1 + static_cast<int>(rng() % 5);
    long long stride_product = 1;
    long long prev_rf = 1;
    for (int i = 0; i < depth; ++i) {
      const int k = 1 + static_cast<int>(rng() % 5);
      const int s = 1 + static_cast<int>(rng() % 2);
      e.layers.push_back(LayerSpec::conv(k, s, k / 2, 3, 3));
      stride_product *= s;
      const auto g = final_geometry(e);
      EXPECT_GE(g.rf, prev_rf);
      EXPECT_EQ(g.jump, stride_product);
      prev_rf = g.rf;
    }
  }
}

TEST(Geometry, PatchifyOnlyStacksAreExact) {
  for (int patch : {14, 16, 28, 56, 112}) {
    EncoderSpec e;
    e.input_h = e.input_w = 448;
    e.layers.push_back(LayerSpec::patchify(patch, 3, 512));
    EXPECT_EQ(receptive_field(e), patch);
    EXPECT_EQ(sequence_length(e), static_cast<long long>(448 / patch) * (448 / patch));
  }
}

TEST(Params, PatchifyStageClosedForm) {
  // 28*28*3*512 weights + 512 biases
  const auto b = param_breakdown(preset("linearproj-28"));
  EXPECT_EQ(b.visual_encoder, 1204736);
}

TEST(Params, TransformerStageClosedForms) {
  const auto b = param_breakdown(preset("linearproj-28"));
  EXPECT_EQ(b.transformer_encoder, 4 * 2102784);
  EXPECT_EQ(b.transformer_decoder, 4 * 3154432);
  EXPECT_EQ(b.embedding, 32 * 512);
  EXPECT_EQ(b.head, 512 * 32 + 32);
  EXPECT_EQ(b.total(), 22266400);
}

TEST(Params, FullModelTotalsTrackReference) {
  EXPECT_TRUE(within(static_cast<double>(param_count(preset("resnet18"))), 28.70e6, 0.05));
  EXPECT_TRUE(within(static_cast<double>(param_count(preset("linearproj-28"))), 22.67e6, 0.05));
  EXPECT_TRUE(within(static_cast<double>(param_count(preset("convstem"))), 24.08e6, 0.05));
  EXPECT_TRUE(within(static_cast<double>(param_count(preset("resnet34"))), 38.80e6, 0.05));
  EXPECT_TRUE(within(static_cast<double>(param_count(preset("resnet50"))), 41.81e6, 0.05));
  EXPECT_TRUE(within(static_cast<double>(param_count(preset("convstem-r1"))), 22.53e6, 0.05));
  EXPECT_TRUE(within(static_cast<double>(param_count(preset("convstem-r3"))), 22.14e6, 0.05));
}

TEST(Macs, HandComputableConvCase) {
  FullModelSpec m;
  m.encoder = single_conv(3, 1, 1, 4);
  m.n_encoder_layers = 0;
  m.n_decoder_layers = 0;
  const auto b = mac_breakdown(m);
  EXPECT_EQ(b.visual_encoder, 3456);  // 9 * 3 * 8 * 16
}

TEST(Macs, LinearProjFamilyDecreasesWithPatchSize) {
  const long long m14 = mac_count(preset("linearproj-14"));
  const long long m16 = mac_count(preset("linearproj-16"));
  const long long m28 = mac_count(preset("linearproj-28"));
  const long long m56 = mac_count(preset("linearproj-56"));
  const long long m112 = mac_count(preset("linearproj-112"));
  EXPECT_GT(m14, m16);
  EXPECT_GT(m16, m28);
  EXPECT_GT(m28, m56);
  EXPECT_GT(m56, m112);
  // reference magnitudes from the counting convention
  EXPECT_TRUE(within(static_cast<double>(m14), 24.03e9, 0.02));
  EXPECT_TRUE(within(static_cast<double>(m28), 10.28e9, 0.02));
  EXPECT_TRUE(within(static_cast<double>(m112), 6.98e9, 0.02));
  EXPECT_TRUE(within(static_cast<double>(mac_count(preset("convstem"))), 22.36e9, 0.02));
  EXPECT_EQ(m28, 10248781824LL);
}

TEST(Presets, UnknownNameThrows) {
  EXPECT_THROW(preset("resnet101"), Error);
  EXPECT_THROW(preset("linearproj-13"), Error);
}

TEST(Presets, ConvStemShape) {
  const FullModelSpec m = preset("convstem");
  int stride2 = 0, pointwise = 0;
  for (const auto& l : m.encoder.layers) {
    if (l.kind == LayerKind::Conv && l.stride == 2) {
      ++stride2;
      EXPECT_EQ(l.kernel, 5);
    }
    if (l.kind == LayerKind::Conv && l.kernel == 1) {
      ++pointwise;
      EXPECT_EQ(l.out_channels, 512);
    }
  }
  EXPECT_EQ(stride2, 4);
  EXPECT_EQ(pointwise, 1);
  EXPECT_EQ(m.n_encoder_layers, 4);
  const AnalysisReport r = report(m);
  EXPECT_EQ(r.n_conv, 5);
  ASSERT_TRUE(r.kernel.has_value());
  EXPECT_EQ(*r.kernel, 5);
}

TEST(Presets, ResnetShape) {
  const FullModelSpec m = preset("resnet18");
  EXPECT_EQ(m.n_encoder_layers, 2);
  EXPECT_EQ(m.n_decoder_layers, 4);
  const AnalysisReport r = report(m);
  EXPECT_EQ(r.n_conv, 17);
  EXPECT_FALSE(r.kernel.has_value());  // mixed 7x7 / 3x3
  EXPECT_EQ(report(preset("resnet34")).n_conv, 33);
  EXPECT_EQ(report(preset("resnet50")).n_conv, 49);
}

TEST(Presets, InputSizeOverrideScalesSequenceLength) {
  EXPECT_EQ(sequence_length(preset("convstem", 448).encoder), 784);
  EXPECT_EQ(sequence_length(preset("resnet18", 896).encoder), 3136);
}

TEST(Report, LinearProj28Row) {
  const AnalysisReport r = report(preset("linearproj-28"));
  ASSERT_TRUE(r.kernel.has_value());
  EXPECT_EQ(*r.kernel, 28);
  EXPECT_DOUBLE_EQ(r.rf_ratio, 6.25);
  EXPECT_EQ(r.seq_len, 256);
  EXPECT_EQ(r.n_conv, 1);
  EXPECT_EQ(r.flops, 2 * r.macs);
}

TEST(Report, Resnet34Row) {
  const AnalysisReport r = report(preset("resnet34"));
  EXPECT_EQ(r.n_conv, 33);
  EXPECT_DOUBLE_EQ(r.rf_ratio, 100.00);
  EXPECT_EQ(r.seq_len, 784);
}

TEST(Report, IdentityEncoderRow) {
  FullModelSpec m;
  m.encoder.name = "identity";
  m.encoder.input_h = m.encoder.input_w = 32;
  m.encoder.layers.push_back(LayerSpec::identity());
  m.n_encoder_layers = 0;
  m.n_decoder_layers = 0;
  const AnalysisReport r = report(m);
  EXPECT_EQ(r.n_conv, 0);
  EXPECT_EQ(r.rf, 1);
  EXPECT_EQ(r.seq_len, 32 * 32);
  EXPECT_FALSE(r.kernel.has_value());
}
