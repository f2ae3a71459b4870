// Copyright 2026 The MRP Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <filesystem>
#include <numeric>
#include <vector>

#include "gtest/gtest.h"
#include "mrp/corpus/vocabulary.h"
#include "mrp/encoder/checkpoint.h"
#include "mrp/encoder/classifier.h"
#include "mrp/encoder/model.h"
#include "mrp/errors.h"
#include "mrp/numcore/grad_check.h"
#include "testing/reference_encoder.h"

namespace mrp::encoder {
namespace {

using corpus::Vocabulary;
using numcore::Matrix;
using R = RationaleInput;

ModelConfig SmallConfig() {
  ModelConfig c;
  c.vocab_size = 20;
  c.d_model = 8;
  c.n_layers = 1;
  c.n_heads = 2;
  c.ff_dim = 16;
  c.max_len = 10;
  return c;
}

template <typename T>
EncoderModel<T> MakeModel(ModelConfig c = SmallConfig(), uint64_t seed = 7) {
  EncoderModel<T> m(c);
  m.initialize(Rng(seed));
  return m;
}

// Larger weights so that attention is far from uniform in the tests that
// compare against the reference.
template <typename T>
void Inflate(EncoderModel<T>& m, double factor) {
  for (auto* p : m.parameters()) {
    if (p->name.ends_with("gain")) continue;
    for (auto& v : p->value.values()) v = static_cast<T>(v * factor);
  }
}

std::vector<int> Ids() { return {0, 7, 9, 11, 5, 1}; }

TEST(ModelConfig, Validate) {
  ModelConfig c = SmallConfig();
  EXPECT_NO_THROW(c.validate());
  c.n_heads = 3;
  EXPECT_THROW(c.validate(), InputError);
  c = SmallConfig();
  c.max_len = 2;
  EXPECT_THROW(c.validate(), InputError);
}

TEST(ModelConfig, JsonRoundTrip) {
  ModelConfig c = SmallConfig();
  c.dropout_rate = 0.1;
  c.mlm_head = true;
  EXPECT_EQ(ModelConfig::from_json(c.to_json()), c);
}

TEST(Embed, AbsentRationalesIsTokenPlusPosition) {
  const auto m = MakeModel<float>();
  const auto ids = Ids();
  const Matrix h = m.embed(ids);
  for (int i = 0; i < h.rows(); ++i) {
    for (int c = 0; c < h.cols(); ++c) {
      EXPECT_EQ(h(i, c), m.token_embedding.value(ids[i], c) +
                             m.position_embedding.value(i, c));
    }
  }
}

TEST(Embed, AllMaskedEqualsAbsentBitwise) {
  const auto m = MakeModel<float>();
  const auto ids = Ids();
  const std::vector<R> masked(ids.size(), R::kMasked);
  EXPECT_EQ(m.embed(ids, masked), m.embed(ids));
}

TEST(Embed, FlippingOneBitChangesOneRow) {
  const auto m = MakeModel<float>();
  const auto ids = Ids();
  std::vector<R> r = {R::kZero, R::kZero, R::kZero, R::kZero, R::kZero,
                      R::kZero};
  const Matrix a = m.embed(ids, r);
  r[2] = R::kOne;
  const Matrix b = m.embed(ids, r);
  for (int i = 0; i < a.rows(); ++i) {
    bool same = true;
    for (int c = 0; c < a.cols(); ++c) same = same && a(i, c) == b(i, c);
    EXPECT_EQ(same, i != 2) << "row " << i;
  }
}

TEST(Embed, SpecialPositionsIgnoreRationale) {
  const auto m = MakeModel<float>();
  const std::vector<int> ids = {0, 7, 1, 2};
  const std::vector<R> ones(ids.size(), R::kOne);
  const Matrix a = m.embed(ids, ones);
  const Matrix b = m.embed(ids);
  for (int i : {0, 2, 3}) {
    for (int c = 0; c < a.cols(); ++c) EXPECT_EQ(a(i, c), b(i, c));
  }
}

TEST(Embed, Errors) {
  const auto m = MakeModel<float>();
  const auto ids = Ids();
  const std::vector<R> short_r(3, R::kZero);
  EXPECT_THROW(m.embed(ids, short_r), InputError);
  const std::vector<int> bad = {0, 99, 1};
  EXPECT_THROW(m.embed(bad), InputError);
  const std::vector<int> too_long(11, 5);
  EXPECT_THROW(m.embed(too_long), InputError);
}

TEST(Forward, AttentionRowsAreDistributions) {
  auto m = MakeModel<float>();
  Inflate(m, 20.0);
  const auto ids = Ids();
  const auto tr = m.forward(m.embed(ids), 6);
  for (const auto& layer : tr.attention) {
    for (const auto& p : layer) {
      ASSERT_EQ(p.rows(), 6);
      ASSERT_EQ(p.cols(), 6);
      for (int i = 0; i < 6; ++i) {
        double s = 0;
        for (int j = 0; j < 6; ++j) s += p(i, j);
        EXPECT_NEAR(s, 1.0, 1e-5);
      }
    }
  }
}

TEST(Forward, RejectsBadRealLen) {
  const auto m = MakeModel<float>();
  const auto h = m.embed(Ids());
  EXPECT_THROW(m.forward(h, 1), InputError);
  EXPECT_THROW(m.forward(h, 7), InputError);
}

TEST(Forward, MatchesReferenceWithPaddedKeysMasked) {
  ModelConfig c = SmallConfig();
  c.n_layers = 2;
  auto m = MakeModel<double>(c);
  Inflate(m, 25.0);
  const std::vector<int> ids = {0, 7, 9, 11, 1, 2, 2, 2};
  const std::vector<R> r = {R::kZero, R::kOne,  R::kMasked, R::kZero,
                            R::kZero, R::kZero, R::kZero,   R::kZero};
  const int real_len = 5;
  const auto tr = m.forward(m.embed(ids, r), real_len);
  const auto ref = testing::reference_forward(m, ids, real_len, r);
  for (int i = 0; i < real_len; ++i) {
    for (int k = 0; k < c.d_model; ++k) {
      EXPECT_NEAR(tr.output(i, k), ref.output[i][k], 1e-10);
    }
  }
  const auto logits = m.class_logits(tr);
  for (int k = 0; k < 3; ++k) {
    EXPECT_NEAR(logits(0, k), ref.class_logits[k], 1e-10);
  }
  const auto rl = m.rationale_logits(tr);
  for (int i = 0; i < real_len; ++i) {
    for (int k = 0; k < 2; ++k) {
      EXPECT_NEAR(rl(i, k), ref.rationale_logits[i][k], 1e-10);
    }
  }
  // The reference computes over all 8 positions; padded keys get weight 0.
  for (int h = 0; h < c.n_heads; ++h) {
    for (int i = 0; i < real_len; ++i) {
      for (int j = real_len; j < 8; ++j) {
        EXPECT_EQ(ref.last_attn[h][i][j], 0.0);
      }
      for (int j = 0; j < real_len; ++j) {
        EXPECT_NEAR(tr.attention.back()[h](i, j), ref.last_attn[h][i][j],
                    1e-10);
      }
    }
  }
}

TEST(Forward, FloatTracksDouble) {
  auto m = MakeModel<double>();
  Inflate(m, 10.0);
  const auto mf = m.cast<float>();
  const auto ids = Ids();
  const auto a = m.class_logits(m.forward(m.embed(ids), 6));
  const auto b = mf.class_logits(mf.forward(mf.embed(ids), 6));
  for (int k = 0; k < 3; ++k) EXPECT_NEAR(a(0, k), b(0, k), 1e-4);
}

TEST(Forward, PadContentIsIrrelevant) {
  const auto m = MakeModel<float>();
  const std::vector<int> a = {0, 7, 9, 1, 2, 2, 2};
  const std::vector<int> b = {0, 7, 9, 1, 2, 13, 4};
  const auto la = m.class_logits(m.forward(m.embed(a), 4));
  const auto lb = m.class_logits(m.forward(m.embed(b), 4));
  EXPECT_EQ(la, lb);
}

TEST(Forward, Deterministic) {
  const auto m = MakeModel<float>();
  const auto ids = Ids();
  EXPECT_EQ(m.forward(m.embed(ids), 6).output,
            m.forward(m.embed(ids), 6).output);
}

TEST(Forward, DropoutOnlyWithRng) {
  ModelConfig c = SmallConfig();
  c.dropout_rate = 0.5;
  const auto m = MakeModel<float>(c);
  const auto ids = Ids();
  const auto h0 = m.embed(ids);
  const auto plain = m.forward(h0, 6).output;
  Rng r1(3), r2(3);
  const auto d1 = m.forward(h0, 6, &r1).output;
  const auto d2 = m.forward(h0, 6, &r2).output;
  EXPECT_EQ(d1, d2);
  EXPECT_NE(d1, plain);
}

TEST(Heads, RationaleShapeAndPositionWise) {
  const auto m = MakeModel<float>();
  for (int n : {2, 5, 9}) {
    std::vector<int> ids(n, 6);
    ids.front() = Vocabulary::kCls;
    ids.back() = Vocabulary::kSep;
    const auto tr = m.forward(m.embed(ids), n);
    const auto rl = m.rationale_logits(tr);
    EXPECT_EQ(rl.rows(), n);
    EXPECT_EQ(rl.cols(), 2);
  }
  ForwardTrace<float> tr;
  tr.real_len = 3;
  tr.output = Matrix(3, 8, 0.25f);
  const auto rl = m.rationale_logits(tr);
  EXPECT_EQ(rl(0, 0), rl(2, 0));
  EXPECT_EQ(rl(1, 1), rl(2, 1));
}

TEST(Heads, ClassDependsOnlyOnCls) {
  const auto m = MakeModel<float>();
  ForwardTrace<float> tr;
  tr.real_len = 4;
  tr.output = Matrix(4, 8, 0.5f);
  const auto a = m.class_logits(tr);
  for (int i = 1; i < 4; ++i) tr.output(i, 3) = -9.0f;
  EXPECT_EQ(m.class_logits(tr), a);
  tr.output(0, 3) = -9.0f;
  EXPECT_NE(m.class_logits(tr), a);
}

TEST(Heads, ZeroClassWeightsGiveUniform) {
  auto m = MakeModel<float>();
  m.class_w.value.set_zero();
  const auto p = EncoderClassifier(m).class_probs(Ids(), 6);
  for (double v : p) EXPECT_NEAR(v, 1.0 / 3.0, 1e-7);
}

TEST(Heads, MlmRequiresHead) {
  const auto m = MakeModel<float>();
  const auto tr = m.forward(m.embed(Ids()), 6);
  EXPECT_THROW(m.mlm_logits(tr), InputError);
  ModelConfig c = SmallConfig();
  c.mlm_head = true;
  const auto mm = MakeModel<float>(c);
  const auto t2 = mm.forward(mm.embed(Ids()), 6);
  EXPECT_EQ(mm.mlm_logits(t2).cols(), c.vocab_size);
}

TEST(Attention, HeadMeanMatchesHandRecomputation) {
  auto m = MakeModel<double>();
  Inflate(m, 30.0);
  const auto ids = Ids();
  const auto tr = m.forward(m.embed(ids), 6);
  const auto ref = testing::reference_forward(m, ids, 6, {});
  const auto mean = last_layer_cls_attention(tr);
  const auto mx = last_layer_cls_attention(tr, true);
  for (int j = 0; j < 6; ++j) {
    const double h0 = ref.last_attn[0][0][j];
    const double h1 = ref.last_attn[1][0][j];
    EXPECT_NEAR(mean[j], (h0 + h1) / 2.0, 1e-12);
    EXPECT_NEAR(mx[j], std::max(h0, h1), 1e-12);
  }
}

TEST(Init, ShapesAndStatistics) {
  ModelConfig c = SmallConfig();
  c.d_model = 32;
  c.n_heads = 4;
  c.ff_dim = 64;
  c.vocab_size = 300;
  const auto m = MakeModel<double>(c);
  double sum = 0, sq = 0;
  int n = 0;
  for (double v : m.token_embedding.value.values()) {
    sum += v;
    sq += v * v;
    ++n;
  }
  EXPECT_NEAR(sum / n, 0.0, 0.002);
  EXPECT_NEAR(std::sqrt(sq / n), 0.02, 0.002);
  for (double v : m.blocks[0].ln1_gain.value.values()) EXPECT_EQ(v, 1.0);
  for (double v : m.blocks[0].bq.value.values()) EXPECT_EQ(v, 0.0);
  for (double v : m.class_b.value.values()) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(m.rationale_embedding.value.rows(), 2);
  EXPECT_EQ(m.class_w.value.cols(), 3);
}

TEST(Init, SameSeedSameWeightsDifferentSeedDiffers) {
  EXPECT_EQ(MakeModel<float>().token_embedding.value,
            MakeModel<float>().token_embedding.value);
  EXPECT_NE(MakeModel<float>(SmallConfig(), 1).token_embedding.value,
            MakeModel<float>(SmallConfig(), 2).token_embedding.value);
}

TEST(Init, ReinitializeTouchesOnlyClassHead) {
  auto m = MakeModel<float>();
  const auto before = m.cast<float>();
  m.reinitialize_class_head(Rng(7));
  auto now = m.parameters();
  auto old = before.parameters();
  for (size_t i = 0; i < now.size(); ++i) {
    const bool head = now[i]->name.starts_with("class_head.");
    if (head && now[i]->name != "class_head.b") {
      EXPECT_NE(now[i]->value, old[i]->value) << now[i]->name;
    } else {
      EXPECT_EQ(now[i]->value, old[i]->value) << now[i]->name;
    }
  }
}

TEST(Init, ManifestOrderIsStable) {
  const auto m = MakeModel<float>();
  const auto ps = m.parameters();
  EXPECT_EQ(ps.front()->name, "embed.token");
  EXPECT_EQ(ps[3]->name, "layer0.ln1.gain");
  EXPECT_EQ(ps.back()->name, "class_head.b");
}

// ---- gradients (double, d=8, 1 layer, 2 heads, 8 positions) ----

struct GradFixture {
  EncoderModel<double> model = MakeModel<double>();
  std::vector<int> ids = {0, 7, 9, 11, 5, 13, 6, 1};
  std::vector<R> rationale = {R::kZero, R::kOne,   R::kMasked, R::kZero,
                              R::kMasked, R::kOne, R::kMasked, R::kZero};
  std::vector<int> bits = {0, 1, 1, 0, 0, 1, 0, 0};
  std::vector<uint8_t> loss_mask = {0, 0, 1, 0, 1, 0, 1, 0};

  GradFixture() { Inflate(model, 10.0); }

  double RationaleLoss() {
    model.zero_grad();
    const auto h0 = model.embed(ids, rationale);
    const auto tr = model.forward(h0, 8);
    auto ce = numcore::cross_entropy(model.rationale_logits(tr),
                                     std::span<const int>(bits), loss_mask);
    const auto d_out = model.rationale_head_backward(tr, ce.dlogits);
    model.embed_backward(ids, rationale, model.backward(tr, d_out));
    return ce.loss;
  }

  double ClassLoss() {
    model.zero_grad();
    const auto h0 = model.embed(ids);
    const auto tr = model.forward(h0, 8);
    const std::vector<int> target = {2};
    const std::vector<uint8_t> one = {1};
    auto ce = numcore::cross_entropy(model.class_logits(tr),
                                     std::span<const int>(target), one);
    const auto d_out = model.class_head_backward(tr, ce.dlogits);
    model.embed_backward(ids, {}, model.backward(tr, d_out));
    return ce.loss;
  }
};

numcore::GradCheckOptions FineOptions() {
  numcore::GradCheckOptions o;
  o.eps = 1e-5;
  o.samples_per_param = 100;
  o.denominator_floor = 1e-6;
  return o;
}

TEST(Gradients, RationalePathMatchesFiniteDifferences) {
  GradFixture f;
  auto params = f.model.parameters();
  Rng rng(11);
  const auto report = numcore::grad_check<double>(
      [&] { return f.RationaleLoss(); }, params, rng, FineOptions());
  EXPECT_LT(report.max_rel_error, 1e-4);
  EXPECT_GT(report.coords_checked, 800);
}

TEST(Gradients, ClassPathMatchesFiniteDifferences) {
  GradFixture f;
  auto params = f.model.parameters();
  Rng rng(12);
  const auto report = numcore::grad_check<double>(
      [&] { return f.ClassLoss(); }, params, rng, FineOptions());
  EXPECT_LT(report.max_rel_error, 1e-4);
}

TEST(Gradients, UnmaskedPositionsGetZeroHeadInputGradient) {
  GradFixture f;
  const auto tr = f.model.forward(f.model.embed(f.ids, f.rationale), 8);
  auto ce = numcore::cross_entropy(f.model.rationale_logits(tr),
                                   std::span<const int>(f.bits), f.loss_mask);
  const auto d_out = f.model.rationale_head_backward(tr, ce.dlogits);
  for (int i = 0; i < 8; ++i) {
    if (f.loss_mask[i]) continue;
    for (int c = 0; c < 8; ++c) EXPECT_EQ(d_out(i, c), 0.0);
  }
}

TEST(Gradients, DropoutPathMatchesFiniteDifferences) {
  ModelConfig c = SmallConfig();
  c.dropout_rate = 0.3;
  GradFixture f;
  f.model = MakeModel<double>(c);
  Inflate(f.model, 10.0);
  auto loss = [&] {
    f.model.zero_grad();
    Rng drop(99);
    const auto tr = f.model.forward(f.model.embed(f.ids, f.rationale), 8,
                                    &drop);
    auto ce = numcore::cross_entropy(f.model.rationale_logits(tr),
                                     std::span<const int>(f.bits),
                                     f.loss_mask);
    const auto d_out = f.model.rationale_head_backward(tr, ce.dlogits);
    f.model.embed_backward(f.ids, f.rationale, f.model.backward(tr, d_out));
    return ce.loss;
  };
  auto params = f.model.parameters();
  Rng rng(13);
  EXPECT_LT(numcore::grad_check<double>(loss, params, rng, FineOptions())
                .max_rel_error,
            1e-4);
}

// ---- checkpoints ----

TEST(Checkpoint, RoundTripIsBitwise) {
  ModelConfig c = SmallConfig();
  c.mlm_head = true;
  const auto m = MakeModel<float>(c);
  CheckpointHeader h;
  h.config = c;
  h.stage = "mrp";
  h.seed = 42;
  h.epoch = 3;
  h.metrics = {{"loss", 0.5}};
  h.run_config = {{"seed", 42}};
  const std::string a = serialize_checkpoint(h, m);
  ASSERT_EQ(a.substr(0, 8), "MRPCKPT1");
  const Checkpoint ck = deserialize_checkpoint(a);
  EXPECT_EQ(ck.header.stage, "mrp");
  EXPECT_EQ(ck.header.seed, 42u);
  EXPECT_EQ(ck.header.epoch, 3);
  EXPECT_EQ(ck.header.config, c);
  EXPECT_EQ(serialize_checkpoint(ck.header, ck.model), a);
}

TEST(Checkpoint, FileRoundTrip) {
  const auto m = MakeModel<float>();
  CheckpointHeader h;
  h.config = m.config();
  h.stage = "detect";
  const auto path = std::filesystem::temp_directory_path() / "mrp_enc.ckpt";
  save_checkpoint(path, h, m);
  const auto ck = load_checkpoint(path);
  EXPECT_EQ(ck.model.token_embedding.value, m.token_embedding.value);
  EXPECT_EQ(ck.model.class_w.value, m.class_w.value);
  std::filesystem::remove(path);
}

TEST(Checkpoint, RejectsCorruptInput) {
  const auto m = MakeModel<float>();
  CheckpointHeader h;
  const std::string good = serialize_checkpoint(h, m);
  EXPECT_THROW(deserialize_checkpoint("NOTACKPT{}\n"), InputError);
  EXPECT_THROW(deserialize_checkpoint(good.substr(0, good.size() - 4)),
               InputError);
  EXPECT_THROW(deserialize_checkpoint(good + "xx"), InputError);
  EXPECT_THROW(load_checkpoint("/nonexistent/x.ckpt"), InputError);
}

}  // namespace
}  // namespace mrp::encoder
