/*
 * Copyright 2026 The yoruba-adr Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "adr/error.hpp"
#include "adr/transformer.hpp"
#include "adr/vocab.hpp"

namespace {

using namespace adr;
using namespace adr::transformer;
using ad::Tape;
using ad::Tensor;
using ad::Var;

Tensor random_matrix(SplitMix64& rng, std::size_t rows, std::size_t cols) {
  Tensor t({rows, cols});
  for (double& v : t.values()) v = rng.uniform(-1.0, 1.0);
  return t;
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  Tensor out({a.rows(), b.cols()});
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j)
      for (std::size_t k = 0; k < a.cols(); ++k) out(i, j) += a(i, k) * b(k, j);
  return out;
}

Tensor permute_rows(const Tensor& t, const std::vector<std::size_t>& perm) {
  Tensor out(t.shape());
  for (std::size_t i = 0; i < perm.size(); ++i)
    for (std::size_t c = 0; c < t.cols(); ++c) out(i, c) = t(perm[i], c);
  return out;
}

TransformerConfig tiny(std::size_t layers = 1, std::size_t dim = 8, std::size_t heads = 2,
                       PositionalKind pos = PositionalKind::kConcat) {
  TransformerConfig c;
  c.layers = layers;
  c.model_dim = dim;
  c.heads = heads;
  c.ff_dim = 2 * dim;
  c.positional = pos;
  return c;
}

TEST(ScaledDot, SingleMatchingKeyGetsFullWeight) {
  Tape tape(false);
  Var q = tape.constant(Tensor({1, 1}, {0.7}));
  const Tensor alpha = ad::softmax(scaled_dot_scores(q, q, 1), 1).value();
  EXPECT_EQ(alpha[0], 1.0);
}

TEST(ScaledDot, IdenticalKeysSplitEvenly) {
  Tape tape(false);
  Var q = tape.constant(Tensor({1, 3}, {0.2, -0.4, 0.9}));
  Var k = tape.constant(Tensor({2, 3}, {1.0, 2.0, 3.0, 1.0, 2.0, 3.0}));
  const Tensor alpha = ad::softmax(scaled_dot_scores(q, k, 3), 1).value();
  EXPECT_EQ(alpha[0], 0.5);
  EXPECT_EQ(alpha[1], 0.5);
}

TEST(ScaledDot, MatchesHandArithmetic) {
  SplitMix64 rng(1);
  const Tensor q = random_matrix(rng, 2, 3), k = random_matrix(rng, 3, 3);
  Tape tape(false);
  const Tensor e = scaled_dot_scores(tape.constant(q), tape.constant(k), 3).value();
  ASSERT_EQ(e.shape(), (ad::Shape{2, 3}));
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      const double dot = q(i, 0) * k(j, 0) + q(i, 1) * k(j, 1) + q(i, 2) * k(j, 2);
      EXPECT_NEAR(e(i, j), dot / std::sqrt(3.0), 1e-12);
    }
  }
}

TEST(ScaledDot, ShapeMismatch) {
  Tape tape(false);
  EXPECT_THROW(scaled_dot_scores(tape.constant(Tensor({2, 3})), tape.constant(Tensor({2, 4})), 3),
               DimensionError);
}

TEST(ScaledDot, CausalMaskZeroesFuture) {
  SplitMix64 rng(2);
  Tape tape(false);
  const Tensor x = random_matrix(rng, 5, 4);
  const Tensor alpha =
      ad::softmax(scaled_dot_scores(tape.constant(x), tape.constant(x), 4, true), 1).value();
  for (std::size_t i = 0; i < 5; ++i) {
    double total = 0.0;
    for (std::size_t j = 0; j < 5; ++j) {
      if (j > i) {
        EXPECT_EQ(alpha(i, j), 0.0);
      }
      total += alpha(i, j);
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
  }
}

struct OneHead {
  ad::ParameterStore store;
  HeadParams head;
  OneHead(std::size_t dim, std::size_t dz, std::uint64_t seed) {
    SplitMix64 rng(seed);
    head.wq = &store.add_xavier("Wq", dim, dz, rng);
    head.wk = &store.add_xavier("Wk", dim, dz, rng);
    head.wv = &store.add_xavier("Wv", dim, dz, rng);
    head.head_dim = dz;
  }
};

TEST(SelfAttend, LengthOneReturnsValueProjection) {
  OneHead h(4, 3, 3);
  SplitMix64 rng(4);
  const Tensor x = random_matrix(rng, 1, 4);
  Tape tape(false);
  const Tensor z = self_attend(tape, h.head, tape.constant(x)).value();
  const Tensor expected = matmul(x, h.head.wv->value);
  for (std::size_t c = 0; c < 3; ++c) EXPECT_NEAR(z[c], expected[c], 1e-15);
}

TEST(SelfAttend, EmptySequenceRejected) {
  OneHead h(4, 3, 3);
  Tape tape(false);
  EXPECT_THROW(self_attend(tape, h.head, tape.constant(Tensor({0, 4}))), SizeError);
}

TEST(SelfAttend, PermutationEquivariant) {
  OneHead h(6, 6, 5);
  SplitMix64 rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t T = 2 + rng.below(6);
    const Tensor x = random_matrix(rng, T, 6);
    std::vector<std::size_t> perm(T);
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(std::span<std::size_t>(perm));
    Tape tape(false);
    const Tensor z = self_attend(tape, h.head, tape.constant(x)).value();
    const Tensor zp = self_attend(tape, h.head, tape.constant(permute_rows(x, perm))).value();
    const Tensor expected = permute_rows(z, perm);
    for (std::size_t i = 0; i < zp.size(); ++i) EXPECT_NEAR(zp[i], expected[i], 1e-9);
  }
}

TEST(SelfAttend, CausalFirstPositionSeesOnlyItself) {
  OneHead h(4, 4, 7);
  SplitMix64 rng(8);
  const Tensor x = random_matrix(rng, 5, 4);
  Tape tape(false);
  const Tensor z = self_attend(tape, h.head, tape.constant(x), true).value();
  const Tensor v = matmul(x, h.head.wv->value);
  for (std::size_t c = 0; c < 4; ++c) EXPECT_NEAR(z(0, c), v(0, c), 1e-15);
}

TEST(MultiHead, SingleHeadIsSelfAttendThenProjection) {
  ad::ParameterStore store;
  SplitMix64 rng(9);
  const auto mh = make_multi_head(store, "mh", 6, 1, rng);
  const Tensor x = random_matrix(rng, 4, 6);
  Tape tape(false);
  const Tensor got = multi_head(tape, mh, tape.constant(x), tape.constant(x), false).value();
  const Tensor z = self_attend(tape, mh.heads[0], tape.constant(x)).value();
  const Tensor expected = matmul(z, mh.wo->value);
  for (std::size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], expected[i], 1e-14);
}

TEST(MultiHead, OutputShapeMatchesInput) {
  ad::ParameterStore store;
  SplitMix64 rng(10);
  const auto mh = make_multi_head(store, "mh", 8, 4, rng);
  Tape tape(false);
  Var x = tape.constant(random_matrix(rng, 5, 8));
  EXPECT_EQ(multi_head(tape, mh, x, x, false).shape(), (ad::Shape{5, 8}));
}

TEST(MultiHead, IndivisibleDimensionRejected) {
  ad::ParameterStore store;
  SplitMix64 rng(11);
  EXPECT_THROW(make_multi_head(store, "mh", 6, 4, rng), ConfigError);
  EXPECT_THROW(tiny(1, 6, 4).validate(), ConfigError);
}

TEST(MultiHead, TwoHeadGradient) {
  ad::ParameterStore store;
  SplitMix64 rng(12);
  const auto mh = make_multi_head(store, "mh", 4, 2, rng);
  const Tensor x = random_matrix(rng, 3, 4);
  const Tensor w = random_matrix(rng, 3, 4);
  const auto params = store.all();
  const double err = ad::grad_check(params, [&](Tape& tape) {
    Var xv = tape.constant(x);
    return ad::sum(multi_head(tape, mh, xv, xv, false) * tape.constant(w));
  });
  EXPECT_LT(err, 1e-4);
  const double input_err = ad::grad_check(
      [&](Var xv) { return ad::sum(multi_head(xv.tape(), mh, xv, xv, true) * xv.tape().constant(w)); },
      x);
  EXPECT_LT(input_err, 1e-4);
}

TEST(Positional, PositionZeroAlternates) {
  const Tensor pe = positional_encoding(3, 8);
  for (std::size_t c = 0; c < 8; ++c) EXPECT_EQ(pe(0, c), c % 2 == 0 ? 0.0 : 1.0);
}

TEST(Positional, OddDimensionRejected) {
  EXPECT_THROW(positional_encoding(4, 7), ConfigError);
  EXPECT_THROW(tiny(1, 9, 3, PositionalKind::kAdd).validate(), ConfigError);
}

TEST(Positional, DistinctUpToTenThousand) {
  const std::size_t n = 10000;
  const Tensor pe = positional_encoding(n, 16);
  std::vector<std::vector<double>> rows(n);
  for (std::size_t p = 0; p < n; ++p) rows[p].assign(pe.data() + p * 16, pe.data() + (p + 1) * 16);
  std::sort(rows.begin(), rows.end());
  EXPECT_EQ(std::adjacent_find(rows.begin(), rows.end()), rows.end());
}

TEST(Positional, BreaksPermutationEquivariance) {
  Transformer m(tiny(1, 8, 2, PositionalKind::kConcat), 12, 12, 13);
  const std::vector<std::size_t> src{4, 5, 6, 7};
  const std::vector<std::size_t> perm{2, 0, 3, 1};
  std::vector<std::size_t> permuted(4);
  for (std::size_t i = 0; i < 4; ++i) permuted[i] = src[perm[i]];
  Tape tape(false);
  const Tensor a = m.encoder_stack(tape, m.embed_source(tape, src)).value();
  const Tensor b = m.encoder_stack(tape, m.embed_source(tape, permuted)).value();
  const Tensor expected = permute_rows(a, perm);
  double diff = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) diff = std::max(diff, std::abs(b[i] - expected[i]));
  EXPECT_GT(diff, 1e-6);
}

TEST(Stack, EncoderEquivariantWithoutPositions) {
  Transformer m(tiny(2, 8, 2, PositionalKind::kNone), 12, 12, 14);
  SplitMix64 rng(15);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t T = 2 + rng.below(6);
    std::vector<std::size_t> src(T), perm(T), permuted(T);
    for (auto& s : src) s = 4 + rng.below(8);
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(std::span<std::size_t>(perm));
    for (std::size_t i = 0; i < T; ++i) permuted[i] = src[perm[i]];
    Tape tape(false);
    const Tensor a = m.encoder_stack(tape, m.embed_source(tape, src)).value();
    const Tensor b = m.encoder_stack(tape, m.embed_source(tape, permuted)).value();
    const Tensor expected = permute_rows(a, perm);
    for (std::size_t i = 0; i < b.size(); ++i) EXPECT_NEAR(b[i], expected[i], 1e-9);
  }
}

TEST(Stack, ZeroLayersIsIdentity) {
  Transformer m(tiny(0, 8, 2), 10, 10, 16);
  const std::vector<std::size_t> src{4, 5, 6};
  Tape tape(false);
  Var x = m.embed_source(tape, src);
  EXPECT_EQ(m.encoder_stack(tape, x).value(), x.value());
  Var y = m.embed_target(tape, src);
  EXPECT_EQ(m.decoder_stack(tape, y, x).value(), y.value());
}

TEST(Stack, OutputLengths) {
  Transformer m(tiny(2, 8, 2), 10, 10, 17);
  const std::vector<std::size_t> src{4, 5, 6, 7, 8}, tgt{4, 5};
  Tape tape(false);
  Var memory = m.encoder_stack(tape, m.embed_source(tape, src));
  EXPECT_EQ(memory.shape(), (ad::Shape{5, 8}));
  EXPECT_EQ(m.decoder_stack(tape, m.embed_target(tape, tgt), memory).shape(), (ad::Shape{2, 8}));
  const Example ex{src, {4, 5, 6}};
  EXPECT_EQ(m.teacher_forced_logits(tape, ex).shape(), (ad::Shape{4, 10}));
}

TEST(Stack, EndToEndGradient) {
  for (PositionalKind pos : {PositionalKind::kConcat, PositionalKind::kAdd}) {
    Transformer m(tiny(1, 8, 2, pos), 9, 9, 18);
    const Example ex{{4, 5, 6}, {7, 8}};
    const auto params = m.params().all();
    const double err = ad::grad_check(params, [&](Tape& tape) {
      return m.batch_loss(tape, std::span<const Example>(&ex, 1));
    });
    EXPECT_LT(err, 1e-4) << "positional " << int(pos);
  }
}

TEST(Stack, ZeroedSublayersAreIdentity) {
  Transformer m(tiny(2, 8, 2), 10, 10, 19);
  for (auto& layer : m.encoder_layers()) {
    layer.self_attn.wo->value.fill(0.0);
    layer.ff.w2->value.fill(0.0);
  }
  for (auto& layer : m.decoder_layers()) {
    layer.self_attn.wo->value.fill(0.0);
    layer.cross_attn.wo->value.fill(0.0);
    layer.ff.w2->value.fill(0.0);
  }
  const std::vector<std::size_t> src{4, 5, 6};
  Tape tape(false);
  Var x = m.embed_source(tape, src);
  const Tensor out = m.encoder_stack(tape, x).value();
  // Only the final normalization remains.
  const Tensor expected = ad::layer_norm(x).value();
  for (std::size_t i = 0; i < out.size(); ++i) EXPECT_NEAR(out[i], expected[i], 1e-12);
  Var y = m.embed_target(tape, src);
  const Tensor dec = m.decoder_stack(tape, y, x).value();
  const Tensor dec_expected = ad::layer_norm(y).value();
  for (std::size_t i = 0; i < dec.size(); ++i) EXPECT_NEAR(dec[i], dec_expected[i], 1e-12);
}

TEST(Stack, LogitsIgnoreFutureTargets) {
  Transformer m(tiny(2, 8, 2), 12, 12, 20);
  SplitMix64 rng(21);
  for (int trial = 0; trial < 30; ++trial) {
    Example a{{4, 5, 6, 7}, {}};
    for (int i = 0; i < 5; ++i) a.target.push_back(4 + rng.below(8));
    Example b = a;
    const std::size_t t = rng.below(5);
    for (std::size_t i = t; i < 5; ++i) b.target[i] = 4 + rng.below(8);
    Tape tape(false);
    const Tensor la = m.teacher_forced_logits(tape, a).value();
    const Tensor lb = m.teacher_forced_logits(tape, b).value();
    // Row r is conditioned on BOS and target[0..r-1].
    for (std::size_t r = 0; r <= t; ++r) {
      for (std::size_t v = 0; v < 12; ++v) EXPECT_EQ(la(r, v), lb(r, v));
    }
  }
}

TEST(Session, CrossAttentionRowsAreDistributions) {
  Transformer m(tiny(2, 8, 2), 12, 12, 22);
  SplitMix64 rng(23);
  for (int n = 0; n < 30; ++n) {
    std::vector<std::size_t> src(1 + rng.below(7));
    for (auto& s : src) s = 4 + rng.below(8);
    auto session = m.start(src);
    std::size_t prev = Vocabulary::kBos;
    for (int t = 0; t < 4; ++t) {
      const auto out = session->step(prev);
      ASSERT_EQ(out.attention.size(), src.size());
      double total = 0.0;
      for (double a : out.attention) {
        EXPECT_GE(a, 0.0);
        total += a;
      }
      EXPECT_NEAR(total, 1.0, 1e-6);
      prev = 4 + rng.below(8);
    }
  }
}

TEST(Session, MatchesTeacherForcing) {
  Transformer m(tiny(2, 8, 2), 10, 10, 24);
  const Example ex{{4, 5, 6}, {7, 8, 9}};
  Tape tape(false);
  const Tensor logits = m.teacher_forced_logits(tape, ex).value();
  auto s = m.start(ex.source);
  std::size_t prev = Vocabulary::kBos;
  for (std::size_t t = 0; t <= ex.target.size(); ++t) {
    const auto out = s->step(prev);
    Tensor row({1, 10});
    for (std::size_t v = 0; v < 10; ++v) row[v] = logits(t, v);
    const Tensor p = ad::softmax_rows(row);
    for (std::size_t v = 0; v < 10; ++v) EXPECT_NEAR(std::exp(out.log_probs[v]), p[v], 1e-12);
    if (t < ex.target.size()) prev = ex.target[t];
  }
}

TEST(Config, Validation) {
  EXPECT_NO_THROW(tiny().validate());
  TransformerConfig bad = tiny();
  bad.ff_dim = 0;
  EXPECT_THROW(bad.validate(), ConfigError);
  EXPECT_THROW(Transformer(tiny(1, 10, 4), 5, 5, 1), ConfigError);
}

}  // namespace
