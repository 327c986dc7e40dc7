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

// Self-attention encoder-decoder.
//
// Each head projects its input rows with W^Q, W^K, W^V, scores
// e_ij = (x_i W^Q)(x_j W^K)^T / sqrt(d_z), normalizes each row with a
// softmax and returns z_i = sum_j alpha_ij (x_j W^V). Heads are concatenated
// and projected by W^O.
//
// Sublayers are pre-norm residual blocks, x + f(norm(x)), so a sublayer whose
// output projection is zero is exactly the identity. Sinusoidal positions are
// concatenated to token embeddings and projected back to model_dim (or added,
// or omitted). The decoder's self-attention is causally masked.

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "adr/autodiff.hpp"
#include "adr/model.hpp"
#include "adr/rng.hpp"

namespace adr::transformer {

enum class PositionalKind { kConcat, kAdd, kNone };

struct TransformerConfig {
  std::size_t layers = 2;
  std::size_t model_dim = 64;
  std::size_t heads = 4;
  std::size_t ff_dim = 128;
  PositionalKind positional = PositionalKind::kConcat;

  std::size_t head_dim() const { return model_dim / heads; }
  // Throws ConfigError unless model_dim is a positive multiple of heads and
  // the other sizes are positive.
  void validate() const;
};

struct HeadParams {
  ad::Parameter* wq = nullptr;
  ad::Parameter* wk = nullptr;
  ad::Parameter* wv = nullptr;
  std::size_t head_dim = 0;
};

struct MultiHeadParams {
  std::vector<HeadParams> heads;
  ad::Parameter* wo = nullptr;
};

// (queries keys^T) / sqrt(d_z); with `causal`, entries j > i become -inf.
ad::Var scaled_dot_scores(ad::Var queries, ad::Var keys, std::size_t head_dim,
                          bool causal = false);

// One head of attention from `queries_from` rows over `memory` rows. The
// attention weights are written to `weights` when given.
ad::Var attend(ad::Tape& tape, const HeadParams& head, ad::Var queries_from,
               ad::Var memory, bool causal, ad::Tensor* weights = nullptr);

// Self-attention of one head over `sequence`.
ad::Var self_attend(ad::Tape& tape, const HeadParams& head, ad::Var sequence,
                    bool causal = false);

// Concatenated heads followed by W^O. `weights`, when given, receives the
// head-averaged attention matrix.
ad::Var multi_head(ad::Tape& tape, const MultiHeadParams& mh, ad::Var queries_from,
                   ad::Var memory, bool causal, ad::Tensor* weights = nullptr);

// Row p: sin(p / 10000^(2i/dim)) at column 2i, cos(...) at 2i + 1.
// Throws ConfigError for odd dim.
ad::Tensor positional_encoding(std::size_t length, std::size_t dim);

// Registers per-head W^Q/W^K/W^V (model_dim x d_z) and W^O.
MultiHeadParams make_multi_head(ad::ParameterStore& store, const std::string& prefix,
                                std::size_t model_dim, std::size_t heads,
                                SplitMix64& rng);

struct NormParams {
  ad::Parameter* gain = nullptr;
  ad::Parameter* bias = nullptr;
};

struct FeedForwardParams {
  ad::Parameter* w1 = nullptr;
  ad::Parameter* b1 = nullptr;
  ad::Parameter* w2 = nullptr;
  ad::Parameter* b2 = nullptr;
};

struct EncoderLayer {
  MultiHeadParams self_attn;
  NormParams norm1, norm2;
  FeedForwardParams ff;
};

struct DecoderLayer {
  MultiHeadParams self_attn;
  MultiHeadParams cross_attn;
  NormParams norm1, norm2, norm3;
  FeedForwardParams ff;
};

class Transformer : public Seq2SeqModel {
 public:
  Transformer(const TransformerConfig& config, std::size_t source_vocab,
              std::size_t target_vocab, std::uint64_t seed);

  const TransformerConfig& config() const { return config_; }
  ad::ParameterStore& params() override { return params_; }
  const ad::ParameterStore& params() const override { return params_; }
  std::size_t source_vocab_size() const override { return source_vocab_; }
  std::size_t target_vocab_size() const override { return target_vocab_; }

  // Token embeddings with positional information, T x model_dim.
  ad::Var embed_source(ad::Tape& tape, std::span<const std::size_t> tokens);
  ad::Var embed_target(ad::Tape& tape, std::span<const std::size_t> tokens);

  // With `causal_self_attention` false and positional encodings off, the
  // encoder is permutation-equivariant.
  ad::Var encoder_stack(ad::Tape& tape, ad::Var embedded);
  // `cross_weights`, when given, receives the last layer's head-averaged
  // encoder-decoder attention.
  ad::Var decoder_stack(ad::Tape& tape, ad::Var embedded, ad::Var memory,
                        ad::Tensor* cross_weights = nullptr);
  // Final linear map to target-vocabulary logits.
  ad::Var project(ad::Tape& tape, ad::Var decoded);

  // Decoder inputs: BOS followed by the target tokens.
  ad::Var teacher_forced_logits(ad::Tape& tape, const Example& example) override;
  std::unique_ptr<DecodeSession> start(std::span<const std::size_t> source) override;

  std::vector<EncoderLayer>& encoder_layers() { return enc_; }
  std::vector<DecoderLayer>& decoder_layers() { return dec_; }

 private:
  ad::Var embed(ad::Tape& tape, ad::Parameter& table, ad::Parameter* proj,
                std::span<const std::size_t> tokens);
  ad::Var norm(ad::Tape& tape, const NormParams& p, ad::Var x);
  ad::Var feed_forward(ad::Tape& tape, const FeedForwardParams& p, ad::Var x);

  TransformerConfig config_;
  std::size_t source_vocab_;
  std::size_t target_vocab_;
  ad::ParameterStore params_;
  ad::Parameter* src_embed_ = nullptr;
  ad::Parameter* tgt_embed_ = nullptr;
  ad::Parameter* src_proj_ = nullptr;  // concat mode only
  ad::Parameter* tgt_proj_ = nullptr;
  std::vector<EncoderLayer> enc_;
  std::vector<DecoderLayer> dec_;
  NormParams enc_final_;
  NormParams dec_final_;
  ad::Parameter* out_w_ = nullptr;
  ad::Parameter* out_b_ = nullptr;
};

}  // namespace adr::transformer
