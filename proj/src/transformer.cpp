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

#include "adr/transformer.hpp"

#include <cmath>
#include <limits>

#include "adr/error.hpp"
#include "adr/vocab.hpp"

namespace adr::transformer {

using ad::Tape;
using ad::Tensor;
using ad::Var;

void TransformerConfig::validate() const {
  if (model_dim == 0 || heads == 0 || ff_dim == 0) {
    throw ConfigError("transformer sizes must be positive");
  }
  if (model_dim % heads != 0) {
    throw ConfigError("model_dim " + std::to_string(model_dim) +
                      " is not divisible by " + std::to_string(heads) + " heads");
  }
  if (positional != PositionalKind::kNone && model_dim % 2 != 0) {
    throw ConfigError("positional encodings need an even model_dim");
  }
}

Var scaled_dot_scores(Var queries, Var keys, std::size_t head_dim, bool causal) {
  if (queries.shape().size() != 2 || keys.shape().size() != 2 ||
      queries.shape()[1] != keys.shape()[1]) {
    throw DimensionError("scaled_dot_scores: incompatible shapes " +
                         ad::shape_str(queries.shape()) + " and " +
                         ad::shape_str(keys.shape()));
  }
  Var scores = ad::scale(ad::matmul(queries, ad::transpose(keys)),
                         1.0 / std::sqrt(static_cast<double>(head_dim)));
  if (!causal) return scores;
  const std::size_t tq = queries.shape()[0];
  const std::size_t tk = keys.shape()[0];
  Tensor mask({tq, tk});
  for (std::size_t i = 0; i < tq; ++i) {
    for (std::size_t j = i + 1; j < tk; ++j) {
      mask(i, j) = -std::numeric_limits<double>::infinity();
    }
  }
  return scores + queries.tape().constant(std::move(mask));
}

Var attend(Tape& tape, const HeadParams& head, Var queries_from, Var memory,
           bool causal, Tensor* weights) {
  Var q = ad::matmul(queries_from, tape.parameter(*head.wq));
  Var k = ad::matmul(memory, tape.parameter(*head.wk));
  Var v = ad::matmul(memory, tape.parameter(*head.wv));
  Var alpha = ad::softmax(scaled_dot_scores(q, k, head.head_dim, causal), 1);
  if (weights) *weights = alpha.value();
  return ad::matmul(alpha, v);
}

Var self_attend(Tape& tape, const HeadParams& head, Var sequence, bool causal) {
  if (sequence.shape().empty() || sequence.shape()[0] == 0) {
    throw SizeError("self-attention over an empty sequence");
  }
  return attend(tape, head, sequence, sequence, causal);
}

Var multi_head(Tape& tape, const MultiHeadParams& mh, Var queries_from,
               Var memory, bool causal, Tensor* weights) {
  std::vector<Var> outs;
  outs.reserve(mh.heads.size());
  Tensor avg;
  Tensor w;
  for (const auto& head : mh.heads) {
    outs.push_back(attend(tape, head, queries_from, memory, causal,
                          weights ? &w : nullptr));
    if (weights) {
      if (avg.empty()) avg = Tensor(w.shape());
      for (std::size_t i = 0; i < w.size(); ++i) {
        avg[i] += w[i] / static_cast<double>(mh.heads.size());
      }
    }
  }
  if (weights) *weights = std::move(avg);
  Var joined = outs.size() == 1 ? outs[0] : ad::concat(outs, 1);
  return ad::matmul(joined, tape.parameter(*mh.wo));
}

Tensor positional_encoding(std::size_t length, std::size_t dim) {
  if (dim % 2 != 0) throw ConfigError("positional encoding dim must be even");
  Tensor pe({length, dim});
  for (std::size_t p = 0; p < length; ++p) {
    for (std::size_t i = 0; i < dim / 2; ++i) {
      const double rate =
          std::pow(10000.0, static_cast<double>(2 * i) / static_cast<double>(dim));
      const double angle = static_cast<double>(p) / rate;
      pe(p, 2 * i) = std::sin(angle);
      pe(p, 2 * i + 1) = std::cos(angle);
    }
  }
  return pe;
}

MultiHeadParams make_multi_head(ad::ParameterStore& store, const std::string& prefix,
                                std::size_t model_dim, std::size_t heads,
                                SplitMix64& rng) {
  if (heads == 0 || model_dim % heads != 0) {
    throw ConfigError("model_dim " + std::to_string(model_dim) +
                      " is not divisible by " + std::to_string(heads) + " heads");
  }
  const std::size_t dz = model_dim / heads;
  MultiHeadParams mh;
  for (std::size_t h = 0; h < heads; ++h) {
    const std::string p = prefix + ".h" + std::to_string(h);
    HeadParams head;
    head.wq = &store.add_xavier(p + ".Wq", model_dim, dz, rng);
    head.wk = &store.add_xavier(p + ".Wk", model_dim, dz, rng);
    head.wv = &store.add_xavier(p + ".Wv", model_dim, dz, rng);
    head.head_dim = dz;
    mh.heads.push_back(head);
  }
  mh.wo = &store.add_xavier(prefix + ".Wo", model_dim, model_dim, rng);
  return mh;
}

namespace {

NormParams make_norm(ad::ParameterStore& store, const std::string& prefix,
                     std::size_t dim) {
  NormParams n;
  n.gain = &store.add(prefix + ".g", {1, dim});
  n.gain->value.fill(1.0);
  n.bias = &store.add(prefix + ".b", {1, dim});
  return n;
}

FeedForwardParams make_ff(ad::ParameterStore& store, const std::string& prefix,
                          std::size_t dim, std::size_t hidden, SplitMix64& rng) {
  FeedForwardParams f;
  f.w1 = &store.add_xavier(prefix + ".W1", dim, hidden, rng);
  f.b1 = &store.add(prefix + ".b1", {1, hidden});
  f.w2 = &store.add_xavier(prefix + ".W2", hidden, dim, rng);
  f.b2 = &store.add(prefix + ".b2", {1, dim});
  return f;
}

std::vector<double> log_softmax_last_row(const Tensor& logits) {
  const std::size_t c = logits.cols();
  const std::size_t r = logits.rows();
  Tensor last({1, c});
  std::copy_n(logits.data() + (r - 1) * c, c, last.data());
  const Tensor p = ad::softmax_rows(last);
  std::vector<double> out(c);
  for (std::size_t i = 0; i < c; ++i) out[i] = std::log(p[i]);
  return out;
}

}  // namespace

Transformer::Transformer(const TransformerConfig& config, std::size_t source_vocab,
                         std::size_t target_vocab, std::uint64_t seed)
    : config_(config), source_vocab_(source_vocab), target_vocab_(target_vocab) {
  config.validate();
  if (source_vocab == 0 || target_vocab == 0) {
    throw ConfigError("vocabularies must be non-empty");
  }
  SplitMix64 rng(seed);
  const std::size_t d = config.model_dim;
  src_embed_ = &params_.add_xavier("src_embed", source_vocab, d, rng);
  tgt_embed_ = &params_.add_xavier("tgt_embed", target_vocab, d, rng);
  if (config.positional == PositionalKind::kConcat) {
    src_proj_ = &params_.add_xavier("enc.in_proj", 2 * d, d, rng);
    tgt_proj_ = &params_.add_xavier("dec.in_proj", 2 * d, d, rng);
  }
  for (std::size_t l = 0; l < config.layers; ++l) {
    const std::string p = "enc.l" + std::to_string(l);
    EncoderLayer layer;
    layer.self_attn = make_multi_head(params_, p + ".self", d, config.heads, rng);
    layer.norm1 = make_norm(params_, p + ".ln1", d);
    layer.ff = make_ff(params_, p + ".ff", d, config.ff_dim, rng);
    layer.norm2 = make_norm(params_, p + ".ln2", d);
    enc_.push_back(layer);
  }
  for (std::size_t l = 0; l < config.layers; ++l) {
    const std::string p = "dec.l" + std::to_string(l);
    DecoderLayer layer;
    layer.self_attn = make_multi_head(params_, p + ".self", d, config.heads, rng);
    layer.norm1 = make_norm(params_, p + ".ln1", d);
    layer.cross_attn = make_multi_head(params_, p + ".cross", d, config.heads, rng);
    layer.norm2 = make_norm(params_, p + ".ln2", d);
    layer.ff = make_ff(params_, p + ".ff", d, config.ff_dim, rng);
    layer.norm3 = make_norm(params_, p + ".ln3", d);
    dec_.push_back(layer);
  }
  if (config.layers > 0) {
    enc_final_ = make_norm(params_, "enc.ln_f", d);
    dec_final_ = make_norm(params_, "dec.ln_f", d);
  }
  out_w_ = &params_.add_xavier("out.W", d, target_vocab, rng);
  out_b_ = &params_.add("out.b", {1, target_vocab});
}

Var Transformer::embed(Tape& tape, ad::Parameter& table, ad::Parameter* proj,
                       std::span<const std::size_t> tokens) {
  if (tokens.empty()) throw SizeError("cannot embed an empty sequence");
  Var x = ad::embedding_lookup(tape.parameter(table), tokens);
  switch (config_.positional) {
    case PositionalKind::kNone:
      return x;
    case PositionalKind::kAdd:
      return x + tape.constant(positional_encoding(tokens.size(), config_.model_dim));
    case PositionalKind::kConcat: {
      Var pe = tape.constant(positional_encoding(tokens.size(), config_.model_dim));
      return ad::matmul(ad::concat({x, pe}, 1), tape.parameter(*proj));
    }
  }
  return x;
}

Var Transformer::embed_source(Tape& tape, std::span<const std::size_t> tokens) {
  return embed(tape, *src_embed_, src_proj_, tokens);
}

Var Transformer::embed_target(Tape& tape, std::span<const std::size_t> tokens) {
  return embed(tape, *tgt_embed_, tgt_proj_, tokens);
}

Var Transformer::norm(Tape& tape, const NormParams& p, Var x) {
  return ad::layer_norm(x) * tape.parameter(*p.gain) + tape.parameter(*p.bias);
}

Var Transformer::feed_forward(Tape& tape, const FeedForwardParams& p, Var x) {
  Var h = ad::relu(ad::matmul(x, tape.parameter(*p.w1)) + tape.parameter(*p.b1));
  return ad::matmul(h, tape.parameter(*p.w2)) + tape.parameter(*p.b2);
}

Var Transformer::encoder_stack(Tape& tape, Var x) {
  for (const auto& layer : enc_) {
    Var n1 = norm(tape, layer.norm1, x);
    x = x + multi_head(tape, layer.self_attn, n1, n1, false);
    x = x + feed_forward(tape, layer.ff, norm(tape, layer.norm2, x));
  }
  if (!enc_.empty()) x = norm(tape, enc_final_, x);
  return x;
}

Var Transformer::decoder_stack(Tape& tape, Var x, Var memory, Tensor* cross_weights) {
  for (std::size_t l = 0; l < dec_.size(); ++l) {
    const auto& layer = dec_[l];
    Var n1 = norm(tape, layer.norm1, x);
    x = x + multi_head(tape, layer.self_attn, n1, n1, true);
    Tensor* w = (cross_weights && l + 1 == dec_.size()) ? cross_weights : nullptr;
    x = x + multi_head(tape, layer.cross_attn, norm(tape, layer.norm2, x), memory,
                       false, w);
    x = x + feed_forward(tape, layer.ff, norm(tape, layer.norm3, x));
  }
  if (!dec_.empty()) x = norm(tape, dec_final_, x);
  return x;
}

Var Transformer::project(Tape& tape, Var decoded) {
  return ad::matmul(decoded, tape.parameter(*out_w_)) + tape.parameter(*out_b_);
}

Var Transformer::teacher_forced_logits(Tape& tape, const Example& example) {
  Var memory = encoder_stack(tape, embed_source(tape, example.source));
  std::vector<std::size_t> inputs;
  inputs.reserve(example.target.size() + 1);
  inputs.push_back(Vocabulary::kBos);
  inputs.insert(inputs.end(), example.target.begin(), example.target.end());
  return project(tape, decoder_stack(tape, embed_target(tape, inputs), memory));
}

namespace {

class TransformerSession : public DecodeSession {
 public:
  TransformerSession(Transformer& model, std::span<const std::size_t> source)
      : model_(&model) {
    Tape tape(false);
    memory_ = model.encoder_stack(tape, model.embed_source(tape, source)).value();
  }

  StepOutput step(std::size_t previous_token) override {
    prefix_.push_back(previous_token);
    Tape tape(false);
    Tensor cross;
    Var decoded = model_->decoder_stack(tape, model_->embed_target(tape, prefix_),
                                        tape.constant(memory_), &cross);
    StepOutput out;
    out.log_probs = log_softmax_last_row(model_->project(tape, decoded).value());
    if (cross.empty()) {
      out.attention.assign(memory_.rows(), 1.0 / static_cast<double>(memory_.rows()));
    } else {
      const std::size_t c = cross.cols();
      const double* last = cross.data() + (cross.rows() - 1) * c;
      out.attention.assign(last, last + c);
    }
    return out;
  }

  std::unique_ptr<DecodeSession> clone() const override {
    return std::make_unique<TransformerSession>(*this);
  }

 private:
  Transformer* model_;
  Tensor memory_;
  std::vector<std::size_t> prefix_;
};

}  // namespace

std::unique_ptr<DecodeSession> Transformer::start(std::span<const std::size_t> source) {
  return std::make_unique<TransformerSession>(*this, source);
}

}  // namespace adr::transformer
