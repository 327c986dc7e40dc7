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

#include "adr/seq2seq.hpp"

#include <cmath>

#include "adr/error.hpp"
#include "adr/vocab.hpp"

namespace adr::rnn {

using ad::Tape;
using ad::Tensor;
using ad::Var;

namespace {

std::vector<double> log_softmax_row(const Tensor& logits) {
  const Tensor p = ad::softmax_rows(logits);
  std::vector<double> out(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) out[i] = std::log(p[i]);
  return out;
}

}  // namespace

RnnCell::RnnCell(ad::ParameterStore& store, const std::string& prefix,
                 CellKind kind, std::size_t input_dim, std::size_t hidden_dim,
                 SplitMix64& rng)
    : kind_(kind), input_dim_(input_dim), hidden_dim_(hidden_dim) {
  if (input_dim == 0 || hidden_dim == 0) {
    throw ConfigError("recurrent cell dimensions must be positive");
  }
  const std::size_t gates = kind == CellKind::kGru ? 3 : 4;
  wx_ = &store.add(prefix + ".Wx", {input_dim, gates * hidden_dim});
  ad::xavier_uniform(wx_->value, input_dim, hidden_dim, rng);
  wh_ = &store.add(prefix + ".Wh", {hidden_dim, gates * hidden_dim});
  ad::xavier_uniform(wh_->value, hidden_dim, hidden_dim, rng);
  bx_ = &store.add(prefix + ".bx", {1, gates * hidden_dim});
  if (kind == CellKind::kGru) {
    bh_ = &store.add(prefix + ".bh", {1, gates * hidden_dim});
  } else {
    bh_ = nullptr;
    for (std::size_t k = hidden_dim; k < 2 * hidden_dim; ++k) bx_->value[k] = 1.0;
  }
}

RnnCell::State RnnCell::zero_state(Tape& tape, std::size_t batch) const {
  State s;
  s.h = tape.constant(Tensor({batch, hidden_dim_}));
  if (kind_ == CellKind::kLstm) s.c = tape.constant(Tensor({batch, hidden_dim_}));
  return s;
}

RnnCell::State RnnCell::step(Tape& tape, Var x, const State& prev) const {
  const std::size_t H = hidden_dim_;
  if (x.shape().size() != 2 || x.shape()[1] != input_dim_) {
    throw DimensionError("recurrent cell expects input width " +
                         std::to_string(input_dim_) + ", got shape " +
                         ad::shape_str(x.shape()));
  }
  Var wx = tape.parameter(*wx_);
  Var wh = tape.parameter(*wh_);
  Var bx = tape.parameter(*bx_);
  State next;
  if (kind_ == CellKind::kGru) {
    Var gx = ad::matmul(x, wx) + bx;
    Var gh = ad::matmul(prev.h, wh) + tape.parameter(*bh_);
    Var r = ad::sigmoid(ad::slice(gx, 1, 0, H) + ad::slice(gh, 1, 0, H));
    Var z = ad::sigmoid(ad::slice(gx, 1, H, 2 * H) + ad::slice(gh, 1, H, 2 * H));
    Var n = ad::tanh(ad::slice(gx, 1, 2 * H, 3 * H) + r * ad::slice(gh, 1, 2 * H, 3 * H));
    next.h = n + z * (prev.h - n);
  } else {
    Var g = ad::matmul(x, wx) + ad::matmul(prev.h, wh) + bx;
    Var i = ad::sigmoid(ad::slice(g, 1, 0, H));
    Var f = ad::sigmoid(ad::slice(g, 1, H, 2 * H));
    Var cand = ad::tanh(ad::slice(g, 1, 2 * H, 3 * H));
    Var o = ad::sigmoid(ad::slice(g, 1, 3 * H, 4 * H));
    next.c = f * prev.c + i * cand;
    next.h = o * ad::tanh(next.c);
  }
  return next;
}

AttnSeq2Seq::AttnSeq2Seq(const RnnConfig& config, std::size_t source_vocab,
                         std::size_t target_vocab, std::uint64_t seed)
    : config_(config), source_vocab_(source_vocab), target_vocab_(target_vocab) {
  if (config.layers == 0 || config.embed_dim == 0 || config.hidden_dim == 0 ||
      config.attention_dim == 0) {
    throw ConfigError("recurrent model dimensions and layer count must be positive");
  }
  if (source_vocab == 0 || target_vocab == 0) {
    throw ConfigError("vocabularies must be non-empty");
  }
  SplitMix64 rng(seed);
  const std::size_t H = config.hidden_dim;
  const std::size_t E = config.embed_dim;
  const std::size_t A = config.attention_dim;

  src_embed_ = &params_.add_xavier("src_embed", source_vocab, E, rng);
  tgt_embed_ = &params_.add_xavier("tgt_embed", target_vocab, E, rng);
  for (std::size_t l = 0; l < config.layers; ++l) {
    const std::size_t in = l == 0 ? E : 2 * H;
    const std::string p = "enc.l" + std::to_string(l);
    enc_fwd_.emplace_back(params_, p + ".fwd", config.cell, in, H, rng);
    enc_bwd_.emplace_back(params_, p + ".bwd", config.cell, in, H, rng);
  }
  for (std::size_t l = 0; l < config.layers; ++l) {
    const std::string p = "dec.l" + std::to_string(l);
    const std::size_t in = l == 0 ? E + 2 * H : H;
    dec_.emplace_back(params_, p, config.cell, in, H, rng);
    init_w_.push_back(&params_.add_xavier(p + ".init.W", H, H, rng));
    init_b_.push_back(&params_.add(p + ".init.b", {1, H}));
  }
  att_wd_ = &params_.add_xavier("att.Wd", H, A, rng);
  att_we_ = &params_.add_xavier("att.We", 2 * H, A, rng);
  if (config.score == ScoreKind::kAdd) {
    att_va_ = &params_.add_xavier("att.va", A, 1, rng);
  }
  const std::size_t out_in = config.output_uses_context ? 3 * H : H;
  out_w_ = &params_.add_xavier("out.W", out_in, target_vocab, rng);
  out_b_ = &params_.add("out.b", {1, target_vocab});
}

const RnnCell& AttnSeq2Seq::encoder_cell(std::size_t layer, bool backward) const {
  return backward ? enc_bwd_.at(layer) : enc_fwd_.at(layer);
}

EncoderStates AttnSeq2Seq::encode(Tape& tape, std::span<const std::size_t> source) {
  std::vector<std::size_t> copy(source.begin(), source.end());
  return encode(tape, std::span<const std::vector<std::size_t>>(&copy, 1));
}

EncoderStates AttnSeq2Seq::encode(Tape& tape,
                                  std::span<const std::vector<std::size_t>> sources) {
  if (sources.empty() || sources[0].empty()) {
    throw SizeError("cannot encode an empty sequence");
  }
  const std::size_t B = sources.size();
  const std::size_t T = sources[0].size();
  for (const auto& s : sources) {
    if (s.size() != T) throw DimensionError("encoder batch has unequal lengths");
  }
  Var table = tape.parameter(*src_embed_);
  std::vector<Var> inputs(T);
  std::vector<std::size_t> column(B);
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t b = 0; b < B; ++b) column[b] = sources[b][t];
    inputs[t] = ad::embedding_lookup(table, column);
  }

  EncoderStates enc;
  for (std::size_t l = 0; l < config_.layers; ++l) {
    std::vector<Var> fwd(T);
    std::vector<Var> bwd(T);
    RnnCell::State s = enc_fwd_[l].zero_state(tape, B);
    for (std::size_t t = 0; t < T; ++t) {
      s = enc_fwd_[l].step(tape, inputs[t], s);
      fwd[t] = s.h;
    }
    s = enc_bwd_[l].zero_state(tape, B);
    for (std::size_t t = T; t-- > 0;) {
      s = enc_bwd_[l].step(tape, inputs[t], s);
      bwd[t] = s.h;
    }
    enc.final_backward.push_back(bwd[0]);
    for (std::size_t t = 0; t < T; ++t) inputs[t] = ad::concat({fwd[t], bwd[t]}, 1);
  }
  enc.states = std::move(inputs);
  Var we = tape.parameter(*att_we_);
  enc.keys.reserve(T);
  for (const Var& h : enc.states) enc.keys.push_back(ad::matmul(h, we));
  return enc;
}

Var AttnSeq2Seq::attention_scores(Tape& tape, Var decoder_state,
                                  const EncoderStates& encoder) {
  Var query = ad::matmul(decoder_state, tape.parameter(*att_wd_));
  std::vector<Var> scores;
  scores.reserve(encoder.length());
  if (config_.score == ScoreKind::kDot) {
    for (const Var& key : encoder.keys) scores.push_back(ad::sum(query * key, 1));
  } else {
    Var va = tape.parameter(*att_va_);
    for (const Var& key : encoder.keys) {
      scores.push_back(ad::matmul(ad::tanh(query + key), va));
    }
  }
  return ad::softmax(ad::concat(scores, 1), 1);
}

Var AttnSeq2Seq::context_vector(Var attention, const EncoderStates& encoder) {
  if (attention.shape().size() != 2 || attention.shape()[1] != encoder.length()) {
    throw DimensionError("attention row " + ad::shape_str(attention.shape()) +
                         " does not cover " + std::to_string(encoder.length()) +
                         " encoder states");
  }
  Var c = ad::slice(attention, 1, 0, 1) * encoder.states[0];
  for (std::size_t j = 1; j < encoder.length(); ++j) {
    c = c + ad::slice(attention, 1, j, j + 1) * encoder.states[j];
  }
  return c;
}

DecoderState AttnSeq2Seq::initial_state(Tape& tape, const EncoderStates& encoder) {
  DecoderState st;
  for (std::size_t l = 0; l < config_.layers; ++l) {
    RnnCell::State s;
    s.h = ad::tanh(ad::matmul(encoder.final_backward[l], tape.parameter(*init_w_[l])) +
                   tape.parameter(*init_b_[l]));
    if (config_.cell == CellKind::kLstm) {
      s.c = tape.constant(Tensor(s.h.shape()));
    }
    st.layers.push_back(s);
  }
  return st;
}

StepResult AttnSeq2Seq::decode_step(Tape& tape,
                                    std::span<const std::size_t> previous_tokens,
                                    const DecoderState& state, Var context) {
  Var emb = ad::embedding_lookup(tape.parameter(*tgt_embed_), previous_tokens);
  StepResult out;
  out.context = context;
  Var x = ad::concat({emb, context}, 1);
  for (std::size_t l = 0; l < dec_.size(); ++l) {
    RnnCell::State s = dec_[l].step(tape, x, state.layers[l]);
    out.state.layers.push_back(s);
    x = s.h;
  }
  Var features = config_.output_uses_context ? ad::concat({x, context}, 1) : x;
  out.logits = ad::matmul(features, tape.parameter(*out_w_)) + tape.parameter(*out_b_);
  return out;
}

StepResult AttnSeq2Seq::attend_and_step(Tape& tape,
                                        std::span<const std::size_t> previous_tokens,
                                        const DecoderState& state,
                                        const EncoderStates& encoder) {
  Var alpha = attention_scores(tape, state.top(), encoder);
  Var context = context_vector(alpha, encoder);
  StepResult out = decode_step(tape, previous_tokens, state, context);
  out.attention = alpha;
  return out;
}

Var AttnSeq2Seq::batched_logits(Tape& tape, std::span<const Example> batch,
                                std::vector<std::size_t>* targets) {
  const std::size_t B = batch.size();
  const std::size_t Ty = batch[0].target.size();
  std::vector<std::vector<std::size_t>> sources;
  sources.reserve(B);
  for (const auto& ex : batch) sources.push_back(ex.source);
  const EncoderStates enc = encode(tape, sources);
  DecoderState state = initial_state(tape, enc);

  std::vector<Var> logits;
  logits.reserve(Ty + 1);
  std::vector<std::size_t> prev(B, Vocabulary::kBos);
  targets->clear();
  for (std::size_t t = 0; t <= Ty; ++t) {
    StepResult r = attend_and_step(tape, prev, state, enc);
    logits.push_back(r.logits);
    state = std::move(r.state);
    for (std::size_t b = 0; b < B; ++b) {
      const std::size_t y = t < Ty ? batch[b].target[t] : Vocabulary::kEos;
      targets->push_back(y);
      prev[b] = y;
    }
  }
  return ad::concat(logits, 0);
}

Var AttnSeq2Seq::teacher_forced_logits(Tape& tape, const Example& example) {
  std::vector<std::size_t> targets;
  return batched_logits(tape, std::span<const Example>(&example, 1), &targets);
}

Var AttnSeq2Seq::batch_loss(Tape& tape, std::span<const Example> batch) {
  if (batch.empty()) throw SizeError("empty training batch");
  const std::size_t Tx = batch[0].source.size();
  const std::size_t Ty = batch[0].target.size();
  for (const auto& ex : batch) {
    if (ex.source.size() != Tx || ex.target.size() != Ty) {
      return Seq2SeqModel::batch_loss(tape, batch);
    }
  }
  std::vector<std::size_t> targets;
  Var logits = batched_logits(tape, batch, &targets);
  return ad::nll_loss(logits, targets, static_cast<double>(batch.size()));
}

namespace {

class RnnSession : public DecodeSession {
 public:
  RnnSession(AttnSeq2Seq& model, std::span<const std::size_t> source) : model_(&model) {
    Tape tape(false);
    const EncoderStates enc = model.encode(tape, source);
    for (const Var& s : enc.states) states_.push_back(s.value());
    for (const Var& k : enc.keys) keys_.push_back(k.value());
    const DecoderState st = model.initial_state(tape, enc);
    for (const auto& layer : st.layers) {
      h_.push_back(layer.h.value());
      if (layer.c.valid()) c_.push_back(layer.c.value());
    }
  }

  StepOutput step(std::size_t previous_token) override {
    Tape tape(false);
    EncoderStates enc;
    for (const auto& s : states_) enc.states.push_back(tape.constant(s));
    for (const auto& k : keys_) enc.keys.push_back(tape.constant(k));
    DecoderState st;
    for (std::size_t l = 0; l < h_.size(); ++l) {
      RnnCell::State s;
      s.h = tape.constant(h_[l]);
      if (!c_.empty()) s.c = tape.constant(c_[l]);
      st.layers.push_back(s);
    }
    const std::size_t prev[1] = {previous_token};
    StepResult r = model_->attend_and_step(tape, prev, st, enc);
    for (std::size_t l = 0; l < h_.size(); ++l) {
      h_[l] = r.state.layers[l].h.value();
      if (!c_.empty()) c_[l] = r.state.layers[l].c.value();
    }
    StepOutput out;
    out.log_probs = log_softmax_row(r.logits.value());
    const auto att = r.attention.value().values();
    out.attention.assign(att.begin(), att.end());
    return out;
  }

  std::unique_ptr<DecodeSession> clone() const override {
    return std::make_unique<RnnSession>(*this);
  }

 private:
  AttnSeq2Seq* model_;
  std::vector<Tensor> states_;
  std::vector<Tensor> keys_;
  std::vector<Tensor> h_;
  std::vector<Tensor> c_;
};

}  // namespace

std::unique_ptr<DecodeSession> AttnSeq2Seq::start(std::span<const std::size_t> source) {
  return std::make_unique<RnnSession>(*this, source);
}

}  // namespace adr::rnn
