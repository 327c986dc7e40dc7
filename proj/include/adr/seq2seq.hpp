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

// Bidirectional recurrent encoder with an attentive recurrent decoder.
//
// The encoder runs a forward and a backward cell over the source and
// concatenates their states per position. At output step i the decoder
// scores every encoder state against its previous top-layer state,
//
//   dot:  e_ij = <h^d_{i-1} W_d, h^e_j W_e>
//   add:  e_ij = v_a . tanh(h^d_{i-1} W_d + h^e_j W_e)
//
// normalizes the scores with a softmax, and feeds the weighted sum c_i of
// encoder states, together with the embedding of y_{i-1}, into its cell.
// Logits come from an affine map of [h^d_i ; c_i] (or h^d_i alone).
//
// All activations are batch-major: a batch of B equal-length sentences is
// processed as B x dim matrices.

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "adr/autodiff.hpp"
#include "adr/model.hpp"
#include "adr/rng.hpp"

namespace adr::rnn {

enum class CellKind { kGru, kLstm };
enum class ScoreKind { kDot, kAdd };

struct RnnConfig {
  CellKind cell = CellKind::kGru;
  ScoreKind score = ScoreKind::kDot;
  std::size_t layers = 1;
  std::size_t embed_dim = 64;
  std::size_t hidden_dim = 64;     // per direction in the encoder
  std::size_t attention_dim = 64;  // width of W_d, W_e projections
  bool output_uses_context = true;
};

// Gated cell over batch-major inputs. GRU follows
//   r = sig(x Wx_r + h Wh_r + b), z = sig(...), n = tanh(x Wx_n + b + r * (h Wh_n + b'))
//   h' = (1 - z) * n + z * h
// and LSTM the usual i, f, g, o gates with forget bias initialized to 1.
class RnnCell {
 public:
  struct State {
    ad::Var h;
    ad::Var c;  // LSTM only
  };

  RnnCell(ad::ParameterStore& store, const std::string& prefix, CellKind kind,
          std::size_t input_dim, std::size_t hidden_dim, SplitMix64& rng);

  State step(ad::Tape& tape, ad::Var x, const State& prev) const;
  State zero_state(ad::Tape& tape, std::size_t batch) const;

  CellKind kind() const { return kind_; }
  std::size_t input_dim() const { return input_dim_; }
  std::size_t hidden_dim() const { return hidden_dim_; }

 private:
  CellKind kind_;
  std::size_t input_dim_;
  std::size_t hidden_dim_;
  ad::Parameter* wx_;
  ad::Parameter* wh_;
  ad::Parameter* bx_;
  ad::Parameter* bh_;
};

struct EncoderStates {
  std::vector<ad::Var> states;          // per position, B x 2H (top layer)
  std::vector<ad::Var> keys;            // per position, h^e_j W_e
  std::vector<ad::Var> final_backward;  // per layer, backward state at j = 1
  std::size_t length() const { return states.size(); }
};

// Decoder recurrent state: one cell state per layer.
struct DecoderState {
  std::vector<RnnCell::State> layers;
  ad::Var top() const { return layers.back().h; }
};

struct StepResult {
  ad::Var logits;  // B x target_vocab
  DecoderState state;
  ad::Var attention;  // B x T_x
  ad::Var context;    // B x 2H
};

class AttnSeq2Seq : public Seq2SeqModel {
 public:
  AttnSeq2Seq(const RnnConfig& config, std::size_t source_vocab,
              std::size_t target_vocab, std::uint64_t seed);

  const RnnConfig& config() const { return config_; }
  ad::ParameterStore& params() override { return params_; }
  const ad::ParameterStore& params() const override { return params_; }
  std::size_t source_vocab_size() const override { return source_vocab_; }
  std::size_t target_vocab_size() const override { return target_vocab_; }

  // `sources` holds B index sequences of one common, non-zero length.
  EncoderStates encode(ad::Tape& tape,
                       std::span<const std::vector<std::size_t>> sources);
  EncoderStates encode(ad::Tape& tape, std::span<const std::size_t> source);

  // Softmax over source positions of att(h^d_{i-1}, h^e_j); B x T_x.
  ad::Var attention_scores(ad::Tape& tape, ad::Var decoder_state,
                           const EncoderStates& encoder);
  // c_i = sum_j alpha_ij h^e_j; B x 2H.
  static ad::Var context_vector(ad::Var attention, const EncoderStates& encoder);

  DecoderState initial_state(ad::Tape& tape, const EncoderStates& encoder);
  // Feeds y_{t-1} and the context into the decoder cells and emits logits.
  StepResult decode_step(ad::Tape& tape, std::span<const std::size_t> previous_tokens,
                         const DecoderState& state, ad::Var context);
  // Attention, context and state update for one output position.
  StepResult attend_and_step(ad::Tape& tape, std::span<const std::size_t> previous_tokens,
                             const DecoderState& state, const EncoderStates& encoder);

  ad::Var teacher_forced_logits(ad::Tape& tape, const Example& example) override;
  ad::Var batch_loss(ad::Tape& tape, std::span<const Example> batch) override;
  std::unique_ptr<DecodeSession> start(std::span<const std::size_t> source) override;

  // Forward (first) and backward (second) encoder cells of a layer.
  const RnnCell& encoder_cell(std::size_t layer, bool backward) const;

 private:
  // Logits for B sequences of equal source length and equal target length;
  // rows are step-major: step t occupies rows [t*B, (t+1)*B).
  ad::Var batched_logits(ad::Tape& tape, std::span<const Example> batch,
                         std::vector<std::size_t>* targets);

  RnnConfig config_;
  std::size_t source_vocab_;
  std::size_t target_vocab_;
  ad::ParameterStore params_;
  std::vector<RnnCell> enc_fwd_;
  std::vector<RnnCell> enc_bwd_;
  std::vector<RnnCell> dec_;
  ad::Parameter* src_embed_ = nullptr;
  ad::Parameter* tgt_embed_ = nullptr;
  std::vector<ad::Parameter*> init_w_;
  std::vector<ad::Parameter*> init_b_;
  ad::Parameter* att_wd_ = nullptr;
  ad::Parameter* att_we_ = nullptr;
  ad::Parameter* att_va_ = nullptr;
  ad::Parameter* out_w_ = nullptr;
  ad::Parameter* out_b_ = nullptr;
};

}  // namespace adr::rnn
