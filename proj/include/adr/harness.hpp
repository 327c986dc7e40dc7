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

// Training, decoding and evaluation of the encoder-decoder models.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "adr/autodiff.hpp"
#include "adr/model.hpp"
#include "adr/seq2seq.hpp"
#include "adr/text.hpp"
#include "adr/transformer.hpp"
#include "adr/vocab.hpp"

namespace adr::harness {

enum class Architecture { kSoftDot, kSoftAdd, kTransformer };

std::string to_string(Architecture a);
Architecture architecture_from_string(const std::string& s);
std::string to_string(rnn::CellKind c);
rnn::CellKind cell_from_string(const std::string& s);
std::string to_string(transformer::PositionalKind p);
transformer::PositionalKind positional_from_string(const std::string& s);

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct TrainConfig {
  Architecture architecture = Architecture::kSoftDot;
  rnn::CellKind cell = rnn::CellKind::kGru;
  std::size_t layers = 1;
  std::size_t hidden_dim = 64;  // RNN hidden size, or transformer model_dim
  std::size_t embed_dim = 64;   // RNN only; transformer embeds at model_dim
  std::size_t heads = 4;
  std::size_t ff_dim = 128;
  transformer::PositionalKind positional = transformer::PositionalKind::kConcat;
  std::size_t epochs = 50;
  std::size_t batch_size = 16;
  AdamConfig adam;
  double lr_decay = 0.7;       // applied when dev loss does not improve
  std::size_t decay_patience = 1;
  double grad_clip = 5.0;      // global L2 norm; 0 disables
  std::size_t min_count = 2;   // vocabulary threshold
  std::uint64_t seed = 1;

  // Throws ConfigError on non-positive sizes, lr <= 0 or decay outside (0, 1].
  void validate() const;
};

struct EpochMetrics {
  std::size_t epoch = 0;
  double train_loss = 0.0;  // mean per-sentence J over the epoch
  double dev_loss = 0.0;    // per-sentence J on dev (NaN without dev data)
  double dev_acc = 0.0;     // word accuracy on dev (NaN without dev data)
  double lr = 0.0;          // learning rate used during the epoch
};

struct Checkpoint {
  static constexpr std::uint32_t kFormatVersion = 1;

  TrainConfig config;
  Vocabulary source_vocab;
  Vocabulary target_vocab;
  std::unique_ptr<Seq2SeqModel> model;
  std::size_t epoch = 0;
  std::vector<EpochMetrics> history;
};

// Fresh model for `config` over the given vocabularies.
std::unique_ptr<Seq2SeqModel> build_model(const TrainConfig& config,
                                          std::size_t source_vocab,
                                          std::size_t target_vocab);
Checkpoint initialize(const TrainConfig& config, Vocabulary source_vocab,
                      Vocabulary target_vocab);

// Throws SizeError when a pair breaks the token-alignment invariant.
Example make_example(const Checkpoint& ckpt, const text::SentencePair& pair);

class Adam {
 public:
  explicit Adam(AdamConfig config) : config_(config) {}

  // One update from the accumulated grads; grads are left untouched.
  void step(std::span<ad::Parameter* const> params);
  double lr() const { return config_.lr; }
  void set_lr(double lr) { config_.lr = lr; }
  std::size_t steps() const { return t_; }

 private:
  AdamConfig config_;
  std::size_t t_ = 0;
  std::vector<ad::Tensor> m_;
  std::vector<ad::Tensor> v_;
};

// Rescales grads so their global L2 norm is at most max_norm. Returns the
// norm before clipping.
double clip_gradients(std::span<ad::Parameter* const> params, double max_norm);

// Called after each epoch; returning false stops training.
using EpochCallback = std::function<bool(const EpochMetrics&, Checkpoint&)>;

// Trains on split.train, tracking split.dev. Batches group pairs of equal
// source and target length. Throws DivergenceError on a non-finite loss.
Checkpoint train(const TrainConfig& config, const text::DatasetSplit& split,
                 const EpochCallback& on_epoch = {});

// One optimizer step on one batch; returns the batch loss.
double train_step(Checkpoint& ckpt, Adam& optimizer, std::span<const Example> batch);

struct DecodeOptions {
  std::size_t beam_width = 0;  // 0 or 1: greedy
};

struct Restoration {
  text::Sentence output;
  // One row per emitted token (EOS excluded), one column per source token.
  std::vector<std::vector<double>> attention;
  bool aligned() const;
  std::size_t source_length = 0;
};

// Decodes until EOS or 2 * T_x + 5 tokens. Ties in the argmax go to the
// lowest vocabulary index. UNK outputs copy a source token: the argmax
// attention column for recurrent models, position i for the transformer.
// Throws SizeError on an empty source.
Restoration restore(Checkpoint& ckpt, const text::Sentence& source,
                    const DecodeOptions& options = {});

// Exact token matches over max(|prediction|, |target|) positions per
// sentence. Throws UndefinedMetricError when there are no target tokens.
double accuracy(std::span<const text::Sentence> predictions,
                std::span<const text::Sentence> targets);

// Sum over pairs of teacher-forced -log p(gold) including EOS.
struct NllTotals {
  double nll = 0.0;
  std::size_t tokens = 0;
  std::size_t sentences = 0;
};
NllTotals corpus_nll(Checkpoint& ckpt, const text::ParallelCorpus& corpus);

// exp(mean per-token negative log-likelihood, EOS included).
double prediction_perplexity(Checkpoint& ckpt, const text::ParallelCorpus& corpus);

// Teacher-forced loss of one pair (N = 1).
double forward_loss(Checkpoint& ckpt, const text::SentencePair& pair);

// Teacher-forced attention for a pair: T_y rows by T_x columns.
std::vector<std::vector<double>> attention_matrix(Checkpoint& ckpt,
                                                  const text::SentencePair& pair);

// CSV: header row of source tokens, then one row per target token with
// weights printed to 6 decimals.
void export_attention(Checkpoint& ckpt, const text::SentencePair& pair,
                      std::ostream& out);
void write_attention_csv(const text::Sentence& source, const text::Sentence& target,
                         const std::vector<std::vector<double>>& rows, std::ostream& out);

struct Evaluation {
  double accuracy = 0.0;
  double perplexity = 0.0;
  std::vector<text::Sentence> predictions;
};

// Restores every source (fanning out over `threads` workers) and scores
// against the targets.
Evaluation evaluate(Checkpoint& ckpt, const text::ParallelCorpus& corpus,
                    const DecodeOptions& options = {}, std::size_t threads = 1);

// TSV with header epoch, train_loss, dev_loss, dev_acc, lr.
void write_metrics(std::span<const EpochMetrics> history, std::ostream& out);

// <path> holds the parameters; <path>.json holds config, vocabularies and
// training metadata.
void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);
std::filesystem::path sidecar_path(const std::filesystem::path& path);

}  // namespace adr::harness
