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

// Interface shared by the recurrent and self-attention encoder-decoders.

#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "adr/autodiff.hpp"

namespace adr {

// One training pair as vocabulary indices, without BOS/EOS.
struct Example {
  std::vector<std::size_t> source;
  std::vector<std::size_t> target;
};

struct StepOutput {
  std::vector<double> log_probs;  // over the target vocabulary
  std::vector<double> attention;  // over source positions, sums to 1
};

// Incremental greedy/beam decoding over one source sentence.
class DecodeSession {
 public:
  virtual ~DecodeSession() = default;
  // Feeds the previous output token (BOS first) and returns the next-token
  // distribution together with the attention row used for it.
  virtual StepOutput step(std::size_t previous_token) = 0;
  virtual std::unique_ptr<DecodeSession> clone() const = 0;
};

class Seq2SeqModel {
 public:
  virtual ~Seq2SeqModel() = default;

  virtual ad::ParameterStore& params() = 0;
  virtual const ad::ParameterStore& params() const = 0;
  virtual std::size_t source_vocab_size() const = 0;
  virtual std::size_t target_vocab_size() const = 0;

  // Decoder logits for each output position under teacher forcing: the
  // decoder reads BOS, y_1 .. y_T and row t scores y_{t+1} (EOS last).
  // Result is (T + 1) x target_vocab.
  virtual ad::Var teacher_forced_logits(ad::Tape& tape, const Example& example) = 0;

  // J = -(1/N) sum_n sum_t log p(y_t | y_<t, x) over the N examples, EOS
  // included. Implementations may require equal lengths within a batch.
  virtual ad::Var batch_loss(ad::Tape& tape, std::span<const Example> batch);

  virtual std::unique_ptr<DecodeSession> start(std::span<const std::size_t> source) = 0;
};

// Decoder output targets for an example: y_1 .. y_T, EOS.
std::vector<std::size_t> output_targets(const Example& example);

}  // namespace adr
