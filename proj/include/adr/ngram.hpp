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

// Interpolated n-gram language model and lexicon-lookup restoration
// baselines.

#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "adr/metrics.hpp"
#include "adr/text.hpp"

namespace adr::ngram {

inline const std::string kUnk = "<unk>";
inline const std::string kBos = "<s>";
inline const std::string kEos = "</s>";

using Context = std::vector<std::string>;
using TokenCounts = std::map<std::string, std::size_t>;

// p(w | h) = sum_k weight[k-1] * P_k(w | last k-1 tokens of h), where P_1 is
// the add-one unigram over vocab + {UNK, EOS} and P_k for k > 1 is the
// maximum-likelihood estimate, or P_{k-1} when its context was never seen.
// Each P_k is a distribution, so the mixture is one too.
class NgramLM {
 public:
  NgramLM() = default;

  // `counts[k-1]` holds the order-k table keyed by its (k-1)-token context.
  // Throws ConfigError when order/weights are inconsistent.
  static NgramLM from_counts(std::size_t order, std::set<std::string> vocab,
                             std::vector<std::map<Context, TokenCounts>> counts,
                             std::vector<double> weights);

  std::size_t order() const { return order_; }
  const std::vector<double>& weights() const { return weights_; }
  const std::set<std::string>& vocab() const { return vocab_; }
  const std::map<Context, TokenCounts>& counts(std::size_t k) const {
    return counts_.at(k - 1);
  }

  // Maps out-of-vocabulary words to UNK; BOS and EOS pass through.
  const std::string& map_token(const std::string& token) const;

  // Conditional probability of `token` after `history` (most recent last).
  // History shorter than order-1 is padded with BOS.
  double prob(const std::string& token, std::span<const std::string> history) const;

  // Every outcome the model normalizes over: vocab, UNK and EOS.
  std::vector<std::string> outcomes() const;

  void save(const std::filesystem::path& path) const;
  static NgramLM load(const std::filesystem::path& path);

 private:
  double level_prob(std::size_t k, const std::string& token,
                    std::span<const std::string> history) const;

  std::size_t order_ = 0;
  std::set<std::string> vocab_;
  std::vector<std::map<Context, TokenCounts>> counts_;
  std::vector<std::map<Context, std::size_t>> context_totals_;
  std::vector<double> weights_;
  std::size_t unigram_total_ = 0;
};

// Default weights, lowest order first: {1}, {0.3, 0.7}, {0.1, 0.3, 0.6}.
std::vector<double> default_weights(std::size_t order);

NgramLM train_lm(std::span<const text::Sentence> corpus, std::size_t order,
                 std::vector<double> weights = {});

// exp(-(sum log p) / tokens), EOS counted once per sentence.
double perplexity(const NgramLM& lm, std::span<const text::Sentence> corpus);

// Most frequent form per token; ties go to the smallest form in codepoint
// order; unknown tokens are copied.
text::Sentence restore_unigram(const metrics::Lexicon& lexicon,
                               const text::Sentence& source);

// Greedy left to right: each token takes the candidate maximizing
// p(candidate | previous chosen token). Throws SizeError on an empty
// sentence.
text::Sentence restore_bigram(const metrics::Lexicon& lexicon,
                              const NgramLM& lm, const text::Sentence& source);

}  // namespace adr::ngram
