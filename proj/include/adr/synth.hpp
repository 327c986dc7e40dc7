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

// Synthetic parallel corpora with controllable ambiguity.
//
// Every target sentence is a sequence of lexicon words; the source side is
// the same sequence with diacritics stripped. A type with several diacritic
// forms only ever appears directly after a trigger word, and the trigger
// determines the form. Context therefore resolves all ambiguity while a
// unigram model cannot.

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "adr/text.hpp"

namespace adr::synth {

struct SynthConfig {
  // Forms with pairwise distinct undiacritized keys.
  std::vector<std::string> plain;
  // One entry per ambiguous type: its distinct forms, all sharing one key
  // that no plain word uses.
  std::vector<std::vector<std::string>> ambiguous;
  // Share of occurrences taken by the first form of each ambiguous type.
  // 0 draws forms uniformly.
  double majority_share = 0.0;
  // Chance that the next slot holds a trigger followed by an ambiguous word.
  double ambiguous_rate = 0.3;
  std::size_t min_length = 4;
  std::size_t max_length = 10;

  // Throws ConfigError on key collisions, too few triggers, or bad ranges.
  void validate() const;
};

// Yorùbá lexicon: 28 unambiguous words and 7 ambiguous types with 2 or 3
// forms each.
SynthConfig default_config();

// Index of the form of ambiguous type `a` selected by plain word `w`.
std::size_t trigger_form(const SynthConfig& config, std::size_t w, std::size_t a);

struct ExpectedStats {
  double pct_types_ambiguous = 0.0;
  double lexdif = 0.0;
  std::size_t vocab_src = 0;
  std::size_t vocab_tgt = 0;
};

// Closed-form type statistics, exact once every form has been sampled.
ExpectedStats expected_stats(const SynthConfig& config);

text::ParallelCorpus generate(const SynthConfig& config, std::size_t sentences,
                              std::uint64_t seed);

}  // namespace adr::synth
