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

#include "adr/synth.hpp"

#include <algorithm>
#include <set>

#include "adr/error.hpp"
#include "adr/rng.hpp"

namespace adr::synth {

void SynthConfig::validate() const {
  if (plain.empty()) throw ConfigError("synthetic lexicon needs plain words");
  if (min_length < 2 || max_length < min_length) {
    throw ConfigError("sentence lengths must satisfy 2 <= min <= max");
  }
  if (!(majority_share >= 0.0 && majority_share <= 1.0)) {
    throw ConfigError("majority_share must lie in [0, 1]");
  }
  if (!(ambiguous_rate >= 0.0 && ambiguous_rate <= 1.0)) {
    throw ConfigError("ambiguous_rate must lie in [0, 1]");
  }
  std::set<std::string> keys;
  for (const auto& w : plain) {
    if (!keys.insert(text::strip_diacritics(text::nfc(w))).second) {
      throw ConfigError("plain words share the key of " + w);
    }
  }
  for (const auto& forms : ambiguous) {
    if (forms.size() < 2) throw ConfigError("ambiguous types need at least two forms");
    if (forms.size() > plain.size()) {
      throw ConfigError("not enough plain words to trigger every form");
    }
    const std::string key = text::strip_diacritics(text::nfc(forms[0]));
    std::set<std::string> distinct;
    for (const auto& f : forms) {
      if (text::strip_diacritics(text::nfc(f)) != key) {
        throw ConfigError("forms of one ambiguous type must share a key: " + f);
      }
      if (!distinct.insert(text::nfc(f)).second) throw ConfigError("duplicate form " + f);
    }
    if (!keys.insert(key).second) throw ConfigError("key collision on " + key);
  }
}

SynthConfig default_config() {
  SynthConfig c;
  c.plain = {"èmi",  "ni",   "òye",  "jù",    "àwọn", "àgbà", "lọ",    "nítorí",
             "mo",   "ẹ̀kọ́",  "rẹ",   "yóò",   "ojú",  "mi",   "ilé",   "júdà",
             "bí",   "ìjì",  "ti",   "fẹ́",    "èéfín", "kí",  "wọn",   "òun",
             "kò",   "ìní",  "sílẹ̀", "ìwé"};
  c.ambiguous = {
      {"sì", "sí"},
      {"gbà", "gba", "gbá"},
      {"mú", "mù", "mu"},
      {"ìlú", "ilu", "ìlù"},
      {"esé", "èsè", "ẹsẹ̀"},
      {"ọkọ́", "ọ̀kọ̀", "ọkọ̀"},
      {"sá", "ṣá", "ṣà"},
  };
  return c;
}

std::size_t trigger_form(const SynthConfig& config, std::size_t w, std::size_t a) {
  return (w + a) % config.ambiguous.at(a).size();
}

ExpectedStats expected_stats(const SynthConfig& config) {
  config.validate();
  ExpectedStats s;
  s.vocab_src = config.plain.size() + config.ambiguous.size();
  s.vocab_tgt = config.plain.size();
  for (const auto& forms : config.ambiguous) s.vocab_tgt += forms.size();
  s.pct_types_ambiguous = 100.0 * static_cast<double>(config.ambiguous.size()) /
                          static_cast<double>(s.vocab_src);
  s.lexdif = static_cast<double>(s.vocab_tgt) / static_cast<double>(s.vocab_src);
  return s;
}

text::ParallelCorpus generate(const SynthConfig& config, std::size_t sentences,
                              std::uint64_t seed) {
  config.validate();
  std::vector<std::string> plain;
  for (const auto& w : config.plain) plain.push_back(text::nfc(w));
  std::vector<std::vector<std::string>> ambiguous;
  for (const auto& forms : config.ambiguous) {
    auto& out = ambiguous.emplace_back();
    for (const auto& f : forms) out.push_back(text::nfc(f));
  }

  SplitMix64 rng(seed);
  auto pick_form = [&](std::size_t k) -> std::size_t {
    if (config.majority_share <= 0.0) return rng.below(k);
    if (rng.uniform() < config.majority_share) return 0;
    return 1 + rng.below(k - 1);
  };

  text::ParallelCorpus corpus;
  for (std::size_t n = 0; n < sentences; ++n) {
    const std::size_t length =
        config.min_length + rng.below(config.max_length - config.min_length + 1);
    text::Sentence target;
    while (target.size() < length) {
      const bool pair_fits = length - target.size() >= 2 && !ambiguous.empty();
      if (pair_fits && rng.uniform() < config.ambiguous_rate) {
        const std::size_t a = rng.below(ambiguous.size());
        const std::size_t f = pick_form(ambiguous[a].size());
        std::vector<std::size_t> triggers;
        for (std::size_t w = 0; w < plain.size(); ++w) {
          if (trigger_form(config, w, a) == f) triggers.push_back(w);
        }
        target.tokens.push_back(plain[triggers[rng.below(triggers.size())]]);
        target.tokens.push_back(ambiguous[a][f]);
      } else {
        target.tokens.push_back(plain[rng.below(plain.size())]);
      }
    }
    text::Sentence source;
    for (const auto& t : target.tokens) source.tokens.push_back(text::strip_diacritics(t));
    corpus.pairs.push_back({std::move(source), std::move(target)});
  }
  return corpus;
}

}  // namespace adr::synth
