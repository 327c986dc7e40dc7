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

// Shared fixtures for the unit and acceptance tests.

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "adr/rng.hpp"
#include "adr/text.hpp"
#include "oracle/oracle.hpp"

namespace testing_support {

// Yorùbá-like letters with the marks the alphabet allows on each base. Marks
// are listed in canonical order (dot below before tone marks).
struct LetterSpec {
  char base;
  std::vector<std::u32string> mark_options;  // "" means bare
};

inline const std::vector<LetterSpec>& letters() {
  static const std::vector<LetterSpec> specs = {
      {'a', {U"", U"\u0300", U"\u0301", U"\u030C"}},
      {'e', {U"", U"\u0300", U"\u0301", U"\u0323", U"\u0323\u0300", U"\u0323\u0301"}},
      {'i', {U"", U"\u0300", U"\u0301"}},
      {'o', {U"", U"\u0300", U"\u0301", U"\u0323", U"\u0323\u0300", U"\u0323\u0301", U"\u030C"}},
      {'u', {U"", U"\u0300", U"\u0301", U"\u030C"}},
      {'n', {U"", U"\u0300", U"\u0301", U"\u0304"}},
      {'s', {U"", U"\u0323"}},
      {'b', {U""}}, {'d', {U""}}, {'f', {U""}}, {'g', {U""}}, {'j', {U""}},
      {'k', {U""}}, {'l', {U""}}, {'m', {U""}}, {'r', {U""}}, {'t', {U""}},
      {'w', {U""}}, {'y', {U""}},
  };
  return specs;
}

// A decomposed random word of 1..max_letters letters.
inline std::string random_word(adr::SplitMix64& rng, std::size_t max_letters = 4,
                               double mark_rate = 0.5) {
  std::u32string w;
  const std::size_t n = 1 + rng.below(max_letters);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& spec = letters()[rng.below(letters().size())];
    w.push_back(static_cast<char32_t>(spec.base));
    if (spec.mark_options.size() > 1 && rng.uniform() < mark_rate) {
      w += spec.mark_options[1 + rng.below(spec.mark_options.size() - 1)];
    }
  }
  return oracle::encode(w);
}

// Random corpus drawn from a small word pool so types repeat and collide.
// Targets are decomposed; use to_library() before handing them to adr.
inline std::vector<oracle::Pair> random_corpus(std::uint64_t seed, std::size_t max_tokens,
                                               std::size_t pool_size = 30) {
  adr::SplitMix64 rng(seed);
  std::vector<std::string> pool;
  for (std::size_t i = 0; i < pool_size; ++i) pool.push_back(random_word(rng, 3));
  std::vector<oracle::Pair> corpus;
  std::size_t budget = 1 + rng.below(max_tokens);
  while (budget > 0) {
    const std::size_t len = std::min<std::size_t>(budget, 1 + rng.below(8));
    oracle::Pair p;
    for (std::size_t i = 0; i < len; ++i) {
      p.target.push_back(pool[rng.below(pool.size())]);
      p.source.push_back(oracle::drop_mn(p.target.back()));
    }
    budget -= len;
    corpus.push_back(std::move(p));
  }
  return corpus;
}

inline adr::text::ParallelCorpus to_library(const std::vector<oracle::Pair>& corpus) {
  adr::text::ParallelCorpus out;
  for (const auto& p : corpus) {
    adr::text::SentencePair sp;
    sp.source.tokens = p.source;
    for (const auto& t : p.target) sp.target.tokens.push_back(adr::text::nfc(t));
    out.pairs.push_back(std::move(sp));
  }
  return out;
}

inline adr::text::Sentence sentence(std::vector<std::string> tokens) {
  return adr::text::Sentence{std::move(tokens)};
}

// Fresh empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("adr_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace testing_support
