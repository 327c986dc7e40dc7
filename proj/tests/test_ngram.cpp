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

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <functional>

#include "adr/error.hpp"
#include "adr/metrics.hpp"
#include "adr/ngram.hpp"
#include "support.hpp"

namespace {

using namespace adr::ngram;
using adr::text::Sentence;
using testing_support::sentence;

std::vector<Sentence> sentences(std::initializer_list<std::vector<std::string>> items) {
  std::vector<Sentence> out;
  for (const auto& s : items) out.push_back(sentence(s));
  return out;
}

double outcome_mass(const NgramLM& lm, const std::vector<std::string>& history) {
  double total = 0.0;
  for (const auto& w : lm.outcomes()) total += lm.prob(w, history);
  return total;
}

TEST(NgramLM, UnigramSmoothingIsSymmetric) {
  const auto lm = train_lm(sentences({{"a", "b"}}), 1);
  EXPECT_DOUBLE_EQ(lm.prob("a", {}), lm.prob("b", {}));
  // a, b, </s> counted once each over 4 outcomes.
  EXPECT_DOUBLE_EQ(lm.prob("a", {}), 2.0 / 7.0);
  EXPECT_DOUBLE_EQ(lm.prob(kUnk, {}), 1.0 / 7.0);
}

TEST(NgramLM, BigramCount) {
  const auto lm = train_lm(sentences({{"a", "a"}}), 2);
  EXPECT_EQ(lm.counts(2).at(Context{"a"}).at("a"), 1u);
  EXPECT_EQ(lm.counts(2).at(Context{kBos}).at("a"), 1u);
  EXPECT_EQ(lm.counts(2).at(Context{"a"}).at(kEos), 1u);
}

TEST(NgramLM, EveryConditionalSumsToOne) {
  const auto corpus = sentences({{"èmi", "ni", "òye"},
                                 {"mo", "gba", "ẹ̀kọ́"},
                                 {"èmi", "gba"},
                                 {"ni", "ni", "ni"},
                                 {"òye", "mo"}});
  for (std::size_t order = 1; order <= 3; ++order) {
    const auto lm = train_lm(corpus, order);
    std::vector<std::string> symbols = lm.outcomes();
    symbols.push_back(kBos);
    symbols.push_back("unseen");
    std::function<void(std::vector<std::string>)> walk = [&](std::vector<std::string> h) {
      EXPECT_NEAR(outcome_mass(lm, h), 1.0, 1e-9);
      if (h.size() + 1 >= order) return;
      for (const auto& s : symbols) {
        auto next = h;
        next.push_back(s);
        walk(next);
      }
    };
    walk({});
  }
}

TEST(NgramLM, Errors) {
  EXPECT_THROW(train_lm({}, 2), adr::SizeError);
  EXPECT_THROW(train_lm(sentences({{"a"}}), 0), adr::ConfigError);
  EXPECT_THROW(train_lm(sentences({{"a"}}), 4), adr::ConfigError);
  EXPECT_THROW(train_lm(sentences({{"a"}}), 2, {0.5, 0.6}), adr::ConfigError);
  EXPECT_THROW(train_lm(sentences({{"a"}}), 2, {1.0}), adr::ConfigError);
  EXPECT_THROW(train_lm(sentences({{"a"}}), 2, {-0.5, 1.5}), adr::ConfigError);
}

TEST(Perplexity, UniformModelGivesOutcomeCount) {
  const auto lm = NgramLM::from_counts(1, {"a", "b", "c"}, {{}}, {1.0});
  EXPECT_NEAR(perplexity(lm, sentences({{"a", "c", "zz"}, {"b"}})), 5.0, 1e-12);
}

TEST(Perplexity, CertainModelGivesOne) {
  const auto lm = train_lm(sentences({{"a"}}), 2, {0.0, 1.0});
  EXPECT_NEAR(perplexity(lm, sentences({{"a"}, {"a"}})), 1.0, 1e-12);
}

TEST(Perplexity, HandComputedUnigram) {
  // Counts a:2 b:1 </s>:2, total 5, 4 outcomes: p(a)=3/9 p(b)=2/9
  // p(</s>)=3/9 p(<unk>)=1/9.
  const auto lm = train_lm(sentences({{"a", "b"}, {"a"}}), 1);
  const double log_sum = 6.0 * std::log(3.0 / 9.0) + std::log(2.0 / 9.0) + std::log(1.0 / 9.0);
  const double expected = std::exp(-log_sum / 8.0);
  EXPECT_NEAR(perplexity(lm, sentences({{"a"}, {"b", "c"}, {"a", "a"}})), expected, 1e-9);
}

TEST(Perplexity, IncludesEosAndIsOrderInvariant) {
  const auto train = sentences({{"a", "b"}, {"b", "a", "a"}, {"c"}});
  const auto lm = train_lm(train, 3);
  const auto test = sentences({{"a", "b", "c"}, {"b"}, {"q", "a"}});
  const auto reversed = sentences({{"q", "a"}, {"b"}, {"a", "b", "c"}});
  EXPECT_NEAR(perplexity(lm, test), perplexity(lm, reversed), 1e-12);
}

TEST(Perplexity, EmptyCorpusUndefined) {
  const auto lm = train_lm(sentences({{"a"}}), 1);
  EXPECT_THROW(perplexity(lm, {}), adr::UndefinedMetricError);
}

TEST(Perplexity, MatchesBruteForceOracle) {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const auto raw = testing_support::random_corpus(seed, 400, 15);
    std::vector<std::vector<std::string>> train_raw, test_raw;
    std::vector<Sentence> train, test;
    for (std::size_t i = 0; i < raw.size(); ++i) {
      auto& dst_raw = i % 4 == 3 ? test_raw : train_raw;
      auto& dst = i % 4 == 3 ? test : train;
      dst_raw.push_back(raw[i].source);
      dst.push_back(sentence(raw[i].source));
    }
    if (test.empty()) {
      test_raw.push_back({"zzz", train_raw[0][0]});
      test.push_back(sentence(test_raw.back()));
    }
    for (std::size_t order = 1; order <= 3; ++order) {
      const auto w = default_weights(order);
      const auto lm = train_lm(train, order);
      const oracle::NgramOracle ref(train_raw, order, w);
      EXPECT_NEAR(perplexity(lm, test), ref.perplexity(test_raw), 1e-9)
          << "seed " << seed << " order " << order;
    }
  }
}

TEST(NgramLM, SaveLoadRoundTrip) {
  const auto dir = testing_support::temp_dir("ngram");
  const auto lm = train_lm(sentences({{"èmi", "ni"}, {"ni", "òye", "ni"}}), 3, {0.2, 0.3, 0.5});
  lm.save(dir / "lm.tsv");
  const auto back = NgramLM::load(dir / "lm.tsv");
  EXPECT_EQ(back.order(), 3u);
  EXPECT_EQ(back.weights(), lm.weights());
  EXPECT_EQ(back.vocab(), lm.vocab());
  for (std::size_t k = 1; k <= 3; ++k) EXPECT_EQ(back.counts(k), lm.counts(k));
  const auto test = sentences({{"ni", "èmi", "x"}});
  EXPECT_EQ(perplexity(back, test), perplexity(lm, test));
}

TEST(NgramLM, LoadRejectsGarbage) {
  const auto dir = testing_support::temp_dir("ngram_bad");
  std::ofstream(dir / "bad.tsv") << "hello\n";
  EXPECT_THROW(NgramLM::load(dir / "bad.tsv"), adr::Error);
}

adr::metrics::Lexicon lexicon(
    std::initializer_list<std::pair<const std::string, adr::metrics::FormCounts>> e) {
  adr::metrics::Lexicon lex;
  lex.entries = e;
  return lex;
}

TEST(RestoreUnigram, MostFrequentForm) {
  const auto lex = lexicon({{"mu", {{"mú", 3}, {"mù", 1}}}});
  EXPECT_EQ(restore_unigram(lex, sentence({"mu"})).tokens, std::vector<std::string>{"mú"});
}

TEST(RestoreUnigram, UnknownCopied) {
  const auto lex = lexicon({{"mu", {{"mú", 3}}}});
  EXPECT_EQ(restore_unigram(lex, sentence({"zzz"})).tokens, std::vector<std::string>{"zzz"});
}

TEST(RestoreUnigram, TieGoesToSmallestCodepoint) {
  const auto lex = lexicon({{"mu", {{"mú", 1}, {"mù", 1}}}});
  // U+00F9 (ù) precedes U+00FA (ú).
  ASSERT_LT(U'ù', U'ú');
  EXPECT_EQ(restore_unigram(lex, sentence({"mu"})).tokens, std::vector<std::string>{"mù"});
}

TEST(RestoreUnigram, OutputStripsBackToSource) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto corpus = testing_support::to_library(testing_support::random_corpus(seed, 300));
    const auto lex = adr::metrics::build_lexicon(corpus);
    for (const auto& p : corpus.pairs) {
      const auto out = restore_unigram(lex, p.source);
      ASSERT_EQ(out.size(), p.source.size());
      for (std::size_t i = 0; i < out.size(); ++i) {
        EXPECT_EQ(adr::text::strip_diacritics(out.tokens[i]), p.source.tokens[i]);
      }
    }
  }
}

TEST(RestoreBigram, SingleCandidatesIgnoreModel) {
  const auto lex = lexicon({{"emi", {{"èmi", 2}}}, {"oye", {{"òye", 1}}}});
  const auto lm = train_lm(sentences({{"x", "y"}}), 2);
  EXPECT_EQ(restore_bigram(lex, lm, sentence({"emi", "oye", "q"})).tokens,
            (std::vector<std::string>{"èmi", "òye", "q"}));
}

TEST(RestoreBigram, ContextFlipsAmbiguousChoice) {
  // "si" is usually sì, but after "mo" the bigram model prefers sí.
  const auto targets = sentences({{"mo", "sí", "ilé"},
                                  {"mo", "sí", "oko"},
                                  {"sì", "ilé"},
                                  {"sì", "oko"},
                                  {"oko", "sì"}});
  adr::text::ParallelCorpus corpus = adr::text::make_parallel(targets);
  const auto lex = adr::metrics::build_lexicon(corpus);
  const auto lm = train_lm(targets, 2);
  const Sentence source = sentence({"mo", "si", "ile"});
  const auto uni = restore_unigram(lex, source);
  const auto bi = restore_bigram(lex, lm, source);
  EXPECT_EQ(uni.tokens, (std::vector<std::string>{"mo", "sì", "ilé"}));
  EXPECT_EQ(bi.tokens, (std::vector<std::string>{"mo", "sí", "ilé"}));

  // Exhaustive search over candidate sequences agrees with the greedy pick.
  std::vector<std::vector<std::string>> cands;
  for (const auto& t : source.tokens) {
    std::vector<std::string> c;
    for (const auto& [form, n] : lex.entries.at(t)) c.push_back(form);
    cands.push_back(c);
  }
  double best = -1e300;
  std::vector<std::string> best_seq;
  std::vector<std::string> seq;
  std::function<void(std::size_t, double)> search = [&](std::size_t i, double logp) {
    if (i == cands.size()) {
      if (logp > best) {
        best = logp;
        best_seq = seq;
      }
      return;
    }
    for (const auto& c : cands[i]) {
      const double p = std::log(lm.prob(c, seq));
      seq.push_back(c);
      search(i + 1, logp + p);
      seq.pop_back();
    }
  };
  search(0, 0.0);
  EXPECT_EQ(bi.tokens, best_seq);
  std::size_t differing = 0;
  for (std::size_t i = 0; i < uni.size(); ++i) differing += uni.tokens[i] != bi.tokens[i];
  EXPECT_EQ(differing, 1u);
  EXPECT_NE(uni.tokens[1], bi.tokens[1]);
}

TEST(RestoreBigram, EmptySentenceRejected) {
  const auto lm = train_lm(sentences({{"a"}}), 2);
  EXPECT_THROW(restore_bigram(adr::metrics::Lexicon{}, lm, Sentence{}), adr::SizeError);
}

TEST(Baselines, PerfectOnUnambiguousCorpora) {
  const auto targets = sentences({{"èmi", "ni", "òye"}, {"mo", "gba", "ẹ̀kọ́"}, {"ilé", "ni"}});
  const auto corpus = adr::text::make_parallel(targets);
  const auto lex = adr::metrics::build_lexicon(corpus);
  const auto lm = train_lm(targets, 2);
  for (const auto& p : corpus.pairs) {
    EXPECT_EQ(restore_unigram(lex, p.source), p.target);
    EXPECT_EQ(restore_bigram(lex, lm, p.source), p.target);
  }
}

}  // namespace
