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

#include "adr/ngram.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "adr/error.hpp"

namespace adr::ngram {

namespace {

constexpr const char* kMagic = "#adr-ngram-lm";
constexpr int kFormatVersion = 1;

std::string join(const Context& ctx) {
  std::string out;
  for (std::size_t i = 0; i < ctx.size(); ++i) {
    if (i) out.push_back(' ');
    out += ctx[i];
  }
  return out;
}

Context split_ws(const std::string& s) {
  Context out;
  std::istringstream ss(s);
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

}  // namespace

std::vector<double> default_weights(std::size_t order) {
  switch (order) {
    case 1: return {1.0};
    case 2: return {0.3, 0.7};
    case 3: return {0.1, 0.3, 0.6};
    default: throw ConfigError("n-gram order must be in 1..3");
  }
}

NgramLM NgramLM::from_counts(std::size_t order, std::set<std::string> vocab,
                             std::vector<std::map<Context, TokenCounts>> counts,
                             std::vector<double> weights) {
  if (order < 1 || order > 3) throw ConfigError("n-gram order must be in 1..3");
  if (weights.empty()) weights = default_weights(order);
  if (weights.size() != order) {
    throw ConfigError("need one interpolation weight per order");
  }
  double sum = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw ConfigError("interpolation weights must be >= 0");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw ConfigError("interpolation weights must sum to 1");
  }
  counts.resize(order);

  NgramLM lm;
  lm.order_ = order;
  lm.vocab_ = std::move(vocab);
  lm.vocab_.erase(kUnk);
  lm.vocab_.erase(kBos);
  lm.vocab_.erase(kEos);
  lm.counts_ = std::move(counts);
  lm.weights_ = std::move(weights);
  lm.context_totals_.resize(order);
  for (std::size_t k = 0; k < order; ++k) {
    for (const auto& [ctx, tokens] : lm.counts_[k]) {
      if (ctx.size() != k) {
        throw ConfigError("order-" + std::to_string(k + 1) +
                          " context has wrong length");
      }
      std::size_t total = 0;
      for (const auto& [tok, c] : tokens) total += c;
      lm.context_totals_[k][ctx] = total;
    }
  }
  auto uni = lm.context_totals_[0].find(Context{});
  lm.unigram_total_ = uni == lm.context_totals_[0].end() ? 0 : uni->second;
  return lm;
}

const std::string& NgramLM::map_token(const std::string& token) const {
  if (token == kBos || token == kEos || vocab_.contains(token)) return token;
  return kUnk;
}

double NgramLM::level_prob(std::size_t k, const std::string& token,
                           std::span<const std::string> history) const {
  if (k == 1) {
    std::size_t c = 0;
    const auto& table = counts_[0];
    if (auto it = table.find(Context{}); it != table.end()) {
      if (auto jt = it->second.find(token); jt != it->second.end()) c = jt->second;
    }
    const double outcomes = static_cast<double>(vocab_.size() + 2);
    return (static_cast<double>(c) + 1.0) /
           (static_cast<double>(unigram_total_) + outcomes);
  }
  Context ctx(history.end() - static_cast<std::ptrdiff_t>(k - 1), history.end());
  const auto& totals = context_totals_[k - 1];
  auto t = totals.find(ctx);
  if (t == totals.end() || t->second == 0) {
    return level_prob(k - 1, token, history);
  }
  const auto& row = counts_[k - 1].at(ctx);
  auto c = row.find(token);
  const double count = c == row.end() ? 0.0 : static_cast<double>(c->second);
  return count / static_cast<double>(t->second);
}

double NgramLM::prob(const std::string& token,
                     std::span<const std::string> history) const {
  std::vector<std::string> padded;
  const std::size_t need = order_ - 1;
  padded.reserve(need);
  for (std::size_t i = history.size(); i < need; ++i) padded.push_back(kBos);
  const std::size_t from = history.size() > need ? history.size() - need : 0;
  for (std::size_t i = from; i < history.size(); ++i) {
    padded.push_back(map_token(history[i]));
  }
  const std::string& tok = map_token(token);
  double p = 0.0;
  for (std::size_t k = 1; k <= order_; ++k) {
    if (weights_[k - 1] == 0.0) continue;
    p += weights_[k - 1] * level_prob(k, tok, padded);
  }
  return p;
}

std::vector<std::string> NgramLM::outcomes() const {
  std::vector<std::string> out(vocab_.begin(), vocab_.end());
  out.push_back(kUnk);
  out.push_back(kEos);
  return out;
}

void NgramLM::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw SizeError("cannot write " + path.string());
  out.precision(17);
  out << kMagic << '\t' << kFormatVersion << '\n';
  out << "#order\t" << order_ << '\n';
  out << "#weights";
  for (double w : weights_) out << '\t' << w;
  out << '\n';
  out << "#vocab";
  for (const auto& v : vocab_) out << '\t' << v;
  out << '\n';
  for (std::size_t k = 0; k < order_; ++k) {
    for (const auto& [ctx, tokens] : counts_[k]) {
      for (const auto& [tok, c] : tokens) {
        out << (k + 1) << '\t' << join(ctx) << '\t' << tok << '\t' << c << '\n';
      }
    }
  }
}

NgramLM NgramLM::load(const std::filesystem::path& path) {
  const auto lines = text::read_lines(path);
  auto fail = [&](std::size_t line, const std::string& why) {
    return SizeError(path.string() + ":" + std::to_string(line + 1) + ": " + why);
  };
  if (lines.size() < 4) throw fail(0, "truncated language model file");
  {
    std::istringstream ss(lines[0]);
    std::string magic;
    int version = 0;
    ss >> magic >> version;
    if (magic != kMagic) throw fail(0, "not an adr n-gram file");
    if (version != kFormatVersion) {
      throw fail(0, "unsupported format version " + std::to_string(version));
    }
  }
  std::size_t order = 0;
  std::vector<double> weights;
  std::set<std::string> vocab;
  {
    std::istringstream ss(lines[1]);
    std::string key;
    ss >> key >> order;
    if (key != "#order") throw fail(1, "expected #order");
  }
  {
    std::istringstream ss(lines[2]);
    std::string key;
    ss >> key;
    if (key != "#weights") throw fail(2, "expected #weights");
    double w;
    while (ss >> w) weights.push_back(w);
  }
  {
    std::istringstream ss(lines[3]);
    std::string key;
    ss >> key;
    if (key != "#vocab") throw fail(3, "expected #vocab");
    std::string v;
    while (ss >> v) vocab.insert(v);
  }
  std::vector<std::map<Context, TokenCounts>> counts(order);
  for (std::size_t i = 4; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    std::vector<std::string> fields;
    std::istringstream ss(lines[i]);
    std::string f;
    while (std::getline(ss, f, '\t')) fields.push_back(f);
    if (fields.size() != 4) throw fail(i, "expected order, context, token, count");
    const std::size_t k = std::stoul(fields[0]);
    if (k < 1 || k > order) throw fail(i, "order out of range");
    counts[k - 1][split_ws(fields[1])][fields[2]] += std::stoul(fields[3]);
  }
  return from_counts(order, std::move(vocab), std::move(counts), std::move(weights));
}

NgramLM train_lm(std::span<const text::Sentence> corpus, std::size_t order,
                 std::vector<double> weights) {
  if (order < 1 || order > 3) throw ConfigError("n-gram order must be in 1..3");
  if (corpus.empty()) throw SizeError("cannot train a language model on no data");
  std::set<std::string> vocab;
  std::vector<std::map<Context, TokenCounts>> counts(order);
  for (const auto& sentence : corpus) {
    std::vector<std::string> seq(order - 1, kBos);
    for (const auto& t : sentence.tokens) {
      vocab.insert(t);
      seq.push_back(t);
    }
    seq.push_back(kEos);
    for (std::size_t i = order - 1; i < seq.size(); ++i) {
      for (std::size_t k = 1; k <= order; ++k) {
        Context ctx(seq.begin() + static_cast<std::ptrdiff_t>(i - (k - 1)),
                    seq.begin() + static_cast<std::ptrdiff_t>(i));
        ++counts[k - 1][ctx][seq[i]];
      }
    }
  }
  return NgramLM::from_counts(order, std::move(vocab), std::move(counts),
                              std::move(weights));
}

double perplexity(const NgramLM& lm, std::span<const text::Sentence> corpus) {
  double log_sum = 0.0;
  std::size_t n = 0;
  for (const auto& sentence : corpus) {
    std::vector<std::string> history;
    for (const auto& t : sentence.tokens) {
      log_sum += std::log(lm.prob(t, history));
      history.push_back(t);
      ++n;
    }
    log_sum += std::log(lm.prob(kEos, history));
    ++n;
  }
  if (n == 0) throw UndefinedMetricError("perplexity of an empty corpus");
  return std::exp(-log_sum / static_cast<double>(n));
}

text::Sentence restore_unigram(const metrics::Lexicon& lexicon,
                               const text::Sentence& source) {
  text::Sentence out;
  out.tokens.reserve(source.size());
  for (const auto& tok : source.tokens) {
    const auto* forms = lexicon.find(tok);
    if (!forms || forms->empty()) {
      out.tokens.push_back(tok);
      continue;
    }
    const std::string* best = nullptr;
    std::size_t best_count = 0;
    for (const auto& [form, count] : *forms) {
      if (!best || count > best_count) {
        best = &form;
        best_count = count;
      }
    }
    out.tokens.push_back(*best);
  }
  return out;
}

text::Sentence restore_bigram(const metrics::Lexicon& lexicon,
                              const NgramLM& lm, const text::Sentence& source) {
  if (source.tokens.empty()) {
    throw SizeError("cannot restore an empty sentence");
  }
  text::Sentence out;
  out.tokens.reserve(source.size());
  for (const auto& tok : source.tokens) {
    const auto* forms = lexicon.find(tok);
    if (!forms || forms->empty()) {
      out.tokens.push_back(tok);
      continue;
    }
    const std::string* best = nullptr;
    double best_p = -1.0;
    for (const auto& [form, count] : *forms) {
      const double p = lm.prob(form, out.tokens);
      if (p > best_p) {
        best = &form;
        best_p = p;
      }
    }
    out.tokens.push_back(*best);
  }
  return out;
}

}  // namespace adr::ngram
