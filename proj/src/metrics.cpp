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

#include "adr/metrics.hpp"

#include <fstream>
#include <iomanip>
#include <ostream>
#include <set>
#include <sstream>

#include "adr/error.hpp"

namespace adr::metrics {

std::size_t Lexicon::total_count() const {
  std::size_t n = 0;
  for (const auto& [type, forms] : entries) {
    for (const auto& [form, count] : forms) n += count;
  }
  return n;
}

const FormCounts* Lexicon::find(const std::string& source_type) const {
  auto it = entries.find(source_type);
  return it == entries.end() ? nullptr : &it->second;
}

Lexicon build_lexicon(const text::ParallelCorpus& corpus) {
  Lexicon lex;
  for (const auto& pair : corpus.pairs) {
    if (pair.source.size() != pair.target.size()) {
      throw SizeError("misaligned pair while building lexicon");
    }
    for (std::size_t i = 0; i < pair.source.size(); ++i) {
      ++lex.entries[pair.source.tokens[i]][pair.target.tokens[i]];
    }
  }
  return lex;
}

double lexdif(const Lexicon& lexicon, bool frequency_weighted) {
  if (lexicon.empty()) {
    throw UndefinedMetricError("lexdif of an empty lexicon");
  }
  double num = 0.0;
  double den = 0.0;
  for (const auto& [type, forms] : lexicon.entries) {
    const double distinct = static_cast<double>(forms.size());
    if (frequency_weighted) {
      std::size_t n = 0;
      for (const auto& [form, count] : forms) n += count;
      num += distinct * static_cast<double>(n);
      den += static_cast<double>(n);
    } else {
      num += distinct;
      den += 1.0;
    }
  }
  return num / den;
}

CorpusStats corpus_stats(const text::ParallelCorpus& corpus,
                         bool frequency_weighted_lexdif) {
  const Lexicon lex = build_lexicon(corpus);
  if (lex.empty()) {
    throw UndefinedMetricError("corpus statistics of an empty corpus");
  }
  CorpusStats stats;
  std::set<std::string> tgt_types;
  std::size_t diacritized = 0;
  for (const auto& [type, forms] : lex.entries) {
    for (const auto& [form, count] : forms) {
      tgt_types.insert(form);
      stats.tokens += count;
      if (text::has_diacritic(form)) diacritized += count;
    }
  }
  std::size_t ambiguous = 0;
  for (const auto& [type, forms] : lex.entries) {
    if (forms.size() >= 2) ++ambiguous;
  }
  stats.pct_tokens_diacritized =
      100.0 * static_cast<double>(diacritized) / static_cast<double>(stats.tokens);
  stats.pct_types_ambiguous =
      100.0 * static_cast<double>(ambiguous) / static_cast<double>(lex.size());
  stats.lexdif = lexdif(lex, frequency_weighted_lexdif);
  stats.vocab_src = lex.size();
  stats.vocab_tgt = tgt_types.size();
  return stats;
}

void write_lexicon_tsv(const Lexicon& lexicon, std::ostream& out) {
  for (const auto& [type, forms] : lexicon.entries) {
    for (const auto& [form, count] : forms) {
      out << type << '\t' << form << '\t' << count << '\n';
    }
  }
}

void write_lexicon_tsv(const Lexicon& lexicon,
                       const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw SizeError("cannot write " + path.string());
  write_lexicon_tsv(lexicon, out);
}

Lexicon read_lexicon_tsv(const std::filesystem::path& path) {
  Lexicon lex;
  std::size_t line_no = 0;
  for (const auto& line : text::read_lines(path)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string type;
    std::string form;
    std::size_t count = 0;
    if (!std::getline(ss, type, '\t') || !std::getline(ss, form, '\t') ||
        !(ss >> count) || count == 0) {
      throw SizeError(path.string() + ":" + std::to_string(line_no) +
                      ": expected source_type<TAB>form<TAB>count");
    }
    lex.entries[text::nfc(type)][text::nfc(form)] += count;
  }
  return lex;
}

void write_stats(const CorpusStats& stats, std::ostream& out) {
  out << std::setprecision(10);
  out << "tokens=" << stats.tokens << '\n'
      << "pct_diacritized=" << stats.pct_tokens_diacritized << '\n'
      << "pct_ambiguous=" << stats.pct_types_ambiguous << '\n'
      << "lexdif=" << stats.lexdif << '\n'
      << "vocab_src=" << stats.vocab_src << '\n'
      << "vocab_tgt=" << stats.vocab_tgt << '\n';
}

}  // namespace adr::metrics
