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

// Ambiguity statistics over parallel corpora.

#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>

#include "adr/text.hpp"

namespace adr::metrics {

// diacritized form -> occurrences
using FormCounts = std::map<std::string, std::size_t>;

// Undiacritized type -> counted diacritized forms. std::map keeps keys in
// UTF-8 byte order, which is codepoint order.
struct Lexicon {
  std::map<std::string, FormCounts> entries;

  bool empty() const { return entries.empty(); }
  std::size_t size() const { return entries.size(); }
  std::size_t total_count() const;
  const FormCounts* find(const std::string& source_type) const;
};

struct CorpusStats {
  double pct_tokens_diacritized = 0.0;
  double pct_types_ambiguous = 0.0;
  double lexdif = 1.0;
  std::size_t vocab_src = 0;
  std::size_t vocab_tgt = 0;
  std::size_t tokens = 0;
};

Lexicon build_lexicon(const text::ParallelCorpus& corpus);

// Mean number of distinct forms per undiacritized type. The weighted variant
// averages over tokens instead of types. Throws UndefinedMetricError on an
// empty lexicon.
double lexdif(const Lexicon& lexicon, bool frequency_weighted = false);

CorpusStats corpus_stats(const text::ParallelCorpus& corpus,
                         bool frequency_weighted_lexdif = false);

// TSV rows: source_type <TAB> form <TAB> count.
void write_lexicon_tsv(const Lexicon& lexicon, std::ostream& out);
void write_lexicon_tsv(const Lexicon& lexicon,
                       const std::filesystem::path& path);
Lexicon read_lexicon_tsv(const std::filesystem::path& path);

// key=value lines.
void write_stats(const CorpusStats& stats, std::ostream& out);

}  // namespace adr::metrics
