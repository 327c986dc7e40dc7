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

// Corpus preparation: Unicode normalization, diacritic stripping,
// tokenization, sentence splitting and train/dev/test splitting.

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace adr::text {

// Unicode helpers. All take and return UTF-8 and throw EncodingError on
// malformed input.
std::u32string decode_utf8(std::string_view utf8);
std::string encode_utf8(std::u32string_view codepoints);
bool is_valid_utf8(std::string_view utf8);
std::string nfc(std::string_view utf8);
std::string nfd(std::string_view utf8);
std::string to_lower(std::string_view utf8);

// True when the NFD form of `utf8` holds at least one Mn codepoint.
bool has_diacritic(std::string_view utf8);

// NFC(NFD(text) without general-category Mn codepoints).
std::string strip_diacritics(std::string_view text);

// One row of the character table: the accented forms of a base letter.
struct AlphabetRow {
  char32_t base;
  std::vector<std::string> diacritized;  // NFC strings, one character each
};

struct YorubaAlphabet {
  std::set<char32_t> base_characters;
  std::set<char32_t> combining_marks;
  std::vector<AlphabetRow> table;
};

const YorubaAlphabet& yoruba_alphabet();

struct Sentence {
  std::vector<std::string> tokens;

  bool operator==(const Sentence&) const = default;
  std::size_t size() const { return tokens.size(); }
  std::string joined() const;  // space separated
};

struct SentencePair {
  Sentence source;
  Sentence target;

  bool operator==(const SentencePair&) const = default;
};

struct ParallelCorpus {
  std::vector<SentencePair> pairs;

  std::size_t size() const { return pairs.size(); }
  bool empty() const { return pairs.empty(); }
  std::vector<Sentence> sources() const;
  std::vector<Sentence> targets() const;
};

struct DatasetSplit {
  ParallelCorpus train;
  ParallelCorpus dev;
  ParallelCorpus test;
  std::uint64_t seed = 0;
  std::array<double, 3> ratios{0.8, 0.1, 0.1};
};

using PunctSet = std::set<char32_t>;

// ASCII punctuation plus typographic quotes, dashes and the ellipsis.
const PunctSet& default_punctuation();
PunctSet punctuation_from_string(std::string_view utf8_chars);

// Lowercases, NFC-normalizes, removes `punct` and splits on whitespace runs.
// Returns nullopt when nothing but whitespace or punctuation remains.
std::optional<Sentence> normalize_and_tokenize(std::string_view text,
                                               const PunctSet& punct);

// Splits each line after every full stop, trims whitespace and drops empty
// segments (including ones holding only the full stop).
std::vector<std::string> split_sentences(std::span<const std::string> lines);

// Pairs each sentence with its token-wise stripped source.
ParallelCorpus make_parallel(std::span<const Sentence> targets);

// Deterministic shuffle (SplitMix64 Fisher-Yates) then cut by ratios.
// Train and dev sizes are round(n * ratio); test takes the remainder.
DatasetSplit split_dataset(const ParallelCorpus& corpus, std::uint64_t seed,
                           std::array<double, 3> ratios = {0.8, 0.1, 0.1});

// Checks the parallel-corpus invariants; throws SizeError/EncodingError.
void validate_parallel(const ParallelCorpus& corpus);

inline constexpr std::size_t kMaxSentenceTokens = 64;

struct PrepareOptions {
  PunctSet punct = default_punctuation();
  std::size_t max_tokens = kMaxSentenceTokens;
};

struct PrepareReport {
  ParallelCorpus corpus;
  std::size_t raw_sentences = 0;
  std::size_t dropped_empty = 0;
  std::size_t dropped_long = 0;
};

// split_sentences -> normalize_and_tokenize -> length filter -> make_parallel.
PrepareReport prepare_corpus(std::span<const std::string> lines,
                             const PrepareOptions& options = {});

// File helpers. Lines are read without their terminators; a UTF-8 BOM on the
// first line is dropped.
std::vector<std::string> read_lines(const std::filesystem::path& path);
void write_lines(const std::filesystem::path& path,
                 std::span<const std::string> lines);

// Reads whitespace-tokenized parallel files line by line.
ParallelCorpus read_parallel(const std::filesystem::path& src,
                             const std::filesystem::path& tgt);
std::vector<Sentence> read_sentences(const std::filesystem::path& path);
void write_parallel(const ParallelCorpus& corpus,
                    const std::filesystem::path& src,
                    const std::filesystem::path& tgt);

// Writes <dir>/<prefix>.{train,dev,test}.{src,tgt}, or
// <dir>/{train,dev,test}.{src,tgt} when prefix is empty. Returns the paths.
std::vector<std::filesystem::path> write_split(
    const DatasetSplit& split, const std::filesystem::path& dir,
    const std::string& prefix = "");

}  // namespace adr::text
