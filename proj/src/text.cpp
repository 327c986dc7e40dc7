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

#include "adr/text.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include "adr/error.hpp"
#include "adr/rng.hpp"

namespace adr::text {

namespace {

icu::UnicodeString to_icu(std::string_view utf8) {
  if (!is_valid_utf8(utf8)) {
    throw EncodingError("invalid UTF-8 input");
  }
  return icu::UnicodeString::fromUTF8(
      icu::StringPiece(utf8.data(), static_cast<int32_t>(utf8.size())));
}

std::string from_icu(const icu::UnicodeString& s) {
  std::string out;
  s.toUTF8String(out);
  return out;
}

const icu::Normalizer2& nfc_instance() {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* n = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) {
    throw std::runtime_error("ICU NFC normalizer unavailable");
  }
  return *n;
}

const icu::Normalizer2& nfd_instance() {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* n = icu::Normalizer2::getNFDInstance(status);
  if (U_FAILURE(status)) {
    throw std::runtime_error("ICU NFD normalizer unavailable");
  }
  return *n;
}

icu::UnicodeString normalize(const icu::Normalizer2& form,
                             const icu::UnicodeString& s) {
  UErrorCode status = U_ZERO_ERROR;
  icu::UnicodeString out = form.normalize(s, status);
  if (U_FAILURE(status)) {
    throw EncodingError("normalization failed");
  }
  return out;
}

bool is_space(char32_t c) { return u_isUWhiteSpace(static_cast<UChar32>(c)); }

std::string trim(std::string_view s) {
  const auto u = decode_utf8(s);
  std::size_t b = 0;
  std::size_t e = u.size();
  while (b < e && is_space(u[b])) ++b;
  while (e > b && is_space(u[e - 1])) --e;
  return encode_utf8(std::u32string_view(u).substr(b, e - b));
}

}  // namespace

bool is_valid_utf8(std::string_view utf8) {
  const auto* s = reinterpret_cast<const uint8_t*>(utf8.data());
  const auto len = static_cast<int32_t>(utf8.size());
  int32_t i = 0;
  while (i < len) {
    UChar32 c;
    U8_NEXT(s, i, len, c);
    if (c < 0) return false;
  }
  return true;
}

std::u32string decode_utf8(std::string_view utf8) {
  const auto* s = reinterpret_cast<const uint8_t*>(utf8.data());
  const auto len = static_cast<int32_t>(utf8.size());
  std::u32string out;
  out.reserve(utf8.size());
  int32_t i = 0;
  while (i < len) {
    UChar32 c;
    U8_NEXT(s, i, len, c);
    if (c < 0) {
      throw EncodingError("invalid UTF-8 at byte " + std::to_string(i - 1));
    }
    out.push_back(static_cast<char32_t>(c));
  }
  return out;
}

std::string encode_utf8(std::u32string_view codepoints) {
  std::string out;
  out.reserve(codepoints.size() * 2);
  for (char32_t c : codepoints) {
    if (c < 0x80) {
      out.push_back(static_cast<char>(c));
    } else if (c < 0x800) {
      out.push_back(static_cast<char>(0xC0 | (c >> 6)));
      out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    } else if (c < 0x10000) {
      if (c >= 0xD800 && c <= 0xDFFF) {
        throw EncodingError("surrogate codepoint cannot be encoded");
      }
      out.push_back(static_cast<char>(0xE0 | (c >> 12)));
      out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    } else if (c < 0x110000) {
      out.push_back(static_cast<char>(0xF0 | (c >> 18)));
      out.push_back(static_cast<char>(0x80 | ((c >> 12) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    } else {
      throw EncodingError("codepoint out of Unicode range");
    }
  }
  return out;
}

std::string nfc(std::string_view utf8) {
  return from_icu(normalize(nfc_instance(), to_icu(utf8)));
}

std::string nfd(std::string_view utf8) {
  return from_icu(normalize(nfd_instance(), to_icu(utf8)));
}

std::string to_lower(std::string_view utf8) {
  icu::UnicodeString s = to_icu(utf8);
  s.toLower(icu::Locale::getRoot());
  return from_icu(s);
}

bool has_diacritic(std::string_view utf8) {
  const icu::UnicodeString d = normalize(nfd_instance(), to_icu(utf8));
  for (int32_t i = 0; i < d.length();) {
    const UChar32 c = d.char32At(i);
    if (u_charType(c) == U_NON_SPACING_MARK) return true;
    i += U16_LENGTH(c);
  }
  return false;
}

std::string strip_diacritics(std::string_view text) {
  const icu::UnicodeString d = normalize(nfd_instance(), to_icu(text));
  icu::UnicodeString kept;
  for (int32_t i = 0; i < d.length();) {
    const UChar32 c = d.char32At(i);
    if (u_charType(c) != U_NON_SPACING_MARK) kept.append(c);
    i += U16_LENGTH(c);
  }
  return from_icu(normalize(nfc_instance(), kept));
}

const YorubaAlphabet& yoruba_alphabet() {
  static const YorubaAlphabet alphabet = [] {
    YorubaAlphabet a;
    for (char32_t c : std::u32string_view(U"abdefghijklmnoprstuwy")) {
      a.base_characters.insert(c);
    }
    a.combining_marks = {0x0300, 0x0301, 0x0304, 0x030C, 0x0323};
    a.table = {
        {U'a', {"à", "á", "ǎ"}},
        {U'e', {"è", "é", "ẹ", "ẹ̀", "ẹ́"}},
        {U'i', {"ì", "í"}},
        {U'o', {"ò", "ó", "ọ", "ọ̀", "ọ́", "ǒ"}},
        {U'u', {"ù", "ú", "ǔ"}},
        {U'n', {"ǹ", "ń", "n̄"}},
        {U's', {"ṣ"}},
    };
    for (auto& row : a.table) {
      for (auto& form : row.diacritized) form = nfc(form);
    }
    return a;
  }();
  return alphabet;
}

std::string Sentence::joined() const {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

std::vector<Sentence> ParallelCorpus::sources() const {
  std::vector<Sentence> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) out.push_back(p.source);
  return out;
}

std::vector<Sentence> ParallelCorpus::targets() const {
  std::vector<Sentence> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) out.push_back(p.target);
  return out;
}

const PunctSet& default_punctuation() {
  static const PunctSet set = [] {
    PunctSet s;
    for (char32_t c = 0x21; c < 0x7F; ++c) {
      const bool alnum = (c >= U'0' && c <= U'9') || (c >= U'a' && c <= U'z') ||
                         (c >= U'A' && c <= U'Z');
      if (!alnum) s.insert(c);
    }
    // quotes, dashes, ellipsis
    for (char32_t c : std::u32string_view(
             U"‘’‚‛“”„‟«»"
             U"‹›‐‑‒–—―…")) {
      s.insert(c);
    }
    return s;
  }();
  return set;
}

PunctSet punctuation_from_string(std::string_view utf8_chars) {
  const auto cps = decode_utf8(utf8_chars);
  return PunctSet(cps.begin(), cps.end());
}

std::optional<Sentence> normalize_and_tokenize(std::string_view text,
                                               const PunctSet& punct) {
  const auto cps = decode_utf8(nfc(to_lower(text)));
  Sentence sentence;
  std::u32string current;
  auto flush = [&] {
    if (!current.empty()) {
      sentence.tokens.push_back(encode_utf8(current));
      current.clear();
    }
  };
  for (char32_t c : cps) {
    if (is_space(c)) {
      flush();
    } else if (!punct.contains(c)) {
      current.push_back(c);
    }
  }
  flush();
  if (sentence.tokens.empty()) return std::nullopt;
  return sentence;
}

std::vector<std::string> split_sentences(std::span<const std::string> lines) {
  std::vector<std::string> out;
  auto emit = [&out](std::string_view segment) {
    std::string t = trim(segment);
    if (t.empty() || t == ".") return;
    out.push_back(std::move(t));
  };
  for (const auto& line : lines) {
    std::size_t start = 0;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '.') {
        emit(std::string_view(line).substr(start, i + 1 - start));
        start = i + 1;
      }
    }
    if (start < line.size()) emit(std::string_view(line).substr(start));
  }
  return out;
}

ParallelCorpus make_parallel(std::span<const Sentence> targets) {
  ParallelCorpus corpus;
  corpus.pairs.reserve(targets.size());
  for (const auto& target : targets) {
    SentencePair pair;
    pair.target = target;
    pair.source.tokens.reserve(target.tokens.size());
    for (const auto& tok : target.tokens) {
      pair.source.tokens.push_back(strip_diacritics(tok));
    }
    corpus.pairs.push_back(std::move(pair));
  }
  return corpus;
}

DatasetSplit split_dataset(const ParallelCorpus& corpus, std::uint64_t seed,
                           std::array<double, 3> ratios) {
  const double total = ratios[0] + ratios[1] + ratios[2];
  if (std::abs(total - 1.0) > 1e-9) {
    throw ConfigError("split ratios must sum to 1");
  }
  for (double r : ratios) {
    if (r < 0.0) throw ConfigError("split ratios must be non-negative");
  }
  const std::size_t n = corpus.size();
  if (n < 3) {
    throw SizeError("corpus needs at least 3 pairs to split, got " +
                    std::to_string(n));
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  SplitMix64 rng(seed);
  rng.shuffle(std::span<std::size_t>(order));

  auto count = [n](double r) {
    return static_cast<std::size_t>(std::llround(static_cast<double>(n) * r));
  };
  const std::size_t n_train = std::min(n, count(ratios[0]));
  const std::size_t n_dev = std::min(n - n_train, count(ratios[1]));

  DatasetSplit split;
  split.seed = seed;
  split.ratios = ratios;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& pair = corpus.pairs[order[i]];
    if (i < n_train) {
      split.train.pairs.push_back(pair);
    } else if (i < n_train + n_dev) {
      split.dev.pairs.push_back(pair);
    } else {
      split.test.pairs.push_back(pair);
    }
  }
  return split;
}

void validate_parallel(const ParallelCorpus& corpus) {
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& p = corpus.pairs[i];
    if (p.source.size() != p.target.size()) {
      throw SizeError("pair " + std::to_string(i) +
                      ": source and target token counts differ (" +
                      std::to_string(p.source.size()) + " vs " +
                      std::to_string(p.target.size()) + ")");
    }
    for (std::size_t t = 0; t < p.source.size(); ++t) {
      if (strip_diacritics(p.target.tokens[t]) != p.source.tokens[t]) {
        throw SizeError("pair " + std::to_string(i) + " token " +
                        std::to_string(t) + ": '" + p.target.tokens[t] +
                        "' does not strip to '" + p.source.tokens[t] + "'");
      }
    }
  }
}

PrepareReport prepare_corpus(std::span<const std::string> lines,
                             const PrepareOptions& options) {
  PrepareReport report;
  const auto sentences = split_sentences(lines);
  report.raw_sentences = sentences.size();
  std::vector<Sentence> kept;
  for (const auto& s : sentences) {
    auto tokens = normalize_and_tokenize(s, options.punct);
    if (!tokens) {
      ++report.dropped_empty;
    } else if (tokens->size() > options.max_tokens) {
      ++report.dropped_long;
    } else {
      kept.push_back(std::move(*tokens));
    }
  }
  report.corpus = make_parallel(kept);
  return report;
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SizeError("cannot open " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (lines.empty() && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    lines.push_back(std::move(line));
  }
  return lines;
}

void write_lines(const std::filesystem::path& path,
                 std::span<const std::string> lines) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw SizeError("cannot write " + path.string());
  for (const auto& line : lines) out << line << '\n';
}

std::vector<Sentence> read_sentences(const std::filesystem::path& path) {
  std::vector<Sentence> out;
  for (const auto& line : read_lines(path)) {
    if (!is_valid_utf8(line)) {
      throw EncodingError("invalid UTF-8 in " + path.string());
    }
    Sentence s;
    std::istringstream ss(line);
    std::string tok;
    while (ss >> tok) s.tokens.push_back(nfc(tok));
    out.push_back(std::move(s));
  }
  return out;
}

ParallelCorpus read_parallel(const std::filesystem::path& src,
                             const std::filesystem::path& tgt) {
  auto sources = read_sentences(src);
  auto targets = read_sentences(tgt);
  if (sources.size() != targets.size()) {
    throw SizeError(src.string() + " and " + tgt.string() +
                    " have different line counts");
  }
  ParallelCorpus corpus;
  for (std::size_t i = 0; i < sources.size(); ++i) {
    if (sources[i].tokens.empty() && targets[i].tokens.empty()) continue;
    corpus.pairs.push_back({std::move(sources[i]), std::move(targets[i])});
  }
  validate_parallel(corpus);
  return corpus;
}

void write_parallel(const ParallelCorpus& corpus,
                    const std::filesystem::path& src,
                    const std::filesystem::path& tgt) {
  std::vector<std::string> s;
  std::vector<std::string> t;
  for (const auto& p : corpus.pairs) {
    s.push_back(p.source.joined());
    t.push_back(p.target.joined());
  }
  write_lines(src, s);
  write_lines(tgt, t);
}

std::vector<std::filesystem::path> write_split(
    const DatasetSplit& split, const std::filesystem::path& dir,
    const std::string& prefix) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> paths;
  auto emit = [&](const ParallelCorpus& c, const char* name) {
    const std::string stem = prefix.empty() ? name : prefix + "." + name;
    const std::filesystem::path src = dir / (stem + ".src");
    const std::filesystem::path tgt = dir / (stem + ".tgt");
    write_parallel(c, src, tgt);
    paths.push_back(src);
    paths.push_back(tgt);
  };
  emit(split.train, "train");
  emit(split.dev, "dev");
  emit(split.test, "test");
  return paths;
}

}  // namespace adr::text
