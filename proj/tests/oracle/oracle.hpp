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

// Reference implementations used as test oracles. They are written from the
// definitions with flat scans and share no code with the library.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

inline constexpr std::pair<char32_t, char32_t> kMnRanges[] = {
#include "mn_ranges.inc"
};

inline bool is_mn(char32_t c) {
  for (const auto& [lo, hi] : kMnRanges) {
    if (c >= lo && c <= hi) return true;
  }
  return false;
}

inline std::u32string decode(const std::string& s) {
  std::u32string out;
  for (std::size_t i = 0; i < s.size();) {
    const auto b = static_cast<unsigned char>(s[i]);
    int n = b < 0x80 ? 1 : b < 0xE0 ? 2 : b < 0xF0 ? 3 : 4;
    char32_t c = n == 1 ? b : n == 2 ? (b & 0x1F) : n == 3 ? (b & 0x0F) : (b & 0x07);
    for (int k = 1; k < n; ++k) c = (c << 6) | (static_cast<unsigned char>(s[i + k]) & 0x3F);
    out.push_back(c);
    i += static_cast<std::size_t>(n);
  }
  return out;
}

inline std::string encode(const std::u32string& s) {
  std::string out;
  for (char32_t c : s) {
    if (c < 0x80) {
      out += static_cast<char>(c);
    } else if (c < 0x800) {
      out += static_cast<char>(0xC0 | (c >> 6));
      out += static_cast<char>(0x80 | (c & 0x3F));
    } else if (c < 0x10000) {
      out += static_cast<char>(0xE0 | (c >> 12));
      out += static_cast<char>(0x80 | ((c >> 6) & 0x3F));
      out += static_cast<char>(0x80 | (c & 0x3F));
    } else {
      out += static_cast<char>(0xF0 | (c >> 18));
      out += static_cast<char>(0x80 | ((c >> 12) & 0x3F));
      out += static_cast<char>(0x80 | ((c >> 6) & 0x3F));
      out += static_cast<char>(0x80 | (c & 0x3F));
    }
  }
  return out;
}

inline std::string drop_mn(const std::string& s) {
  std::u32string out;
  for (char32_t c : decode(s)) {
    if (!is_mn(c)) out.push_back(c);
  }
  return encode(out);
}

inline bool contains_mn(const std::string& s) {
  for (char32_t c : decode(s)) {
    if (is_mn(c)) return true;
  }
  return false;
}

// Precomposed characters of the Yorùbá character table with their canonical
// decompositions, written out by hand.
struct Decomposition {
  std::u32string composed;
  char32_t base;
  std::u32string marks;
};

inline const std::vector<Decomposition>& yoruba_table() {
  static const std::vector<Decomposition> table = {
      {U"\u00E0", U'a', U"\u0300"},
      {U"\u00E1", U'a', U"\u0301"},
      {U"\u01CE", U'a', U"\u030C"},
      {U"\u00E8", U'e', U"\u0300"},
      {U"\u00E9", U'e', U"\u0301"},
      {U"\u1EB9", U'e', U"\u0323"},
      {U"\u1EB9\u0300", U'e', U"\u0323\u0300"},
      {U"\u1EB9\u0301", U'e', U"\u0323\u0301"},
      {U"\u00EC", U'i', U"\u0300"},
      {U"\u00ED", U'i', U"\u0301"},
      {U"\u00F2", U'o', U"\u0300"},
      {U"\u00F3", U'o', U"\u0301"},
      {U"\u1ECD", U'o', U"\u0323"},
      {U"\u1ECD\u0300", U'o', U"\u0323\u0300"},
      {U"\u1ECD\u0301", U'o', U"\u0323\u0301"},
      {U"\u01D2", U'o', U"\u030C"},
      {U"\u00F9", U'u', U"\u0300"},
      {U"\u00FA", U'u', U"\u0301"},
      {U"\u01D4", U'u', U"\u030C"},
      {U"\u01F9", U'n', U"\u0300"},
      {U"\u0144", U'n', U"\u0301"},
      {U"n\u0304", U'n', U"\u0304"},
      {U"\u1E63", U's', U"\u0323"},
  };
  return table;
}

// A corpus token kept in decomposed form: ASCII letters interleaved with
// combining marks in canonical order.
struct Pair {
  std::vector<std::string> source;
  std::vector<std::string> target;  // decomposed
};

template <class T>
std::size_t find_index(const std::vector<T>& v, const T& x) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] == x) return i;
  }
  return v.size();
}

struct Stats {
  double pct_tokens_diacritized = 0.0;
  double pct_types_ambiguous = 0.0;
  double lexdif = 0.0;
  std::size_t vocab_src = 0;
  std::size_t vocab_tgt = 0;
  std::size_t tokens = 0;
};

inline Stats stats(const std::vector<Pair>& corpus) {
  std::vector<std::string> src_types, tgt_types;
  std::vector<std::vector<std::string>> forms;  // parallel to src_types
  std::size_t tokens = 0, marked = 0;
  for (const auto& p : corpus) {
    for (std::size_t i = 0; i < p.target.size(); ++i) {
      ++tokens;
      if (contains_mn(p.target[i])) ++marked;
      const std::string key = drop_mn(p.target[i]);
      std::size_t k = find_index(src_types, key);
      if (k == src_types.size()) {
        src_types.push_back(key);
        forms.emplace_back();
      }
      if (find_index(forms[k], p.target[i]) == forms[k].size()) forms[k].push_back(p.target[i]);
      if (find_index(tgt_types, p.target[i]) == tgt_types.size()) tgt_types.push_back(p.target[i]);
    }
  }
  Stats s;
  s.tokens = tokens;
  s.vocab_src = src_types.size();
  s.vocab_tgt = tgt_types.size();
  std::size_t ambiguous = 0, total_forms = 0;
  for (const auto& f : forms) {
    total_forms += f.size();
    if (f.size() >= 2) ++ambiguous;
  }
  s.pct_tokens_diacritized = 100.0 * static_cast<double>(marked) / static_cast<double>(tokens);
  s.pct_types_ambiguous =
      100.0 * static_cast<double>(ambiguous) / static_cast<double>(src_types.size());
  s.lexdif = static_cast<double>(total_forms) / static_cast<double>(src_types.size());
  return s;
}

// Interpolated n-gram perplexity straight from the definitions: add-one
// unigram over vocab + {UNK, EOS}; higher orders are relative frequencies
// that fall back to the next lower order for unseen contexts. Every count is
// taken by scanning the padded training sentences.
class NgramOracle {
 public:
  NgramOracle(std::vector<std::vector<std::string>> train, std::size_t order,
              std::vector<double> weights)
      : order_(order), weights_(std::move(weights)) {
    for (auto& s : train) {
      for (const auto& t : s) {
        if (find_index(vocab_, t) == vocab_.size()) vocab_.push_back(t);
      }
      std::vector<std::string> padded(order - 1, "<s>");
      padded.insert(padded.end(), s.begin(), s.end());
      padded.push_back("</s>");
      train_.push_back(std::move(padded));
    }
  }

  double prob(const std::string& raw, const std::vector<std::string>& history) const {
    const std::string tok = map(raw);
    std::vector<std::string> h(order_ - 1, "<s>");
    for (const auto& t : history) h.push_back(map(t));
    double p = 0.0;
    for (std::size_t k = 1; k <= order_; ++k) p += weights_[k - 1] * level(k, tok, h);
    return p;
  }

  double perplexity(const std::vector<std::vector<std::string>>& corpus) const {
    double log_sum = 0.0;
    std::size_t n = 0;
    for (const auto& s : corpus) {
      std::vector<std::string> history;
      for (std::size_t i = 0; i <= s.size(); ++i) {
        const std::string tok = i < s.size() ? s[i] : "</s>";
        log_sum += std::log(prob(tok, history));
        ++n;
        history.push_back(tok);
      }
    }
    return std::exp(-log_sum / static_cast<double>(n));
  }

 private:
  std::string map(const std::string& t) const {
    if (t == "<s>" || t == "</s>") return t;
    return find_index(vocab_, t) == vocab_.size() ? "<unk>" : t;
  }

  // Occurrences of `ctx` followed by `tok` at a counted position; an empty
  // `tok` counts any follower.
  std::size_t count(const std::vector<std::string>& ctx, const std::string* tok) const {
    std::size_t c = 0;
    for (const auto& s : train_) {
      for (std::size_t i = order_ - 1; i < s.size(); ++i) {
        if (i < ctx.size()) continue;
        bool match = tok == nullptr || s[i] == *tok;
        for (std::size_t j = 0; match && j < ctx.size(); ++j) {
          match = s[i - ctx.size() + j] == ctx[j];
        }
        if (match) ++c;
      }
    }
    return c;
  }

  double level(std::size_t k, const std::string& tok, const std::vector<std::string>& h) const {
    if (k == 1) {
      const double total = static_cast<double>(count({}, nullptr));
      return (static_cast<double>(count({}, &tok)) + 1.0) /
             (total + static_cast<double>(vocab_.size() + 2));
    }
    const std::vector<std::string> ctx(h.end() - static_cast<std::ptrdiff_t>(k - 1), h.end());
    const std::size_t total = count(ctx, nullptr);
    if (total == 0) return level(k - 1, tok, h);
    return static_cast<double>(count(ctx, &tok)) / static_cast<double>(total);
  }

  std::size_t order_;
  std::vector<double> weights_;
  std::vector<std::string> vocab_;
  std::vector<std::vector<std::string>> train_;
};

}  // namespace oracle
