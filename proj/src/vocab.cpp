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

#include "adr/vocab.hpp"

#include <map>

#include "adr/error.hpp"

namespace adr {

namespace {
const char* const kReservedTokens[] = {"<pad>", "<unk>", "<s>", "</s>"};
}

Vocabulary::Vocabulary() {
  for (const char* t : kReservedTokens) {
    index_[t] = tokens_.size();
    tokens_.emplace_back(t);
  }
}

Vocabulary Vocabulary::build(std::span<const text::Sentence> corpus,
                             std::size_t min_count) {
  std::map<std::string, std::size_t> counts;
  for (const auto& s : corpus) {
    for (const auto& t : s.tokens) ++counts[t];
  }
  Vocabulary v;
  for (const auto& [tok, c] : counts) {
    if (c >= min_count && !v.index_.contains(tok)) {
      v.index_[tok] = v.tokens_.size();
      v.tokens_.push_back(tok);
    }
  }
  return v;
}

Vocabulary Vocabulary::from_tokens(std::vector<std::string> tokens) {
  if (tokens.size() < kReserved) {
    throw SizeError("vocabulary is missing its reserved entries");
  }
  for (std::size_t i = 0; i < kReserved; ++i) {
    if (tokens[i] != kReservedTokens[i]) {
      throw SizeError("vocabulary entry " + std::to_string(i) +
                      " should be " + kReservedTokens[i]);
    }
  }
  Vocabulary v;
  for (std::size_t i = kReserved; i < tokens.size(); ++i) {
    if (v.index_.contains(tokens[i])) {
      throw SizeError("duplicate vocabulary entry " + tokens[i]);
    }
    v.index_[tokens[i]] = v.tokens_.size();
    v.tokens_.push_back(std::move(tokens[i]));
  }
  return v;
}

std::size_t Vocabulary::index(const std::string& token) const {
  auto it = index_.find(token);
  return it == index_.end() ? kUnk : it->second;
}

const std::string& Vocabulary::token(std::size_t index) const {
  if (index >= tokens_.size()) {
    throw IndexError("token index " + std::to_string(index) +
                     " outside vocabulary of size " +
                     std::to_string(tokens_.size()));
  }
  return tokens_[index];
}

std::vector<std::size_t> Vocabulary::encode(const text::Sentence& sentence) const {
  std::vector<std::size_t> out;
  out.reserve(sentence.size());
  for (const auto& t : sentence.tokens) out.push_back(index(t));
  return out;
}

}  // namespace adr
