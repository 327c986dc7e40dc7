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

#include "adr/model.hpp"

#include "adr/error.hpp"
#include "adr/vocab.hpp"

namespace adr {

std::vector<std::size_t> output_targets(const Example& example) {
  std::vector<std::size_t> out(example.target);
  out.push_back(Vocabulary::kEos);
  return out;
}

ad::Var Seq2SeqModel::batch_loss(ad::Tape& tape, std::span<const Example> batch) {
  if (batch.empty()) throw SizeError("empty training batch");
  std::vector<ad::Var> logits;
  std::vector<std::size_t> targets;
  for (const auto& ex : batch) {
    logits.push_back(teacher_forced_logits(tape, ex));
    const auto t = output_targets(ex);
    targets.insert(targets.end(), t.begin(), t.end());
  }
  return ad::nll_loss(ad::concat(logits, 0), targets,
                      static_cast<double>(batch.size()));
}

}  // namespace adr
