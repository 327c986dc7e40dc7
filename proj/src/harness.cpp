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

#include "adr/harness.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <thread>
#include <utility>

#include "json.hpp"

#include "adr/error.hpp"
#include "adr/rng.hpp"

namespace adr::harness {
namespace {

using ad::Parameter;
using ad::Tape;
using ad::Tensor;
using ad::Var;
using nlohmann::json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

template <class E>
E parse_enum(const std::string& s, std::initializer_list<std::pair<const char*, E>> table,
             const char* what) {
  for (const auto& [name, value] : table) {
    if (s == name) return value;
  }
  throw ConfigError(std::string("unknown ") + what + ": " + s);
}

std::size_t argmax(const std::vector<double>& v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return best;
}

bool is_recurrent(const TrainConfig& c) {
  return c.architecture != Architecture::kTransformer;
}

std::string format_fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

struct Hypothesis {
  std::vector<std::size_t> tokens;
  std::vector<std::vector<double>> attention;
  double score = 0.0;
  std::unique_ptr<DecodeSession> session;  // has consumed all but `pending`
  std::size_t pending = Vocabulary::kBos;
};

struct Decoded {
  std::vector<std::size_t> tokens;
  std::vector<std::vector<double>> attention;
};

Decoded greedy_decode(DecodeSession& session, std::size_t cap) {
  Decoded d;
  std::size_t prev = Vocabulary::kBos;
  for (std::size_t i = 0; i < cap; ++i) {
    StepOutput out = session.step(prev);
    const std::size_t tok = argmax(out.log_probs);
    if (tok == Vocabulary::kEos) break;
    d.tokens.push_back(tok);
    d.attention.push_back(std::move(out.attention));
    prev = tok;
  }
  return d;
}

Decoded beam_decode(std::unique_ptr<DecodeSession> root, std::size_t width,
                    std::size_t cap) {
  std::vector<Hypothesis> live(1);
  live[0].session = std::move(root);
  std::vector<Hypothesis> done;
  for (std::size_t step = 0; step < cap && !live.empty() && done.size() < width; ++step) {
    struct Candidate {
      double score;
      std::size_t hyp;
      std::size_t token;
    };
    std::vector<Candidate> cands;
    std::vector<StepOutput> outs;
    for (std::size_t h = 0; h < live.size(); ++h) {
      outs.push_back(live[h].session->step(live[h].pending));
      const auto& lp = outs.back().log_probs;
      std::vector<std::size_t> idx(lp.size());
      std::iota(idx.begin(), idx.end(), 0);
      const std::size_t k = std::min(width, idx.size());
      std::partial_sort(idx.begin(), idx.begin() + k, idx.end(),
                        [&](std::size_t a, std::size_t b) {
                          return lp[a] > lp[b] || (lp[a] == lp[b] && a < b);
                        });
      for (std::size_t j = 0; j < k; ++j) {
        cands.push_back({live[h].score + lp[idx[j]], h, idx[j]});
      }
    }
    std::stable_sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
      return a.score > b.score;
    });
    std::vector<Hypothesis> next;
    for (const auto& c : cands) {
      if (next.size() + done.size() >= width) break;
      const Hypothesis& parent = live[c.hyp];
      Hypothesis child;
      child.tokens = parent.tokens;
      child.attention = parent.attention;
      child.score = c.score;
      if (c.token == Vocabulary::kEos) {
        done.push_back(std::move(child));
        continue;
      }
      child.tokens.push_back(c.token);
      child.attention.push_back(outs[c.hyp].attention);
      child.session = parent.session->clone();
      child.pending = c.token;
      next.push_back(std::move(child));
    }
    live = std::move(next);
  }
  for (auto& h : live) done.push_back(std::move(h));
  std::size_t best = 0;
  for (std::size_t i = 1; i < done.size(); ++i) {
    if (done[i].score > done[best].score) best = i;
  }
  return {std::move(done[best].tokens), std::move(done[best].attention)};
}

// Little-endian binary primitives.
void put_u32(std::ostream& o, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) o.put(static_cast<char>((v >> (8 * i)) & 0xff));
}
void put_u64(std::ostream& o, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) o.put(static_cast<char>((v >> (8 * i)) & 0xff));
}
std::uint64_t get_uint(std::istream& in, int bytes) {
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) {
    const int c = in.get();
    if (c == EOF) throw FormatError("truncated checkpoint");
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(c)) << (8 * i);
  }
  return v;
}

constexpr char kMagic[8] = {'A', 'D', 'R', 'C', 'K', 'P', 'T', '\0'};

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }
double number_or_nan(const json& j) { return j.is_null() ? kNaN : j.get<double>(); }

json config_to_json(const TrainConfig& c) {
  return {
      {"architecture", to_string(c.architecture)},
      {"cell", to_string(c.cell)},
      {"layers", c.layers},
      {"hidden_dim", c.hidden_dim},
      {"embed_dim", c.embed_dim},
      {"heads", c.heads},
      {"ff_dim", c.ff_dim},
      {"positional", to_string(c.positional)},
      {"epochs", c.epochs},
      {"batch_size", c.batch_size},
      {"lr", c.adam.lr},
      {"beta1", c.adam.beta1},
      {"beta2", c.adam.beta2},
      {"adam_eps", c.adam.eps},
      {"lr_decay", c.lr_decay},
      {"decay_patience", c.decay_patience},
      {"grad_clip", c.grad_clip},
      {"min_count", c.min_count},
      {"seed", c.seed},
  };
}

TrainConfig config_from_json(const json& j) {
  TrainConfig c;
  c.architecture = architecture_from_string(j.at("architecture").get<std::string>());
  c.cell = cell_from_string(j.at("cell").get<std::string>());
  c.layers = j.at("layers").get<std::size_t>();
  c.hidden_dim = j.at("hidden_dim").get<std::size_t>();
  c.embed_dim = j.at("embed_dim").get<std::size_t>();
  c.heads = j.at("heads").get<std::size_t>();
  c.ff_dim = j.at("ff_dim").get<std::size_t>();
  c.positional = positional_from_string(j.at("positional").get<std::string>());
  c.epochs = j.at("epochs").get<std::size_t>();
  c.batch_size = j.at("batch_size").get<std::size_t>();
  c.adam.lr = j.at("lr").get<double>();
  c.adam.beta1 = j.at("beta1").get<double>();
  c.adam.beta2 = j.at("beta2").get<double>();
  c.adam.eps = j.at("adam_eps").get<double>();
  c.lr_decay = j.at("lr_decay").get<double>();
  c.decay_patience = j.at("decay_patience").get<std::size_t>();
  c.grad_clip = j.at("grad_clip").get<double>();
  c.min_count = j.at("min_count").get<std::size_t>();
  c.seed = j.at("seed").get<std::uint64_t>();
  return c;
}

}  // namespace

std::string to_string(Architecture a) {
  switch (a) {
    case Architecture::kSoftDot: return "soft_dot";
    case Architecture::kSoftAdd: return "soft_add";
    case Architecture::kTransformer: return "transformer";
  }
  return "?";
}

Architecture architecture_from_string(const std::string& s) {
  return parse_enum<Architecture>(s,
                                  {{"soft_dot", Architecture::kSoftDot},
                                   {"soft_add", Architecture::kSoftAdd},
                                   {"transformer", Architecture::kTransformer}},
                                  "architecture");
}

std::string to_string(rnn::CellKind c) {
  return c == rnn::CellKind::kGru ? "gru" : "lstm";
}

rnn::CellKind cell_from_string(const std::string& s) {
  return parse_enum<rnn::CellKind>(
      s, {{"gru", rnn::CellKind::kGru}, {"lstm", rnn::CellKind::kLstm}}, "cell");
}

std::string to_string(transformer::PositionalKind p) {
  switch (p) {
    case transformer::PositionalKind::kConcat: return "concat";
    case transformer::PositionalKind::kAdd: return "add";
    case transformer::PositionalKind::kNone: return "none";
  }
  return "?";
}

transformer::PositionalKind positional_from_string(const std::string& s) {
  using transformer::PositionalKind;
  return parse_enum<PositionalKind>(s,
                                    {{"concat", PositionalKind::kConcat},
                                     {"add", PositionalKind::kAdd},
                                     {"none", PositionalKind::kNone}},
                                    "positional encoding");
}

void TrainConfig::validate() const {
  if (hidden_dim == 0 || batch_size == 0 || min_count == 0) {
    throw ConfigError("hidden_dim, batch_size and min_count must be positive");
  }
  if (architecture == Architecture::kTransformer) {
    transformer::TransformerConfig{layers, hidden_dim, heads, ff_dim, positional}.validate();
  } else if (layers == 0 || embed_dim == 0) {
    throw ConfigError("recurrent models need at least one layer and embed_dim > 0");
  }
  if (!(adam.lr > 0.0) || !std::isfinite(adam.lr)) throw ConfigError("lr must be positive");
  if (!(adam.beta1 >= 0.0 && adam.beta1 < 1.0) || !(adam.beta2 >= 0.0 && adam.beta2 < 1.0)) {
    throw ConfigError("Adam betas must lie in [0, 1)");
  }
  if (!(adam.eps > 0.0)) throw ConfigError("Adam epsilon must be positive");
  if (!(lr_decay > 0.0 && lr_decay <= 1.0)) throw ConfigError("lr_decay must lie in (0, 1]");
  if (decay_patience == 0) throw ConfigError("decay_patience must be positive");
  if (!(grad_clip >= 0.0)) throw ConfigError("grad_clip must be non-negative");
}

std::unique_ptr<Seq2SeqModel> build_model(const TrainConfig& config,
                                          std::size_t source_vocab,
                                          std::size_t target_vocab) {
  config.validate();
  if (config.architecture == Architecture::kTransformer) {
    transformer::TransformerConfig tc{config.layers, config.hidden_dim, config.heads,
                                      config.ff_dim, config.positional};
    return std::make_unique<transformer::Transformer>(tc, source_vocab, target_vocab,
                                                      config.seed);
  }
  rnn::RnnConfig rc;
  rc.cell = config.cell;
  rc.score = config.architecture == Architecture::kSoftAdd ? rnn::ScoreKind::kAdd
                                                           : rnn::ScoreKind::kDot;
  rc.layers = config.layers;
  rc.embed_dim = config.embed_dim;
  rc.hidden_dim = config.hidden_dim;
  rc.attention_dim = config.hidden_dim;
  return std::make_unique<rnn::AttnSeq2Seq>(rc, source_vocab, target_vocab, config.seed);
}

Checkpoint initialize(const TrainConfig& config, Vocabulary source_vocab,
                      Vocabulary target_vocab) {
  Checkpoint c;
  c.config = config;
  c.source_vocab = std::move(source_vocab);
  c.target_vocab = std::move(target_vocab);
  c.model = build_model(config, c.source_vocab.size(), c.target_vocab.size());
  return c;
}

Example make_example(const Checkpoint& ckpt, const text::SentencePair& pair) {
  if (pair.source.size() != pair.target.size()) {
    throw SizeError("source has " + std::to_string(pair.source.size()) +
                    " tokens but target has " + std::to_string(pair.target.size()));
  }
  if (pair.source.size() == 0) throw SizeError("empty sentence pair");
  return {ckpt.source_vocab.encode(pair.source), ckpt.target_vocab.encode(pair.target)};
}

void Adam::step(std::span<Parameter* const> params) {
  if (m_.size() != params.size()) {
    m_.clear();
    v_.clear();
    for (const Parameter* p : params) {
      m_.emplace_back(p->value.shape(), 0.0);
      v_.emplace_back(p->value.shape(), 0.0);
    }
  }
  ++t_;
  const double c1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
  for (std::size_t k = 0; k < params.size(); ++k) {
    Parameter& p = *params[k];
    double* w = p.value.data();
    const double* g = p.grad.data();
    double* m = m_[k].data();
    double* v = v_[k].data();
    for (std::size_t i = 0; i < p.value.size(); ++i) {
      m[i] = config_.beta1 * m[i] + (1.0 - config_.beta1) * g[i];
      v[i] = config_.beta2 * v[i] + (1.0 - config_.beta2) * g[i] * g[i];
      w[i] -= config_.lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + config_.eps);
    }
  }
}

double clip_gradients(std::span<Parameter* const> params, double max_norm) {
  double sq = 0.0;
  for (const Parameter* p : params) {
    for (double g : p->grad.values()) sq += g * g;
  }
  const double norm = std::sqrt(sq);
  if (max_norm > 0.0 && norm > max_norm) {
    const double s = max_norm / norm;
    for (Parameter* p : params) {
      for (std::size_t i = 0; i < p->grad.size(); ++i) p->grad[i] *= s;
    }
  }
  return norm;
}

double train_step(Checkpoint& ckpt, Adam& optimizer, std::span<const Example> batch) {
  auto& store = ckpt.model->params();
  const auto params = store.all();
  Tape tape;
  Var loss = ckpt.model->batch_loss(tape, batch);
  const double value = loss.value().item();
  if (!std::isfinite(value)) throw DivergenceError("training loss became non-finite");
  tape.backward(loss);
  const double norm = clip_gradients(params, ckpt.config.grad_clip);
  if (!std::isfinite(norm)) throw DivergenceError("gradient norm became non-finite");
  optimizer.step(params);
  store.zero_grad();
  return value;
}

Checkpoint train(const TrainConfig& config, const text::DatasetSplit& split,
                 const EpochCallback& on_epoch) {
  config.validate();
  if (split.train.empty()) throw SizeError("empty training set");
  const auto sources = split.train.sources();
  const auto targets = split.train.targets();
  Checkpoint ckpt = initialize(config, Vocabulary::build(sources, config.min_count),
                               Vocabulary::build(targets, config.min_count));

  std::vector<Example> examples;
  for (const auto& p : split.train.pairs) examples.push_back(make_example(ckpt, p));
  for (const auto& p : split.dev.pairs) make_example(ckpt, p);  // validates alignment

  Adam optimizer(config.adam);
  SplitMix64 rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
  double best_dev = std::numeric_limits<double>::infinity();
  std::size_t stale = 0;

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    std::vector<std::size_t> order(examples.size());
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(std::span<std::size_t>(order));

    std::map<std::pair<std::size_t, std::size_t>, std::vector<std::size_t>> buckets;
    for (std::size_t i : order) {
      buckets[{examples[i].source.size(), examples[i].target.size()}].push_back(i);
    }
    std::vector<std::vector<Example>> batches;
    for (const auto& [key, members] : buckets) {
      for (std::size_t b = 0; b < members.size(); b += config.batch_size) {
        std::vector<Example> batch;
        for (std::size_t j = b; j < std::min(members.size(), b + config.batch_size); ++j) {
          batch.push_back(examples[members[j]]);
        }
        batches.push_back(std::move(batch));
      }
    }
    rng.shuffle(std::span<std::vector<Example>>(batches));

    EpochMetrics m;
    m.epoch = epoch;
    m.lr = optimizer.lr();
    double total = 0.0;
    for (const auto& batch : batches) {
      total += train_step(ckpt, optimizer, batch) * static_cast<double>(batch.size());
    }
    m.train_loss = total / static_cast<double>(examples.size());

    m.dev_loss = kNaN;
    m.dev_acc = kNaN;
    if (!split.dev.empty()) {
      const NllTotals dev = corpus_nll(ckpt, split.dev);
      m.dev_loss = dev.nll / static_cast<double>(dev.sentences);
      m.dev_acc = evaluate(ckpt, split.dev).accuracy;
      if (m.dev_loss < best_dev) {
        best_dev = m.dev_loss;
        stale = 0;
      } else if (++stale >= config.decay_patience) {
        optimizer.set_lr(optimizer.lr() * config.lr_decay);
        stale = 0;
      }
    }
    ckpt.epoch = epoch;
    ckpt.history.push_back(m);
    if (on_epoch && !on_epoch(m, ckpt)) break;
  }
  return ckpt;
}

bool Restoration::aligned() const { return output.size() == source_length; }

Restoration restore(Checkpoint& ckpt, const text::Sentence& source,
                    const DecodeOptions& options) {
  if (source.size() == 0) throw SizeError("cannot restore an empty sentence");
  Restoration r;
  r.source_length = source.size();
  const auto ids = ckpt.source_vocab.encode(source);
  auto session = ckpt.model->start(ids);
  const std::size_t cap = 2 * source.size() + 5;
  Decoded d = options.beam_width > 1 ? beam_decode(std::move(session), options.beam_width, cap)
                                     : greedy_decode(*session, cap);
  const bool recurrent = is_recurrent(ckpt.config);
  for (std::size_t i = 0; i < d.tokens.size(); ++i) {
    const std::size_t tok = d.tokens[i];
    if (tok >= Vocabulary::kReserved) {
      r.output.tokens.push_back(ckpt.target_vocab.token(tok));
      continue;
    }
    const std::size_t col =
        (!recurrent && i < source.size()) ? i : argmax(d.attention[i]);
    r.output.tokens.push_back(source.tokens[std::min(col, source.size() - 1)]);
  }
  r.attention = std::move(d.attention);
  return r;
}

double accuracy(std::span<const text::Sentence> predictions,
                std::span<const text::Sentence> targets) {
  if (predictions.size() != targets.size()) {
    throw SizeError("accuracy over " + std::to_string(predictions.size()) +
                    " predictions and " + std::to_string(targets.size()) + " targets");
  }
  std::size_t positions = 0;
  std::size_t correct = 0;
  for (std::size_t s = 0; s < targets.size(); ++s) {
    const auto& p = predictions[s].tokens;
    const auto& t = targets[s].tokens;
    positions += std::max(p.size(), t.size());
    for (std::size_t i = 0; i < std::min(p.size(), t.size()); ++i) {
      if (p[i] == t[i]) ++correct;
    }
  }
  if (positions == 0) throw UndefinedMetricError("accuracy over no tokens");
  return static_cast<double>(correct) / static_cast<double>(positions);
}

NllTotals corpus_nll(Checkpoint& ckpt, const text::ParallelCorpus& corpus) {
  NllTotals totals;
  for (const auto& pair : corpus.pairs) {
    totals.nll += forward_loss(ckpt, pair);
    totals.tokens += pair.target.size() + 1;
    ++totals.sentences;
  }
  return totals;
}

double prediction_perplexity(Checkpoint& ckpt, const text::ParallelCorpus& corpus) {
  const NllTotals t = corpus_nll(ckpt, corpus);
  if (t.tokens == 0) throw UndefinedMetricError("perplexity over an empty corpus");
  return std::exp(t.nll / static_cast<double>(t.tokens));
}

double forward_loss(Checkpoint& ckpt, const text::SentencePair& pair) {
  const Example ex = make_example(ckpt, pair);
  Tape tape(false);
  return ckpt.model->batch_loss(tape, std::span<const Example>(&ex, 1)).value().item();
}

std::vector<std::vector<double>> attention_matrix(Checkpoint& ckpt,
                                                  const text::SentencePair& pair) {
  const Example ex = make_example(ckpt, pair);
  auto session = ckpt.model->start(ex.source);
  std::vector<std::vector<double>> rows;
  std::size_t prev = Vocabulary::kBos;
  for (std::size_t tok : ex.target) {
    rows.push_back(session->step(prev).attention);
    prev = tok;
  }
  return rows;
}

void write_attention_csv(const text::Sentence& source, const text::Sentence& target,
                         const std::vector<std::vector<double>>& rows, std::ostream& out) {
  if (rows.size() != target.size()) {
    throw SizeError("attention has " + std::to_string(rows.size()) + " rows for " +
                    std::to_string(target.size()) + " target tokens");
  }
  for (const auto& tok : source.tokens) out << ',' << csv_field(tok);
  out << '\n';
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != source.size()) throw SizeError("attention row width mismatch");
    out << csv_field(target.tokens[r]);
    for (double w : rows[r]) out << ',' << format_fixed6(w);
    out << '\n';
  }
}

void export_attention(Checkpoint& ckpt, const text::SentencePair& pair, std::ostream& out) {
  write_attention_csv(pair.source, pair.target, attention_matrix(ckpt, pair), out);
}

Evaluation evaluate(Checkpoint& ckpt, const text::ParallelCorpus& corpus,
                    const DecodeOptions& options, std::size_t threads) {
  Evaluation e;
  e.predictions.resize(corpus.size());
  threads = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(1, corpus.size()));
  auto work = [&](std::size_t first) {
    for (std::size_t i = first; i < corpus.size(); i += threads) {
      e.predictions[i] = restore(ckpt, corpus.pairs[i].source, options).output;
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(work, t);
  }
  const auto targets = corpus.targets();
  e.accuracy = accuracy(e.predictions, targets);
  e.perplexity = prediction_perplexity(ckpt, corpus);
  return e;
}

void write_metrics(std::span<const EpochMetrics> history, std::ostream& out) {
  out << "epoch\ttrain_loss\tdev_loss\tdev_acc\tlr\n";
  char buf[256];
  for (const auto& m : history) {
    std::snprintf(buf, sizeof buf, "%zu\t%.8g\t%.8g\t%.6f\t%.8g\n", m.epoch, m.train_loss,
                  m.dev_loss, m.dev_acc, m.lr);
    out << buf;
  }
}

std::filesystem::path sidecar_path(const std::filesystem::path& path) {
  std::filesystem::path p = path;
  p += ".json";
  return p;
}

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  if (!ckpt.model) throw ConfigError("checkpoint has no model");
  {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path.string());
    out.write(kMagic, sizeof kMagic);
    put_u32(out, Checkpoint::kFormatVersion);
    const auto& store = ckpt.model->params();
    put_u32(out, static_cast<std::uint32_t>(store.size()));
    for (std::size_t k = 0; k < store.size(); ++k) {
      const Parameter& p = store[k];
      put_u32(out, static_cast<std::uint32_t>(p.name.size()));
      out.write(p.name.data(), static_cast<std::streamsize>(p.name.size()));
      put_u32(out, static_cast<std::uint32_t>(p.value.rank()));
      for (std::size_t d : p.value.shape()) put_u64(out, d);
      for (double v : p.value.values()) put_u64(out, std::bit_cast<std::uint64_t>(v));
    }
    if (!out) throw ConfigError("failed writing " + path.string());
  }
  json history = json::array();
  for (const auto& m : ckpt.history) {
    history.push_back({{"epoch", m.epoch},
                       {"train_loss", number_or_null(m.train_loss)},
                       {"dev_loss", number_or_null(m.dev_loss)},
                       {"dev_acc", number_or_null(m.dev_acc)},
                       {"lr", number_or_null(m.lr)}});
  }
  const json meta = {
      {"format_version", Checkpoint::kFormatVersion},
      {"parameters", path.filename().string()},
      {"config", config_to_json(ckpt.config)},
      {"source_vocab", ckpt.source_vocab.tokens()},
      {"target_vocab", ckpt.target_vocab.tokens()},
      {"epoch", ckpt.epoch},
      {"history", history},
  };
  std::ofstream side(sidecar_path(path));
  if (!side) throw ConfigError("cannot write " + sidecar_path(path).string());
  side << meta.dump(2) << '\n';
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream side(sidecar_path(path));
  if (!side) throw FormatError("missing checkpoint metadata " + sidecar_path(path).string());
  Checkpoint ckpt;
  try {
    const json meta = json::parse(side);
    if (meta.at("format_version").get<std::uint32_t>() != Checkpoint::kFormatVersion) {
      throw FormatError("unsupported checkpoint version");
    }
    ckpt.config = config_from_json(meta.at("config"));
    ckpt.source_vocab =
        Vocabulary::from_tokens(meta.at("source_vocab").get<std::vector<std::string>>());
    ckpt.target_vocab =
        Vocabulary::from_tokens(meta.at("target_vocab").get<std::vector<std::string>>());
    ckpt.epoch = meta.at("epoch").get<std::size_t>();
    for (const auto& h : meta.at("history")) {
      ckpt.history.push_back({h.at("epoch").get<std::size_t>(), number_or_nan(h.at("train_loss")),
                              number_or_nan(h.at("dev_loss")), number_or_nan(h.at("dev_acc")),
                              number_or_nan(h.at("lr"))});
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed checkpoint metadata: ") + e.what());
  }
  ckpt.model = build_model(ckpt.config, ckpt.source_vocab.size(), ckpt.target_vocab.size());

  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot read " + path.string());
  char magic[sizeof kMagic];
  in.read(magic, sizeof magic);
  if (!in || !std::equal(magic, magic + sizeof magic, kMagic)) {
    throw FormatError(path.string() + " is not a checkpoint");
  }
  if (get_uint(in, 4) != Checkpoint::kFormatVersion) {
    throw FormatError("unsupported checkpoint version");
  }
  auto& store = ckpt.model->params();
  const std::size_t count = get_uint(in, 4);
  if (count != store.size()) throw FormatError("parameter count does not match config");
  for (std::size_t k = 0; k < count; ++k) {
    std::string name(get_uint(in, 4), '\0');
    in.read(name.data(), static_cast<std::streamsize>(name.size()));
    if (!in || !store.contains(name)) throw FormatError("unexpected parameter " + name);
    Parameter& p = store.at(name);
    ad::Shape shape(get_uint(in, 4));
    for (auto& d : shape) d = get_uint(in, 8);
    if (shape != p.value.shape()) throw FormatError("shape mismatch for " + name);
    for (std::size_t i = 0; i < p.value.size(); ++i) {
      p.value[i] = std::bit_cast<double>(get_uint(in, 8));
    }
  }
  return ckpt;
}

}  // namespace adr::harness
