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

#include "adr/cli.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <vector>

#include "CLI11.hpp"

#include "adr/error.hpp"
#include "adr/harness.hpp"
#include "adr/metrics.hpp"
#include "adr/ngram.hpp"
#include "adr/synth.hpp"
#include "adr/text.hpp"

namespace adr::cli {
namespace fs = std::filesystem;
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string fmt(double v, const char* spec = "%.6f") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::vector<double> parse_doubles(const std::string& csv, const char* what) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(trim(item), &used));
      if (used != trim(item).size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError(std::string("bad number in ") + what + ": " + item);
    }
  }
  return out;
}

std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  return out;
}

// Sends data to `path`, or to `fallback` when the path is empty.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) {
    if (!path.empty()) file_ = open_output(path);
    stream_ = path.empty() ? &fallback : &*file_;
  }
  std::ostream& operator*() { return *stream_; }

 private:
  std::optional<std::ofstream> file_;
  std::ostream* stream_;
};

struct SplitPaths {
  fs::path src, tgt;
};

SplitPaths split_paths(const fs::path& dir, const std::string& prefix, const char* part) {
  const std::string stem = prefix.empty() ? part : prefix + "." + part;
  return {dir / (stem + ".src"), dir / (stem + ".tgt")};
}

text::ParallelCorpus read_split_part(const fs::path& dir, const std::string& prefix,
                                     const char* part, bool required) {
  const SplitPaths p = split_paths(dir, prefix, part);
  if (!fs::exists(p.src) || !fs::exists(p.tgt)) {
    if (required) throw ConfigError("missing " + p.src.string() + " or " + p.tgt.string());
    return {};
  }
  return text::read_parallel(p.src, p.tgt);
}

std::optional<text::Sentence> tokenize_input(const std::string& line) {
  return text::normalize_and_tokenize(line, text::default_punctuation());
}

// Options shared by the subcommands that take a TrainConfig.
struct TrainFlags {
  std::string architecture = "soft_dot";
  std::string cell = "gru";
  std::string positional = "concat";
  harness::TrainConfig config;

  void attach(CLI::App& app) {
    app.add_option("--architecture", architecture, "soft_dot, soft_add or transformer")
        ->capture_default_str();
    app.add_option("--cell", cell, "gru or lstm")->capture_default_str();
    app.add_option("--layers", config.layers)->capture_default_str();
    app.add_option("--hidden-dim", config.hidden_dim, "RNN hidden size or model dim")
        ->capture_default_str();
    app.add_option("--embed-dim", config.embed_dim)->capture_default_str();
    app.add_option("--heads", config.heads)->capture_default_str();
    app.add_option("--ff-dim", config.ff_dim)->capture_default_str();
    app.add_option("--positional", positional, "concat, add or none")->capture_default_str();
    app.add_option("--epochs", config.epochs)->capture_default_str();
    app.add_option("--batch-size", config.batch_size)->capture_default_str();
    app.add_option("--lr", config.adam.lr)->capture_default_str();
    app.add_option("--beta1", config.adam.beta1)->capture_default_str();
    app.add_option("--beta2", config.adam.beta2)->capture_default_str();
    app.add_option("--adam-eps", config.adam.eps)->capture_default_str();
    app.add_option("--lr-decay", config.lr_decay)->capture_default_str();
    app.add_option("--decay-patience", config.decay_patience)->capture_default_str();
    app.add_option("--grad-clip", config.grad_clip)->capture_default_str();
    app.add_option("--min-count", config.min_count)->capture_default_str();
  }

  harness::TrainConfig resolve(std::uint64_t seed) const {
    harness::TrainConfig c = config;
    c.architecture = harness::architecture_from_string(architecture);
    c.cell = harness::cell_from_string(cell);
    c.positional = harness::positional_from_string(positional);
    c.seed = seed;
    c.validate();
    return c;
  }
};

struct Context {
  std::istream& in;
  std::ostream& out;
  std::ostream& err;
};

// --- prepare ---------------------------------------------------------------

struct PrepareArgs {
  std::vector<std::string> inputs;
  std::string out_dir;
  std::string prefix;
  std::string ratios = "0.8,0.1,0.1";
  std::string punct;
  std::size_t max_tokens = text::kMaxSentenceTokens;
};

void run_prepare(const PrepareArgs& a, std::uint64_t seed, Context& ctx) {
  const auto r = parse_doubles(a.ratios, "--ratios");
  if (r.size() != 3) throw ConfigError("--ratios needs three values");
  std::vector<std::string> lines;
  for (const auto& path : a.inputs) {
    auto part = text::read_lines(path);
    lines.insert(lines.end(), part.begin(), part.end());
  }
  text::PrepareOptions opts;
  if (!a.punct.empty()) opts.punct = text::punctuation_from_string(a.punct);
  opts.max_tokens = a.max_tokens;
  const auto report = text::prepare_corpus(lines, opts);
  const auto split = text::split_dataset(report.corpus, seed, {r[0], r[1], r[2]});
  fs::create_directories(a.out_dir);
  const auto written = text::write_split(split, a.out_dir, a.prefix);
  ctx.err << "prepared " << report.corpus.size() << " pairs from " << report.raw_sentences
          << " sentences (" << report.dropped_empty << " empty, " << report.dropped_long
          << " over " << opts.max_tokens << " tokens dropped); train/dev/test = "
          << split.train.size() << '/' << split.dev.size() << '/' << split.test.size()
          << '\n';
  for (const auto& p : written) ctx.out << p.string() << '\n';
}

// --- stats -----------------------------------------------------------------

struct StatsArgs {
  std::string src, tgt, lexicon;
  bool weighted = false;
};

void run_stats(const StatsArgs& a, Context& ctx) {
  const auto corpus = text::read_parallel(a.src, a.tgt);
  metrics::write_stats(metrics::corpus_stats(corpus, a.weighted), ctx.out);
  if (!a.lexicon.empty()) metrics::write_lexicon_tsv(metrics::build_lexicon(corpus), a.lexicon);
}

// --- train-lm --------------------------------------------------------------

struct TrainLmArgs {
  std::string input, output, eval, weights;
  std::size_t order = 3;
};

void run_train_lm(const TrainLmArgs& a, Context& ctx) {
  std::vector<double> w;
  if (!a.weights.empty()) w = parse_doubles(a.weights, "--weights");
  const auto lm = ngram::train_lm(text::read_sentences(a.input), a.order, w);
  lm.save(a.output);
  if (!a.eval.empty()) {
    ctx.out << "perplexity=" << fmt(ngram::perplexity(lm, text::read_sentences(a.eval))) << '\n';
  }
}

// --- baseline --------------------------------------------------------------

struct BaselineArgs {
  std::string method;
  std::string train_src, train_tgt, lexicon, lm, src, tgt, output;
};

void run_baseline(const BaselineArgs& a, Context& ctx) {
  if (a.lexicon.empty() && (a.train_src.empty() || a.train_tgt.empty())) {
    throw ConfigError("baseline needs --lexicon or --train-src and --train-tgt");
  }
  const metrics::Lexicon lex = a.lexicon.empty()
                                   ? metrics::build_lexicon(
                                         text::read_parallel(a.train_src, a.train_tgt))
                                   : metrics::read_lexicon_tsv(a.lexicon);
  std::optional<ngram::NgramLM> lm;
  if (a.method == "bigram") {
    if (!a.lm.empty()) {
      lm = ngram::NgramLM::load(a.lm);
    } else if (!a.train_tgt.empty()) {
      lm = ngram::train_lm(text::read_sentences(a.train_tgt), 2);
    } else {
      throw ConfigError("bigram baseline needs --lm or --train-tgt");
    }
    if (lm->order() != 2) throw ConfigError("bigram baseline needs an order-2 model");
  }
  const auto sources = text::read_sentences(a.src);
  std::vector<text::Sentence> predictions;
  for (const auto& s : sources) {
    if (s.size() == 0) {
      predictions.emplace_back();
      continue;
    }
    predictions.push_back(lm ? ngram::restore_bigram(lex, *lm, s)
                             : ngram::restore_unigram(lex, s));
  }
  if (!a.tgt.empty()) {
    const auto targets = text::read_sentences(a.tgt);
    if (!a.output.empty()) {
      auto f = open_output(a.output);
      for (const auto& p : predictions) f << p.joined() << '\n';
    }
    ctx.out << "accuracy=" << fmt(harness::accuracy(predictions, targets)) << '\n';
    return;
  }
  Sink sink(a.output, ctx.out);
  for (const auto& p : predictions) *sink << p.joined() << '\n';
}

// --- train -----------------------------------------------------------------

struct TrainArgs {
  std::string data, prefix, train_src, train_tgt, dev_src, dev_tgt, model, metrics;
  bool keep_last = false;
  TrainFlags flags;
};

void run_train(const TrainArgs& a, std::uint64_t seed, Context& ctx) {
  const harness::TrainConfig config = a.flags.resolve(seed);
  text::DatasetSplit split;
  if (!a.data.empty()) {
    split.train = read_split_part(a.data, a.prefix, "train", true);
    split.dev = read_split_part(a.data, a.prefix, "dev", false);
  } else {
    if (a.train_src.empty() || a.train_tgt.empty()) {
      throw ConfigError("train needs --data or --train-src and --train-tgt");
    }
    split.train = text::read_parallel(a.train_src, a.train_tgt);
    if (!a.dev_src.empty() || !a.dev_tgt.empty()) {
      split.dev = text::read_parallel(a.dev_src, a.dev_tgt);
    }
  }
  // Model selection on dev accuracy; without dev data the last epoch is kept.
  const bool select = !a.keep_last && !split.dev.empty();
  double best_acc = -1.0;
  double best_loss = 0.0;
  auto ckpt = harness::train(config, split, [&](const harness::EpochMetrics& m,
                                                 harness::Checkpoint& c) {
    ctx.err << "epoch " << m.epoch << " train_loss " << fmt(m.train_loss, "%.5f")
            << " dev_loss " << fmt(m.dev_loss, "%.5f") << " dev_acc " << fmt(m.dev_acc, "%.4f")
            << " lr " << fmt(m.lr, "%.3g") << '\n';
    if (select && (m.dev_acc > best_acc || (m.dev_acc == best_acc && m.dev_loss < best_loss))) {
      best_acc = m.dev_acc;
      best_loss = m.dev_loss;
      harness::save_checkpoint(c, a.model);
    }
    return true;
  });
  if (!select) harness::save_checkpoint(ckpt, a.model);
  if (!a.metrics.empty()) {
    auto f = open_output(a.metrics);
    harness::write_metrics(ckpt.history, f);
  }
  if (select) ctx.err << "selected checkpoint with dev_acc " << fmt(best_acc, "%.4f") << '\n';
}

// --- restore ---------------------------------------------------------------

struct RestoreArgs {
  std::string model, text, output;
  bool text_given = false;
  std::size_t beam = 0;
};

void run_restore(const RestoreArgs& a, Context& ctx) {
  auto ckpt = harness::load_checkpoint(a.model);
  const harness::DecodeOptions opts{a.beam};
  Sink sink(a.output, ctx.out);
  auto one = [&](const std::string& line) {
    const auto sentence = tokenize_input(line);
    if (!sentence) {
      *sink << '\n';
      return;
    }
    const auto r = harness::restore(ckpt, *sentence, opts);
    if (!r.aligned()) {
      ctx.err << "warning: " << r.output.size() << " tokens restored for "
              << sentence->size() << " inputs\n";
    }
    *sink << r.output.joined() << '\n';
  };
  if (a.text_given) {
    one(a.text);
    return;
  }
  std::string line;
  while (std::getline(ctx.in, line)) one(line);
}

// --- eval ------------------------------------------------------------------

struct EvalArgs {
  std::string model, src, tgt, output;
  std::size_t beam = 0;
  std::size_t threads = 1;
};

void run_eval(const EvalArgs& a, Context& ctx) {
  auto ckpt = harness::load_checkpoint(a.model);
  const auto corpus = text::read_parallel(a.src, a.tgt);
  const auto e = harness::evaluate(ckpt, corpus, {a.beam}, a.threads);
  if (!a.output.empty()) {
    auto f = open_output(a.output);
    for (const auto& p : e.predictions) f << p.joined() << '\n';
  }
  std::size_t tokens = 0;
  for (const auto& p : corpus.pairs) tokens += p.target.size();
  ctx.out << "accuracy=" << fmt(e.accuracy) << '\n'
          << "perplexity=" << fmt(e.perplexity) << '\n'
          << "sentences=" << corpus.size() << '\n'
          << "tokens=" << tokens << '\n';
}

// --- attention -------------------------------------------------------------

struct AttentionArgs {
  std::string model, source, target, output;
};

void run_attention(const AttentionArgs& a, Context& ctx) {
  auto ckpt = harness::load_checkpoint(a.model);
  const auto src = tokenize_input(a.source);
  if (!src) throw SizeError("empty --source");
  Sink sink(a.output, ctx.out);
  if (a.target.empty()) {
    const auto r = harness::restore(ckpt, *src);
    harness::write_attention_csv(*src, r.output, r.attention, *sink);
    return;
  }
  const auto tgt = tokenize_input(a.target);
  if (!tgt) throw SizeError("empty --target");
  harness::export_attention(ckpt, {*src, *tgt}, *sink);
}

// --- synth -----------------------------------------------------------------

struct SynthArgs {
  std::string out_dir, prefix, src, tgt, ratios = "0.8,0.1,0.1";
  std::size_t sentences = 1000;
  synth::SynthConfig config = synth::default_config();
};

void run_synth(const SynthArgs& a, std::uint64_t seed, Context& ctx) {
  if (a.out_dir.empty() && (a.src.empty() || a.tgt.empty())) {
    throw ConfigError("synth needs --out or --src and --tgt");
  }
  if (a.sentences == 0) throw ConfigError("--sentences must be at least 1");
  const auto corpus = synth::generate(a.config, a.sentences, seed);
  if (!a.src.empty() && !a.tgt.empty()) text::write_parallel(corpus, a.src, a.tgt);
  if (!a.out_dir.empty()) {
    const auto r = parse_doubles(a.ratios, "--ratios");
    if (r.size() != 3) throw ConfigError("--ratios needs three values");
    fs::create_directories(a.out_dir);
    text::write_split(text::split_dataset(corpus, seed, {r[0], r[1], r[2]}), a.out_dir,
                      a.prefix);
  }
  const auto s = synth::expected_stats(a.config);
  ctx.out << "sentences=" << corpus.size() << '\n'
          << "expected_pct_ambiguous=" << fmt(s.pct_types_ambiguous) << '\n'
          << "expected_lexdif=" << fmt(s.lexdif) << '\n'
          << "expected_vocab_src=" << s.vocab_src << '\n'
          << "expected_vocab_tgt=" << s.vocab_tgt << '\n';
}

// Splices config-file values in front of the user's flags so flags win.
std::vector<std::string> apply_config(const std::vector<std::string>& args, CLI::App& app) {
  std::vector<std::string> rest;
  std::optional<std::string> config_path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw ConfigError("--config needs a path");
      config_path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      config_path = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  if (!config_path || rest.empty()) return rest;
  CLI::App* sub = nullptr;
  try {
    sub = app.get_subcommand(rest[0]);
  } catch (const CLI::OptionNotFound&) {
    return rest;  // reported by the parser
  }
  std::vector<std::string> injected{rest[0]};
  for (const auto& [key, value] : read_config_file(*config_path)) {
    const CLI::Option* opt = sub->get_option_no_throw("--" + key);
    if (opt == nullptr) throw ConfigError("unknown config key '" + key + "' for " + rest[0]);
    if (opt->get_expected_min() == 0) {
      std::string v = value;
      std::transform(v.begin(), v.end(), v.begin(),
                     [](unsigned char c) { return std::tolower(c); });
      if (v == "true" || v == "1" || v == "yes") injected.push_back("--" + key);
      continue;
    }
    injected.push_back("--" + key);
    injected.push_back(value);
  }
  injected.insert(injected.end(), rest.begin() + 1, rest.end());
  return injected;
}

int run(const std::vector<std::string>& raw_args, Context& ctx) {
  CLI::App app{"Yorùbá diacritic restoration toolkit", "adr"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.set_version_flag("--version", "adr 1.0.0");

  std::uint64_t seed = 0;
  auto add_seed = [&](CLI::App* sub) {
    sub->add_option("--seed", seed, "random seed (default: ADR_SEED or 1)");
  };
  auto add_config = [](CLI::App* sub) {
    sub->add_option("--config", "key = value file supplying defaults");
  };

  PrepareArgs prep;
  auto* p = app.add_subcommand("prepare", "normalize raw text and write train/dev/test splits");
  p->add_option("--in", prep.inputs, "raw UTF-8 text files")
      ->required()->check(CLI::ExistingFile);
  p->add_option("--out", prep.out_dir, "output directory")->required();
  p->add_option("--prefix", prep.prefix, "file name prefix");
  p->add_option("--ratios", prep.ratios, "train,dev,test fractions")->capture_default_str();
  p->add_option("--punct", prep.punct, "characters removed as punctuation");
  p->add_option("--max-tokens", prep.max_tokens, "drop longer sentences")
      ->capture_default_str();
  add_seed(p);
  add_config(p);

  StatsArgs st;
  auto* s = app.add_subcommand("stats", "ambiguity statistics of a parallel corpus");
  s->add_option("--src", st.src)->required()->check(CLI::ExistingFile);
  s->add_option("--tgt", st.tgt)->required()->check(CLI::ExistingFile);
  s->add_flag("--weighted", st.weighted, "frequency-weighted LexDif");
  s->add_option("--lexicon", st.lexicon, "also write the lexicon TSV here");
  add_config(s);

  TrainLmArgs lm;
  auto* l = app.add_subcommand("train-lm", "train an interpolated n-gram model");
  l->add_option("--in", lm.input, "tokenized target sentences")
      ->required()->check(CLI::ExistingFile);
  l->add_option("--out", lm.output, "model TSV")->required();
  l->add_option("--order", lm.order)->capture_default_str()->check(CLI::Range(1, 3));
  l->add_option("--weights", lm.weights, "interpolation weights, lowest order first");
  l->add_option("--eval", lm.eval, "print perplexity on this file")->check(CLI::ExistingFile);
  add_config(l);

  BaselineArgs bl;
  auto* b = app.add_subcommand("baseline", "lookup restoration: unigram or bigram");
  b->add_option("method", bl.method)->required()->check(CLI::IsMember({"unigram", "bigram"}));
  b->add_option("--train-src", bl.train_src)->check(CLI::ExistingFile);
  b->add_option("--train-tgt", bl.train_tgt)->check(CLI::ExistingFile);
  b->add_option("--lexicon", bl.lexicon, "lexicon TSV")->check(CLI::ExistingFile);
  b->add_option("--lm", bl.lm, "order-2 model for bigram")->check(CLI::ExistingFile);
  b->add_option("--src", bl.src, "sentences to restore")->required()->check(CLI::ExistingFile);
  b->add_option("--tgt", bl.tgt, "gold targets; prints accuracy")->check(CLI::ExistingFile);
  b->add_option("--out", bl.output, "predictions file");
  add_config(b);

  TrainArgs tr;
  auto* t = app.add_subcommand("train", "train an encoder-decoder model");
  t->add_option("--data", tr.data, "directory with train/dev split files")
      ->check(CLI::ExistingDirectory);
  t->add_option("--prefix", tr.prefix);
  t->add_option("--train-src", tr.train_src)->check(CLI::ExistingFile);
  t->add_option("--train-tgt", tr.train_tgt)->check(CLI::ExistingFile);
  t->add_option("--dev-src", tr.dev_src)->check(CLI::ExistingFile);
  t->add_option("--dev-tgt", tr.dev_tgt)->check(CLI::ExistingFile);
  t->add_option("--model", tr.model, "checkpoint path (.adrckpt)")->required();
  t->add_option("--metrics", tr.metrics, "per-epoch metrics TSV");
  t->add_flag("--keep-last", tr.keep_last, "save the last epoch instead of the best on dev");
  tr.flags.attach(*t);
  add_seed(t);
  add_config(t);

  RestoreArgs rs;
  auto* r = app.add_subcommand("restore", "restore diacritics (stdin lines or --text)");
  r->add_option("--model", rs.model)->required()->check(CLI::ExistingFile);
  auto* text_opt = r->add_option("--text", rs.text, "one sentence");
  r->add_option("--beam", rs.beam, "beam width; 0 or 1 is greedy");
  r->add_option("--out", rs.output, "output file");
  add_config(r);

  EvalArgs ev;
  auto* e = app.add_subcommand("eval", "accuracy and perplexity on a parallel corpus");
  e->add_option("--model", ev.model)->required()->check(CLI::ExistingFile);
  e->add_option("--src", ev.src)->required()->check(CLI::ExistingFile);
  e->add_option("--tgt", ev.tgt)->required()->check(CLI::ExistingFile);
  e->add_option("--beam", ev.beam, "beam width; 0 or 1 is greedy");
  e->add_option("--threads", ev.threads)->capture_default_str()->check(CLI::PositiveNumber);
  e->add_option("--out", ev.output, "predictions file");
  add_config(e);

  AttentionArgs at;
  auto* a = app.add_subcommand("attention", "export an attention matrix as CSV");
  a->add_option("--model", at.model)->required()->check(CLI::ExistingFile);
  a->add_option("--source", at.source, "undiacritized sentence")->required();
  a->add_option("--target", at.target, "gold target; otherwise the model's output");
  a->add_option("--out", at.output, "CSV file");
  add_config(a);

  SynthArgs sy;
  auto* y = app.add_subcommand("synth", "generate a synthetic parallel corpus");
  y->add_option("--sentences", sy.sentences)->capture_default_str();
  y->add_option("--out", sy.out_dir, "write split files to this directory");
  y->add_option("--prefix", sy.prefix);
  y->add_option("--ratios", sy.ratios)->capture_default_str();
  y->add_option("--src", sy.src, "write the whole source side here");
  y->add_option("--tgt", sy.tgt, "write the whole target side here");
  y->add_option("--majority-share", sy.config.majority_share)->capture_default_str();
  y->add_option("--ambiguous-rate", sy.config.ambiguous_rate)->capture_default_str();
  y->add_option("--min-length", sy.config.min_length)->capture_default_str();
  y->add_option("--max-length", sy.config.max_length)->capture_default_str();
  add_seed(y);
  add_config(y);

  std::vector<std::string> args = apply_config(raw_args, app);
  std::reverse(args.begin(), args.end());
  try {
    app.parse(std::move(args));
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err, ctx.out, ctx.err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  std::uint64_t run_seed = default_seed();
  for (auto* sub : {p, t, y}) {
    if (sub->parsed() && sub->get_option("--seed")->count() > 0) run_seed = seed;
  }
  if (p->parsed()) run_prepare(prep, run_seed, ctx);
  if (s->parsed()) run_stats(st, ctx);
  if (l->parsed()) run_train_lm(lm, ctx);
  if (b->parsed()) run_baseline(bl, ctx);
  if (t->parsed()) run_train(tr, run_seed, ctx);
  if (r->parsed()) {
    rs.text_given = text_opt->count() > 0;
    run_restore(rs, ctx);
  }
  if (e->parsed()) run_eval(ev, ctx);
  if (a->parsed()) run_attention(at, ctx);
  if (y->parsed()) run_synth(sy, run_seed, ctx);
  return kExitOk;
}

}  // namespace

std::map<std::string, std::string> read_config_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::map<std::string, std::string> out;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path.string() + ":" + std::to_string(number) + ": expected key = value");
    }
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      value = value.substr(1, value.size() - 2);
    }
    if (key.empty()) throw ConfigError(path.string() + ":" + std::to_string(number) + ": empty key");
    std::replace(key.begin(), key.end(), '_', '-');
    out[key] = value;
  }
  return out;
}

std::uint64_t default_seed() {
  const char* env = std::getenv("ADR_SEED");
  if (env == nullptr || *env == '\0') return 1;
  const std::string s = env;
  if (!std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); })) {
    throw ConfigError("ADR_SEED must be an unsigned integer, got '" + s + "'");
  }
  try {
    return std::stoull(s);
  } catch (const std::out_of_range&) {
    throw ConfigError("ADR_SEED out of range: " + s);
  }
}

int dispatch(std::span<const std::string> args, std::istream& in, std::ostream& out,
             std::ostream& err) {
  Context ctx{in, out, err};
  try {
    return run(std::vector<std::string>(args.begin(), args.end()), ctx);
  } catch (const Error& e) {
    err << "adr: " << e.what() << '\n';
    switch (e.kind()) {
      case ErrorKind::kUsage: return kExitUsage;
      case ErrorKind::kData: return kExitData;
      case ErrorKind::kDivergence: return kExitDivergence;
    }
    return kExitData;
  } catch (const std::exception& e) {
    err << "adr: " << e.what() << '\n';
    return kExitData;
  }
}

int dispatch(int argc, const char* const* argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return dispatch(args, std::cin, std::cout, std::cerr);
}

}  // namespace adr::cli
