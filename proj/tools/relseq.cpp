// Copyright 2026 The relseq Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// relseq: train, apply, evaluate and inspect grammatical-relation rule
// sequences over chunked corpora.
//
// Exit codes: 0 success, 1 validation or semantic error, 2 I/O error.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "relseq/corpus.hpp"
#include "relseq/evaluator.hpp"
#include "relseq/learner.hpp"
#include "relseq/lexicon.hpp"
#include "relseq/manifest.hpp"
#include "relseq/rules.hpp"
#include "relseq/version.hpp"

namespace {

using namespace relseq;
namespace fs = std::filesystem;

enum class LogLevel { Quiet, Info, Debug };

LogLevel log_level() {
  const char* env = std::getenv("RELSEQ_LOG");
  if (!env) return LogLevel::Info;
  const std::string value = detail::to_lower(env);
  if (value == "quiet") return LogLevel::Quiet;
  if (value == "debug") return LogLevel::Debug;
  return LogLevel::Info;
}

void info(const std::string& message) {
  if (log_level() != LogLevel::Quiet) std::cerr << message << '\n';
}

struct CommonOpts {
  std::string corpus_path;
  std::string lexicon_dir;
  std::string config_path;
  std::string rules_path;
  std::string out_path;
  int jobs = 1;
  std::optional<int> threshold;
  std::optional<int> max_distance;
  std::optional<int> max_conditions;
};

TrainingConfig resolve_config(const CommonOpts& opts) {
  TrainingConfig cfg;
  if (!opts.config_path.empty()) cfg = load_config(opts.config_path);
  if (opts.threshold) cfg.set("gain-threshold", std::to_string(*opts.threshold));
  if (opts.max_distance) cfg.set("max-distance", std::to_string(*opts.max_distance));
  if (opts.max_conditions) cfg.set("max-conditions", std::to_string(*opts.max_conditions));
  cfg.check();
  return cfg;
}

int cmd_train(const CommonOpts& opts) {
  const auto started = std::chrono::steady_clock::now();
  const TrainingConfig cfg = resolve_config(opts);
  const AnnotatedCorpus corpus = load_corpus(opts.corpus_path);
  const LexiconBundle lex = load_lexicons(opts.lexicon_dir);

  std::ostringstream log;
  TrainOptions train_opts;
  train_opts.jobs = opts.jobs;
  train_opts.log = &log;
  const TrainResult result = train_detailed(corpus, cfg, lex, train_opts);
  if (log_level() == LogLevel::Debug) std::cerr << log.str();

  save_rules(result.sequence, opts.out_path);
  const fs::path log_path = opts.out_path + ".log";
  write_file(log_path, log.str());

  RunManifest manifest;
  manifest.command = "train";
  manifest.config = cfg.snapshot();
  manifest.add_input(opts.corpus_path);
  if (!opts.config_path.empty()) manifest.add_input(opts.config_path);
  manifest.add_output(opts.out_path);
  manifest.add_output(log_path);
  manifest.duration_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                             std::chrono::steady_clock::now() - started)
                             .count();
  manifest.save(opts.out_path + ".manifest");

  info("trained " + std::to_string(result.sequence.rules.size()) + " rules in " +
       std::to_string(result.log.size()) + " iterations -> " + opts.out_path);
  return 0;
}

int cmd_apply(const CommonOpts& opts) {
  const RuleSequence seq = load_rules(opts.rules_path);
  AnnotatedCorpus corpus = load_corpus(opts.corpus_path);
  const LexiconBundle lex = load_lexicons(opts.lexicon_dir);
  const std::vector<RelationSet> predicted = apply_sequence(seq, corpus, lex);
  for (size_t si = 0; si < corpus.sentences.size(); ++si)
    corpus.sentences[si].initial = predicted[si];
  save_corpus(corpus, opts.out_path);
  info("applied " + std::to_string(seq.rules.size()) + " rules to " +
       std::to_string(corpus.size()) + " sentences -> " + opts.out_path);
  return 0;
}

// The predicted side of an evaluation is the `initial` field, which is where
// `apply` writes its output.
int cmd_eval(const std::string& predicted_path, const std::string& gold_path, bool merge_mod,
             bool merge_combined) {
  const AnnotatedCorpus predicted_corpus = load_corpus(predicted_path);
  const AnnotatedCorpus gold_corpus = load_corpus(gold_path);
  if (predicted_corpus.size() != gold_corpus.size())
    throw ValidationError("sentence:" +
                          std::to_string(std::min(predicted_corpus.size(), gold_corpus.size())) +
                          " corpus shapes differ");
  std::vector<RelationSet> predicted, gold;
  for (size_t si = 0; si < gold_corpus.size(); ++si) {
    if (predicted_corpus.sentences[si].sentence.group_count() !=
        gold_corpus.sentences[si].sentence.group_count())
      throw ValidationError("sentence:" + std::to_string(si) + " group counts differ");
    predicted.push_back(predicted_corpus.sentences[si].initial);
    gold.push_back(gold_corpus.sentences[si].gold);
  }
  LabelMerge merge = LabelMerge::identity();
  if (merge_mod) merge = LabelMerge::modifiers();
  if (merge_combined) merge = LabelMerge::combined();
  std::cout << render_report(score(predicted, gold, merge));
  return 0;
}

int cmd_inspect(const CommonOpts& opts, bool propositions) {
  const AnnotatedCorpus corpus = load_corpus(opts.corpus_path);
  const LexiconBundle lex = load_lexicons(opts.lexicon_dir);

  long groups = 0, arcs = 0;
  std::map<std::string, long> by_label;
  for (const AnnotatedSentence& as : corpus.sentences) {
    groups += as.sentence.group_count();
    arcs += static_cast<long>(as.gold.size());
    for (const RelationInstance& r : as.gold) by_label[relation_label_name(r.label)] += 1;
  }
  std::cout << "sentences: " << corpus.size() << "\n"
            << "groups: " << groups << "\n"
            << "gold relations: " << arcs << "\n";
  for (const auto& [name, count] : by_label)
    std::cout << "  " << name << ": " << count << "\n";

  if (!opts.rules_path.empty()) {
    const RuleSequence seq = load_rules(opts.rules_path);
    std::cout << "rules (" << seq.rules.size() << "):\n";
    for (size_t i = 0; i < seq.rules.size(); ++i)
      std::cout << "  " << i + 1 << ". " << render_rule(seq.rules[i]) << "\n";
  }

  if (propositions) {
    for (size_t si = 0; si < corpus.size(); ++si) {
      std::cout << "sentence " << si << ":\n";
      for (const std::string& p :
           emit_propositions(corpus.sentences[si].sentence, corpus.sentences[si].gold, lex))
        std::cout << "  " << p << "\n";
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"relseq: learns and applies grammatical-relation rule sequences"};
  app.set_version_flag("--version", std::string(kToolName) + " " + kToolVersion);
  app.require_subcommand(1);

  CommonOpts opts;
  std::string eval_predicted, eval_gold;
  bool merge_mod = false, merge_combined = false, propositions = false;

  CLI::App* train = app.add_subcommand("train", "learn a rule sequence from a corpus");
  train->add_option("--corpus", opts.corpus_path, "annotated corpus file")->required();
  train->add_option("--lexicons", opts.lexicon_dir, "lexicon directory");
  train->add_option("--config", opts.config_path, "key=value training configuration");
  train->add_option("--out", opts.out_path, "output rule file")->required();
  train->add_option("--jobs", opts.jobs, "scoring threads (result independent of this)");
  train->add_option("--threshold", opts.threshold, "gain threshold override");
  train->add_option("--max-distance", opts.max_distance, "max relation distance override");
  train->add_option("--max-conditions", opts.max_conditions, "max rule conditions override");

  CLI::App* apply = app.add_subcommand("apply", "run a rule sequence over a corpus");
  apply->add_option("--rules", opts.rules_path, "rule file")->required();
  apply->add_option("--corpus", opts.corpus_path, "corpus file")->required();
  apply->add_option("--lexicons", opts.lexicon_dir, "lexicon directory");
  apply->add_option("--out", opts.out_path, "output corpus with predictions")->required();

  CLI::App* eval = app.add_subcommand("eval", "score predictions against gold annotations");
  eval->add_option("predicted", eval_predicted, "corpus whose initial field holds predictions")
      ->required();
  eval->add_option("gold", eval_gold, "corpus whose gold field holds the key")->required();
  eval->add_flag("--merge-mod", merge_mod, "merge generic/location/time modifiers");
  eval->add_flag("--merge-combined", merge_combined,
                 "also merge loc-obj and pp-mediated arguments");

  CLI::App* inspect = app.add_subcommand("inspect", "summarize a corpus or rule file");
  inspect->add_option("--corpus", opts.corpus_path, "corpus file")->required();
  inspect->add_option("--rules", opts.rules_path, "rule file to list");
  inspect->add_option("--lexicons", opts.lexicon_dir, "lexicon directory");
  inspect->add_flag("--propositions", propositions, "emit propositional forms");

  try {
    app.parse(argc, argv);
    if (train->parsed()) return cmd_train(opts);
    if (apply->parsed()) return cmd_apply(opts);
    if (eval->parsed()) return cmd_eval(eval_predicted, eval_gold, merge_mod, merge_combined);
    if (inspect->parsed()) return cmd_inspect(opts, propositions);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
