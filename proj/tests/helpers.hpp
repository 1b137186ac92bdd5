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

// Shared fixtures for the unit and acceptance suites: a compact sentence
// builder, deterministic random corpus generators, and the brute-force
// scoring oracle that recounts matches from scratch.

#ifndef RELSEQ_TESTS_HELPERS_HPP_
#define RELSEQ_TESTS_HELPERS_HPP_

#include <random>
#include <string>
#include <vector>

#include "relseq/corpus.hpp"
#include "relseq/evaluator.hpp"
#include "relseq/learner.hpp"
#include "relseq/lexicon.hpp"
#include "relseq/rules.hpp"

namespace relseq::testing {

// ---------------------------------------------------------------------------
// Sentence building
// ---------------------------------------------------------------------------

struct GroupOpts {
  std::string ne;
  std::vector<VerbProperty> vprops;
  int attach = -1;
  int head = -1;  // lexeme offset within the group; default last token
};

class SentenceBuilder {
 public:
  SentenceBuilder& group(GroupKind kind,
                         std::vector<std::pair<std::string, std::string>> tokens,
                         GroupOpts opts = {}) {
    SyntaxGroup g;
    g.id = static_cast<int>(s_.groups.size());
    g.kind = kind;
    g.span.lo = static_cast<int>(s_.lexemes.size());
    for (auto& [text, pos] : tokens) push_token(text, pos);
    g.span.hi = static_cast<int>(s_.lexemes.size()) - 1;
    g.head_index = opts.head >= 0 ? g.span.lo + opts.head : g.span.hi;
    if (!opts.ne.empty()) g.named_entity = opts.ne;
    for (VerbProperty p : opts.vprops) g.verb_properties.insert(p);
    if (opts.attach >= 0) g.attachment_target = opts.attach;
    s_.groups.push_back(std::move(g));
    return *this;
  }

  // A token outside any group (conjunction, punctuation).
  SentenceBuilder& loose(const std::string& text, const std::string& pos) {
    push_token(text, pos);
    return *this;
  }

  Sentence build() const { return s_; }

 private:
  void push_token(const std::string& text, const std::string& pos) {
    Lexeme lx;
    lx.text = text;
    lx.pos = pos;
    lx.index = static_cast<int>(s_.lexemes.size());
    s_.lexemes.push_back(std::move(lx));
  }

  Sentence s_;
};

inline RelationInstance rel(RelationLabel label, int source, int target) {
  return RelationInstance{label, source, target};
}

inline AnnotatedSentence annotated(Sentence s, RelationSet gold, RelationSet initial = {}) {
  return AnnotatedSentence{std::move(s), std::move(gold), std::move(initial)};
}

inline Condition cond(ConditionKind kind, int position, std::string argument = "",
                      bool negated = false) {
  Condition c;
  c.kind = kind;
  c.position = position;
  c.argument = std::move(argument);
  c.negated = negated;
  return c;
}

inline Condition between_cond(ConditionKind kind, int p1, int p2, std::string argument = "",
                              bool negated = false) {
  Condition c = cond(kind, p1, std::move(argument), negated);
  c.second_position = p2;
  return c;
}

inline Rule make_rule(GroupKind anchor, std::vector<Condition> conditions, ActionMode mode,
                      RelationLabel label, int offset) {
  Rule r;
  r.anchor_kind = anchor;
  r.conditions = std::move(conditions);
  r.action = Action{mode, label, offset};
  return r;
}

inline Rule normalized(Rule r) {
  std::sort(r.conditions.begin(), r.conditions.end(), condition_less);
  return r;
}

// ---------------------------------------------------------------------------
// Canonical fixtures
// ---------------------------------------------------------------------------

// "[The <noun>] [was] [very happy]", the copular pattern whose subject links
// to the group two to the right.
inline Sentence copular_sentence(const std::string& noun) {
  return SentenceBuilder()
      .group(GroupKind::Noun, {{"The", "DT"}, {noun, "NN"}})
      .group(GroupKind::Verb, {{"was", "VBD"}})
      .group(GroupKind::Adjective, {{"very", "RB"}, {"happy", "JJ"}})
      .loose(".", ".")
      .build();
}

// "[The <noun>] [was] [a winner]" variant with a noun complement.
inline Sentence copular_noun_sentence(const std::string& noun) {
  return SentenceBuilder()
      .group(GroupKind::Noun, {{"The", "DT"}, {noun, "NN"}})
      .group(GroupKind::Verb, {{"was", "VBD"}})
      .group(GroupKind::Noun, {{"a", "DT"}, {"winner", "NN"}})
      .loose(".", ".")
      .build();
}

// "[There] [are] [trees]": the existential distractor.
inline Sentence there_sentence() {
  return SentenceBuilder()
      .group(GroupKind::Noun, {{"There", "EX"}})
      .group(GroupKind::Verb, {{"are", "VBP"}})
      .group(GroupKind::Noun, {{"trees", "NNS"}})
      .loose(".", ".")
      .build();
}

// "[In] [the park] [was] [a bird]": distractor with an IN group to the left
// of the would-be anchor.
inline Sentence left_in_sentence() {
  return SentenceBuilder()
      .group(GroupKind::IN, {{"In", "IN"}}, {.attach = 2})
      .group(GroupKind::Noun, {{"the", "DT"}, {"park", "NN"}})
      .group(GroupKind::Verb, {{"was", "VBD"}})
      .group(GroupKind::Noun, {{"a", "DT"}, {"bird", "NN"}})
      .loose(".", ".")
      .build();
}

// "[The man] [saw] [the cat]": distractor whose verb is not a form of be.
inline Sentence transitive_sentence() {
  return SentenceBuilder()
      .group(GroupKind::Noun, {{"The", "DT"}, {"man", "NN"}})
      .group(GroupKind::Verb, {{"saw", "VBD"}})
      .group(GroupKind::Noun, {{"the", "DT"}, {"cat", "NN"}})
      .loose(".", ".")
      .build();
}

// A stem table mapping inflected forms of "be" to their stem.
inline LexiconBundle be_stems() {
  LexiconBundle lex;
  for (const char* form : {"was", "is", "are", "were", "been", "being", "am"})
    lex.add_stem(form, "be");
  return lex;
}

// The worked rule: a noun group whose right neighbor is headed by a form of
// "be", whose left neighbor is not an IN group and whose own head is not an
// existential "there" becomes the subject of the group two to its right.
inline Rule sample_rule() {
  return make_rule(GroupKind::Noun,
                   {cond(ConditionKind::HeadWord, 1, "be"),
                    cond(ConditionKind::GroupType, -1, "in", true),
                    cond(ConditionKind::HeadWord, 0, "there", true)},
                   ActionMode::Attach, RelationLabel::Subj, 2);
}

// Six copular sentences (half adjective complement, half noun complement)
// plus, optionally, two copies of each distractor class. Forcing the three
// distractor classes makes the three-condition rule the unique maximum.
inline AnnotatedCorpus copular_fixture(bool with_distractors) {
  AnnotatedCorpus corpus;
  const std::vector<std::string> adj_nouns = {"cat", "dog", "ship"};
  const std::vector<std::string> nom_nouns = {"boy", "girl", "bird"};
  for (const std::string& n : adj_nouns)
    corpus.sentences.push_back(annotated(copular_sentence(n), {rel(RelationLabel::Subj, 0, 2)}));
  for (const std::string& n : nom_nouns)
    corpus.sentences.push_back(
        annotated(copular_noun_sentence(n), {rel(RelationLabel::Subj, 0, 2)}));
  if (with_distractors) {
    for (int i = 0; i < 2; ++i) {
      corpus.sentences.push_back(annotated(there_sentence(), {}));
      corpus.sentences.push_back(annotated(left_in_sentence(), {}));
      corpus.sentences.push_back(annotated(transitive_sentence(), {}));
    }
  }
  return corpus;
}

inline TrainingConfig copular_config() {
  TrainingConfig cfg;
  cfg.lexeme_whitelist.insert("be");
  cfg.lexeme_whitelist.insert("there");
  return cfg;
}

// "I saw the cat that ran" with its four gold arcs, including the
// subject/modifier cycle between the cat and ran.
inline AnnotatedSentence cat_sentence() {
  Sentence s = SentenceBuilder()
                   .group(GroupKind::Noun, {{"I", "PRP"}})
                   .group(GroupKind::Verb, {{"saw", "VBD"}})
                   .group(GroupKind::Noun, {{"the", "DT"}, {"cat", "NN"}})
                   .group(GroupKind::IN, {{"that", "WDT"}}, {.attach = 2})
                   .group(GroupKind::Verb, {{"ran", "VBD"}})
                   .loose(".", ".")
                   .build();
  RelationSet gold = {rel(RelationLabel::Subj, 0, 1), rel(RelationLabel::Obj, 2, 1),
                      rel(RelationLabel::Subj, 2, 4), rel(RelationLabel::Mod, 4, 2)};
  return annotated(std::move(s), std::move(gold));
}

// ---------------------------------------------------------------------------
// Random corpora
// ---------------------------------------------------------------------------

struct RandomCorpusParams {
  int max_sentences = 5;
  int max_groups = 6;
  int max_arcs = 6;
  int max_distance = 3;
  bool allow_long_arcs = false;  // occasionally exceed max_distance, gold only
};

inline Sentence random_sentence(std::mt19937& rng, int n_groups) {
  static const std::vector<std::pair<std::string, std::string>> nouns = {
      {"cat", "NN"}, {"dog", "NN"}, {"ship", "NN"}, {"oil", "NN"},
      {"man", "NN"}, {"trees", "NNS"}, {"word", "NN"}};
  static const std::vector<std::pair<std::string, std::string>> verbs = {
      {"saw", "VBD"}, {"ran", "VBD"}, {"was", "VBD"}, {"wrote", "VBD"}, {"means", "VBZ"}};
  static const std::vector<std::pair<std::string, std::string>> ins = {
      {"with", "IN"}, {"for", "IN"}, {"at", "IN"}, {"that", "WDT"}};
  static const std::vector<std::pair<std::string, std::string>> advs = {{"today", "RB"},
                                                                        {"quickly", "RB"}};
  static const std::vector<std::pair<std::string, std::string>> adjs = {{"happy", "JJ"},
                                                                        {"red", "JJ"}};
  std::uniform_int_distribution<int> kind_die(0, 99);
  std::uniform_int_distribution<int> coin(0, 1);

  SentenceBuilder builder;
  std::vector<GroupKind> kinds;
  for (int g = 0; g < n_groups; ++g) {
    const int roll = kind_die(rng);
    GroupKind kind = roll < 45   ? GroupKind::Noun
                     : roll < 75 ? GroupKind::Verb
                     : roll < 88 ? GroupKind::IN
                     : roll < 95 ? GroupKind::Adjective
                                 : GroupKind::Adverb;
    kinds.push_back(kind);
    auto pick = [&](const auto& words) {
      std::uniform_int_distribution<size_t> die(0, words.size() - 1);
      return words[die(rng)];
    };
    GroupOpts opts;
    std::vector<std::pair<std::string, std::string>> tokens;
    switch (kind) {
      case GroupKind::Noun:
        if (coin(rng)) tokens.push_back({"the", "DT"});
        tokens.push_back(pick(nouns));
        if (kind_die(rng) < 10) opts.ne = "person";
        break;
      case GroupKind::Verb:
        tokens.push_back(pick(verbs));
        if (kind_die(rng) < 15)
          opts.vprops = {kind_die(rng) < 50 ? VerbProperty::Passive
                                            : VerbProperty::Infinitival};
        break;
      case GroupKind::IN:
        tokens.push_back(pick(ins));
        break;
      case GroupKind::Adjective:
        tokens.push_back(pick(adjs));
        break;
      case GroupKind::Adverb:
        tokens.push_back(pick(advs));
        break;
    }
    builder.group(kind, tokens, opts);
    if (g + 1 < n_groups && kind_die(rng) < 12) builder.loose("and", "CC");
  }
  Sentence s = builder.build();
  // Attachments for IN groups, pointing at some earlier or later group.
  for (SyntaxGroup& g : s.groups) {
    if (g.kind != GroupKind::IN || s.groups.size() < 2) continue;
    if (kind_die(rng) < 60) {
      std::uniform_int_distribution<int> target(0, static_cast<int>(s.groups.size()) - 1);
      int t = target(rng);
      if (t != g.id) g.attachment_target = t;
    }
  }
  return s;
}

inline RelationSet random_relations(std::mt19937& rng, int n_groups, int max_arcs,
                                    int max_distance, bool allow_long) {
  RelationSet out;
  if (n_groups < 2) return out;
  std::uniform_int_distribution<int> arc_count(0, max_arcs);
  std::uniform_int_distribution<int> group_die(0, n_groups - 1);
  std::uniform_int_distribution<int> label_die(0, kRelationLabelCount - 1);
  std::uniform_int_distribution<int> pct(0, 99);
  const int n = arc_count(rng);
  for (int i = 0; i < n; ++i) {
    const int source = group_die(rng);
    int target = group_die(rng);
    if (target == source) continue;
    if (!allow_long || pct(rng) >= 10) {
      if (std::abs(group_offset(source, target)) > max_distance) continue;
    }
    out.insert(rel(static_cast<RelationLabel>(label_die(rng)), source, target));
  }
  return out;
}

inline AnnotatedCorpus random_corpus(std::mt19937& rng, RandomCorpusParams params = {}) {
  AnnotatedCorpus corpus;
  std::uniform_int_distribution<int> sentence_count(1, params.max_sentences);
  std::uniform_int_distribution<int> group_count(1, params.max_groups);
  const int n = sentence_count(rng);
  for (int i = 0; i < n; ++i) {
    const int groups = group_count(rng);
    Sentence s = random_sentence(rng, groups);
    RelationSet gold = random_relations(rng, groups, params.max_arcs, params.max_distance,
                                        params.allow_long_arcs);
    corpus.sentences.push_back(annotated(std::move(s), std::move(gold)));
  }
  return corpus;
}

// Perturbs a gold labeling into a plausible system response: drops some arcs,
// mislabels some (within the modifier-ish family and generally), adds noise.
inline std::vector<RelationSet> perturbed_response(std::mt19937& rng,
                                                   const AnnotatedCorpus& corpus) {
  std::uniform_int_distribution<int> pct(0, 99);
  std::uniform_int_distribution<int> label_die(0, kRelationLabelCount - 1);
  static const std::vector<RelationLabel> modifiers = {
      RelationLabel::Mod, RelationLabel::ModLoc, RelationLabel::ModTime,
      RelationLabel::LocObj, RelationLabel::PpObj};
  std::vector<RelationSet> out;
  for (const AnnotatedSentence& as : corpus.sentences) {
    RelationSet rels;
    for (RelationInstance r : as.gold) {
      const int roll = pct(rng);
      if (roll < 20) continue;  // miss
      if (roll < 50) {          // mislabel, mostly within the confusable family
        if (roll < 42) {
          std::uniform_int_distribution<size_t> die(0, modifiers.size() - 1);
          r.label = modifiers[die(rng)];
        } else {
          r.label = static_cast<RelationLabel>(label_die(rng));
        }
      }
      rels.insert(r);
    }
    const int n_groups = as.sentence.group_count();
    if (n_groups >= 2 && pct(rng) < 30) {
      std::uniform_int_distribution<int> group_die(0, n_groups - 1);
      const int source = group_die(rng);
      const int target = group_die(rng);
      if (source != target)
        rels.insert(rel(static_cast<RelationLabel>(label_die(rng)), source, target));
    }
    out.push_back(std::move(rels));
  }
  return out;
}

// A random state for oracle tests: the gold labeling with arcs dropped,
// relabeled and added, so both attach and unattach candidates exist.
inline std::vector<RelationSet> random_state(std::mt19937& rng,
                                             const AnnotatedCorpus& corpus) {
  return perturbed_response(rng, corpus);
}

// ---------------------------------------------------------------------------
// Brute-force oracle
// ---------------------------------------------------------------------------

inline long count_matches(const std::vector<RelationSet>& state,
                          const AnnotatedCorpus& corpus) {
  long matches = 0;
  for (size_t si = 0; si < corpus.sentences.size(); ++si)
    for (const RelationInstance& r : state[si])
      if (corpus.sentences[si].gold.count(r)) ++matches;
  return matches;
}

inline long count_spuria(const std::vector<RelationSet>& state,
                         const AnnotatedCorpus& corpus) {
  long spuria = 0;
  for (size_t si = 0; si < corpus.sentences.size(); ++si)
    for (const RelationInstance& r : state[si])
      if (!corpus.sentences[si].gold.count(r)) ++spuria;
  return spuria;
}

// Recomputes a candidate's score from scratch: apply the rule, then count the
// four deltas by set comparison of the before and after states.
inline CandidateScore brute_force_score(const Rule& r, const std::vector<RelationSet>& state,
                                        const AnnotatedCorpus& corpus,
                                        const LexiconBundle& lex) {
  CandidateScore score;
  score.rule = r;
  for (size_t si = 0; si < corpus.sentences.size(); ++si) {
    const RelationSet& before = state[si];
    const RelationSet after = apply_rule(r, corpus.sentences[si].sentence, before, lex);
    const RelationSet& gold = corpus.sentences[si].gold;
    for (const RelationInstance& t : after) {
      if (before.count(t)) continue;
      gold.count(t) ? ++score.gained : ++score.spurious;
    }
    for (const RelationInstance& t : before) {
      if (after.count(t)) continue;
      gold.count(t) ? ++score.lost : ++score.unspurious;
    }
  }
  return score;
}

inline std::string serialize_rules_to_string(const RuleSequence& seq) {
  std::ostringstream out;
  serialize_rules(seq, out);
  return out.str();
}

inline std::string serialize_corpus_to_string(const AnnotatedCorpus& corpus) {
  std::ostringstream out;
  serialize_corpus(corpus, out);
  return out.str();
}

}  // namespace relseq::testing

#endif  // RELSEQ_TESTS_HELPERS_HPP_
