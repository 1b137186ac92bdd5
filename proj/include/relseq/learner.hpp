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

// Greedy error-driven training. Each iteration scores candidate rules by net
// gain (errors repaired minus errors introduced), picks the best one — ties
// favor fewer conditions, then canonical rule order — applies it, and stops
// when no rule reaches the gain threshold.
//
// Candidates are grounded in the current error sites: an attach rule is
// anchored at the source of a missing gold triple, an unattach rule at the
// source of a spurious one. Condition values are instantiated from what is
// actually observed around those sites and around the sites where the bare
// action would introduce a new error, which is what makes negated tests like
// "head word is not X" discoverable.
//
// A rule's action only interacts with rules carrying the same (label, offset):
// scores in every other partition survive the application of a winner
// unchanged, so partitions are scored independently (and in parallel) and
// only the winner's partition is rescored between iterations.

#ifndef RELSEQ_LEARNER_HPP_
#define RELSEQ_LEARNER_HPP_

#include <atomic>
#include <bit>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "relseq/corpus.hpp"
#include "relseq/lexicon.hpp"
#include "relseq/rules.hpp"
#include "relseq/util.hpp"

namespace relseq {

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

struct TrainingConfig {
  int gain_threshold = 4;
  int max_conditions = 3;   // in addition to the anchor-kind constraint
  int max_distance = 3;     // longest learnable relation, in groups

  // The only words single-lexeme tests may mention.
  std::set<std::string> lexeme_whitelist = {"of", "?",    "the",   "a",    "an",
                                            "this", "that", "these", "those"};

  // Tests whose negation the learner may not propose.
  std::set<ConditionKind> negation_forbidden = {ConditionKind::GroupContainsLexeme,
                                                ConditionKind::BetweenGroupsLexeme,
                                                ConditionKind::GroupContainsPos};

  void check() const {
    if (gain_threshold < 1) throw ValidationError("gain-threshold must be >= 1");
    if (max_conditions < 0) throw ValidationError("max-conditions must be >= 0");
    if (max_distance < 1) throw ValidationError("max-distance must be >= 1");
  }

  bool negation_allowed(ConditionKind k) const { return negation_forbidden.count(k) == 0; }

  // Flat key=value form, sorted by key; embedded in rule files and manifests.
  std::vector<std::pair<std::string, std::string>> snapshot() const {
    std::vector<std::string> forbidden;
    for (ConditionKind k : negation_forbidden) forbidden.push_back(condition_kind_name(k));
    std::sort(forbidden.begin(), forbidden.end());
    return {
        {"gain-threshold", std::to_string(gain_threshold)},
        {"lexeme-whitelist", detail::join(lexeme_whitelist, ",")},
        {"max-conditions", std::to_string(max_conditions)},
        {"max-distance", std::to_string(max_distance)},
        {"negation-forbidden", detail::join(forbidden, ",")},
    };
  }

  // Applies one configuration entry. Accepted keys: gain-threshold,
  // max-conditions, max-distance, lexeme-whitelist, negation-forbidden and
  // per-kind overrides negate.<condition-kind>=true|false.
  void set(const std::string& key, const std::string& value) {
    auto to_int = [&](const std::string& v) {
      try {
        size_t used = 0;
        int out = std::stoi(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return out;
      } catch (const std::exception&) {
        throw ParseError(0, "value of '" + key + "' must be an integer, got '" + v + "'");
      }
    };
    if (key == "gain-threshold") {
      gain_threshold = to_int(value);
    } else if (key == "max-conditions") {
      max_conditions = to_int(value);
    } else if (key == "max-distance") {
      max_distance = to_int(value);
    } else if (key == "lexeme-whitelist") {
      lexeme_whitelist.clear();
      for (const std::string& w : detail::split(value, ','))
        if (!w.empty()) lexeme_whitelist.insert(detail::to_lower(w));
    } else if (key == "negation-forbidden") {
      negation_forbidden.clear();
      for (const std::string& name : detail::split(value, ','))
        if (!name.empty()) negation_forbidden.insert(condition_kind_from_name(name));
    } else if (key.rfind("negate.", 0) == 0) {
      ConditionKind k = condition_kind_from_name(key.substr(7));
      if (value == "true")
        negation_forbidden.erase(k);
      else if (value == "false")
        negation_forbidden.insert(k);
      else
        throw ParseError(0, "value of '" + key + "' must be true or false");
    } else {
      throw ParseError(0, "unknown configuration key '" + key + "'");
    }
  }
};

// Flat key=value file; '#' starts a comment line.
inline void parse_config(std::istream& in, TrainingConfig* cfg) {
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::is_blank(line) || detail::trim(line)[0] == '#') continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError(lineno, "expected key=value, got '" + detail::trim(line) + "'");
    try {
      cfg->set(detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)));
    } catch (const ParseError& e) {
      throw ParseError(lineno, e.what());
    }
  }
}

inline TrainingConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path.string());
  TrainingConfig cfg;
  try {
    parse_config(in, &cfg);
  } catch (const ParseError& e) {
    throw ParseError(e.line(), path.string() + ": " + e.what());
  }
  return cfg;
}

inline TrainingConfig config_from_snapshot(
    const std::vector<std::pair<std::string, std::string>>& snapshot) {
  TrainingConfig cfg;
  for (const auto& [key, value] : snapshot) cfg.set(key, value);
  return cfg;
}

// ---------------------------------------------------------------------------
// Net gain
// ---------------------------------------------------------------------------

struct CandidateScore {
  Rule rule;
  int gained = 0;      // gold triples newly matched
  int spurious = 0;    // non-gold triples newly produced
  int lost = 0;        // gold matches destroyed
  int unspurious = 0;  // spurious triples removed

  int net() const { return gained + unspurious - spurious - lost; }
};

// Scores one rule against the current labeling without applying it.
inline CandidateScore net_gain(const Rule& r, const std::vector<RelationSet>& state,
                               const AnnotatedCorpus& corpus, const LexiconBundle& lex) {
  CandidateScore score;
  score.rule = r;
  for (size_t si = 0; si < corpus.sentences.size(); ++si) {
    const Sentence& s = corpus.sentences[si].sentence;
    const RelationSet& gold = corpus.sentences[si].gold;
    const RelationSet& current = state[si];
    for (int anchor : matching_anchors(r, s, lex)) {
      const RelationInstance t{r.action.label, anchor, anchor + r.action.offset};
      const bool in_state = current.count(t) > 0;
      const bool in_gold = gold.count(t) > 0;
      if (r.action.mode == ActionMode::Attach) {
        if (in_state) continue;  // already there, no effect
        in_gold ? ++score.gained : ++score.spurious;
      } else {
        if (!in_state) continue;  // nothing to remove
        in_gold ? ++score.lost : ++score.unspurious;
      }
    }
  }
  return score;
}

// ---------------------------------------------------------------------------
// Candidate generation
// ---------------------------------------------------------------------------

namespace detail {

// Rules that (un)attach different labels or different offsets never disturb
// each other's scores.
struct PartitionKey {
  RelationLabel label = RelationLabel::Subj;
  int offset = 0;

  bool operator<(const PartitionKey& o) const {
    return std::tie(label, offset) < std::tie(o.label, o.offset);
  }
  bool operator==(const PartitionKey&) const = default;
};

struct Site {
  int sentence = 0;
  int anchor = 0;
};

// One unit of search: all rules sharing an anchor kind and an action.
struct Family {
  GroupKind kind = GroupKind::Noun;
  ActionMode mode = ActionMode::Attach;
  RelationLabel label = RelationLabel::Subj;
  int offset = 0;
  std::vector<Site> fix;   // the bare action repairs one error here
  std::vector<Site> harm;  // the bare action introduces one error here
};

class Bits {
 public:
  explicit Bits(size_t n = 0, bool ones = false)
      : n_(n), w_((n + 63) / 64, ones ? ~0ull : 0ull) {
    if (ones && n_ % 64 != 0 && !w_.empty()) w_.back() = (1ull << (n_ % 64)) - 1;
  }
  void set(size_t i) { w_[i / 64] |= 1ull << (i % 64); }
  bool any() const {
    for (uint64_t w : w_)
      if (w) return true;
    return false;
  }
  int count() const {
    int c = 0;
    for (uint64_t w : w_) c += std::popcount(w);
    return c;
  }
  Bits operator&(const Bits& o) const {
    Bits out(n_);
    for (size_t i = 0; i < w_.size(); ++i) out.w_[i] = w_[i] & o.w_[i];
    return out;
  }
  bool operator==(const Bits&) const = default;

 private:
  size_t n_;
  std::vector<uint64_t> w_;
};

struct Atom {
  Condition cond;
  Bits fix_true;
  Bits harm_true;
};

inline std::set<PartitionKey> active_partitions(const std::vector<RelationSet>& state,
                                                const AnnotatedCorpus& corpus,
                                                const TrainingConfig& cfg) {
  std::set<PartitionKey> keys;
  for (size_t si = 0; si < corpus.sentences.size(); ++si) {
    auto add_errors = [&](const RelationSet& a, const RelationSet& b) {
      for (const RelationInstance& r : a) {
        if (b.count(r)) continue;
        const int offset = group_offset(r.source, r.target);
        if (std::abs(offset) <= cfg.max_distance)
          keys.insert(PartitionKey{r.label, offset});
      }
    };
    add_errors(corpus.sentences[si].gold, state[si]);  // missing triples
    add_errors(state[si], corpus.sentences[si].gold);  // spurious triples
  }
  return keys;
}

inline std::vector<Family> build_families(PartitionKey key,
                                          const std::vector<RelationSet>& state,
                                          const AnnotatedCorpus& corpus) {
  std::map<std::pair<GroupKind, ActionMode>, Family> fams;
  auto family = [&](GroupKind kind, ActionMode mode) -> Family& {
    Family& f = fams[{kind, mode}];
    f.kind = kind;
    f.mode = mode;
    f.label = key.label;
    f.offset = key.offset;
    return f;
  };

  for (size_t si = 0; si < corpus.sentences.size(); ++si) {
    const Sentence& s = corpus.sentences[si].sentence;
    for (int a = 0; a < s.group_count(); ++a) {
      if (!s.has_group(a + key.offset)) continue;
      const RelationInstance t{key.label, a, a + key.offset};
      const bool in_state = state[si].count(t) > 0;
      const bool in_gold = corpus.sentences[si].gold.count(t) > 0;
      const GroupKind kind = s.groups[static_cast<size_t>(a)].kind;
      if (in_gold && !in_state)
        family(kind, ActionMode::Attach).fix.push_back({static_cast<int>(si), a});
      else if (!in_gold && in_state)
        family(kind, ActionMode::Unattach).fix.push_back({static_cast<int>(si), a});
    }
  }

  // Harm sites, only for families that have something to fix.
  for (auto& [id, fam] : fams) {
    if (fam.fix.empty()) continue;
    for (size_t si = 0; si < corpus.sentences.size(); ++si) {
      const Sentence& s = corpus.sentences[si].sentence;
      for (int a = 0; a < s.group_count(); ++a) {
        if (s.groups[static_cast<size_t>(a)].kind != fam.kind) continue;
        if (!s.has_group(a + key.offset)) continue;
        const RelationInstance t{key.label, a, a + key.offset};
        const bool in_state = state[si].count(t) > 0;
        const bool in_gold = corpus.sentences[si].gold.count(t) > 0;
        const bool harmful = fam.mode == ActionMode::Attach ? (!in_state && !in_gold)
                                                            : (in_state && in_gold);
        if (harmful) fam.harm.push_back({static_cast<int>(si), a});
      }
    }
  }

  std::vector<Family> out;
  for (auto& [id, fam] : fams)
    if (!fam.fix.empty()) out.push_back(std::move(fam));
  return out;
}

// Collects every condition observable around the family's sites. Negated
// twins are added where the policy allows them.
inline std::vector<Atom> build_atom_pool(const Family& fam, const AnnotatedCorpus& corpus,
                                         const TrainingConfig& cfg,
                                         const LexiconBundle& lex) {
  const int wlo = condition_window_lo(fam.offset);
  const int whi = condition_window_hi(fam.offset);
  std::set<Condition> seen;
  auto add = [&](ConditionKind kind, int pos, std::optional<int> pos2,
                 const std::string& arg) {
    Condition c;
    c.kind = kind;
    c.position = pos;
    c.second_position = pos2;
    c.argument = arg;
    seen.insert(c);
  };
  auto whitelisted_forms = [&](const std::string& surface) {
    std::set<std::string> out;
    const std::string lower = to_lower(surface);
    if (cfg.lexeme_whitelist.count(lower)) out.insert(lower);
    for (const std::string& stem : lex.stems_of(surface))
      if (cfg.lexeme_whitelist.count(stem)) out.insert(stem);
    return out;
  };

  std::vector<Site> sites = fam.fix;
  sites.insert(sites.end(), fam.harm.begin(), fam.harm.end());
  for (const Site& site : sites) {
    const Sentence& s = corpus.sentences[static_cast<size_t>(site.sentence)].sentence;
    for (int p = wlo; p <= whi; ++p) {
      const int gi = site.anchor + p;
      if (!s.has_group(gi)) continue;
      const SyntaxGroup& g = s.groups[static_cast<size_t>(gi)];
      const Lexeme& head = s.lexemes[static_cast<size_t>(g.head_index)];
      // The anchor's own type is already fixed by the rule, skip position 0.
      if (p != 0) add(ConditionKind::GroupType, p, {}, group_kind_name(g.kind));
      for (VerbProperty vp : g.verb_properties)
        add(ConditionKind::VerbGroupProperty, p, {}, verb_property_name(vp));
      if (gi == 0) add(ConditionKind::SentenceEndGroup, p, {}, "first");
      if (gi == s.group_count() - 1) add(ConditionKind::SentenceEndGroup, p, {}, "last");
      if (p == 0) {
        for (const SyntaxGroup& other : s.groups)
          if (other.kind == GroupKind::IN && other.attachment_target &&
              *other.attachment_target == gi)
            add(ConditionKind::PPAttachment, 0, {}, "");
      }
      for (int i = g.span.lo; i <= g.span.hi; ++i) {
        const Lexeme& lx = s.lexemes[static_cast<size_t>(i)];
        for (const std::string& w : whitelisted_forms(lx.text))
          add(ConditionKind::GroupContainsLexeme, p, {}, w);
        add(ConditionKind::GroupContainsPos, p, {}, lx.pos);
      }
      for (const std::string& w : whitelisted_forms(head.text))
        add(ConditionKind::HeadWord, p, {}, w);
      add(ConditionKind::HeadPos, p, {}, head.pos);
      if (g.named_entity) add(ConditionKind::HeadInNamedEntity, p, {}, to_lower(*g.named_entity));
      for (const std::string& cat : lex.subcat_categories_of(head.text))
        add(ConditionKind::HeadSubcatCategory, p, {}, cat);
      for (const std::string& cls : lex.classes_of(head.text, g.kind))
        add(ConditionKind::HeadSemanticClass, p, {}, cls);
      for (const auto& [name, list] : lex.word_lists())
        if (list.members.count(to_lower(head.text)))
          add(ConditionKind::HeadInWordList, p, {}, name);
    }
    for (int p1 = wlo; p1 <= whi; ++p1) {
      for (int p2 = p1 + 1; p2 <= whi; ++p2) {
        const int gi = site.anchor + p1;
        const int gj = site.anchor + p2;
        if (!s.has_group(gi) || !s.has_group(gj)) continue;
        const SyntaxGroup& a = s.groups[static_cast<size_t>(gi)];
        const SyntaxGroup& b = s.groups[static_cast<size_t>(gj)];
        for (int i = a.span.hi + 1; i < b.span.lo; ++i) {
          const Lexeme& lx = s.lexemes[static_cast<size_t>(i)];
          for (const std::string& w : whitelisted_forms(lx.text))
            add(ConditionKind::BetweenGroupsLexeme, p1, p2, w);
          add(ConditionKind::BetweenGroupsPos, p1, p2, lx.pos);
          if (is_punct_or_cc_pos(lx.pos)) add(ConditionKind::BetweenGroupsPunctOrCC, p1, p2, "");
        }
      }
    }
  }

  std::vector<Condition> conditions(seen.begin(), seen.end());
  const size_t positive_count = conditions.size();
  for (size_t i = 0; i < positive_count; ++i) {
    if (!cfg.negation_allowed(conditions[i].kind)) continue;
    Condition negated = conditions[i];
    negated.negated = true;
    conditions.push_back(std::move(negated));
  }
  std::sort(conditions.begin(), conditions.end(), condition_less);

  std::vector<Atom> pool;
  pool.reserve(conditions.size());
  for (Condition& c : conditions) {
    Atom atom{std::move(c), Bits(fam.fix.size()), Bits(fam.harm.size())};
    for (size_t i = 0; i < fam.fix.size(); ++i)
      if (eval_condition(atom.cond, fam.fix[i].anchor,
                         corpus.sentences[static_cast<size_t>(fam.fix[i].sentence)].sentence,
                         lex))
        atom.fix_true.set(i);
    for (size_t i = 0; i < fam.harm.size(); ++i)
      if (eval_condition(atom.cond, fam.harm[i].anchor,
                         corpus.sentences[static_cast<size_t>(fam.harm[i].sentence)].sentence,
                         lex))
        atom.harm_true.set(i);
    pool.push_back(std::move(atom));
  }
  return pool;
}

// Depth-first enumeration of condition sets over the atom pool, in canonical
// order. Branches that no longer fire on any fix site are abandoned; so are
// extensions that change nothing on this corpus, since the shorter rule
// always wins the tie-break.
template <typename Emit>
inline void enumerate_family(const Family& fam, const AnnotatedCorpus& corpus,
                             const TrainingConfig& cfg, const LexiconBundle& lex,
                             Emit&& emit) {
  const std::vector<Atom> pool = build_atom_pool(fam, corpus, cfg, lex);
  const int wlo = condition_window_lo(fam.offset);
  const int wsize = condition_window_hi(fam.offset) - wlo + 1;
  std::vector<char> head_used(static_cast<size_t>(wsize), 0);
  std::vector<char> type_used(static_cast<size_t>(wsize), 0);
  std::vector<Condition> conds;

  auto dfs = [&](auto&& self, size_t from, const Bits& fix, const Bits& harm) -> void {
    emit(conds, fix.count(), harm.count());
    if (static_cast<int>(conds.size()) >= cfg.max_conditions) return;
    for (size_t j = from; j < pool.size(); ++j) {
      const Atom& atom = pool[j];
      const size_t pos_index = static_cast<size_t>(atom.cond.position - wlo);
      const bool head = is_head_family(atom.cond.kind);
      if (head && head_used[pos_index]) continue;
      const bool positive_type =
          atom.cond.kind == ConditionKind::GroupType && !atom.cond.negated;
      if (positive_type && type_used[pos_index]) continue;
      Bits next_fix = fix & atom.fix_true;
      if (!next_fix.any()) continue;
      Bits next_harm = harm & atom.harm_true;
      if (next_fix == fix && next_harm == harm) continue;
      if (head) head_used[pos_index] = 1;
      if (positive_type) type_used[pos_index] = 1;
      conds.push_back(atom.cond);
      self(self, j + 1, next_fix, next_harm);
      conds.pop_back();
      if (head) head_used[pos_index] = 0;
      if (positive_type) type_used[pos_index] = 0;
    }
  };
  dfs(dfs, 0, Bits(fam.fix.size(), true), Bits(fam.harm.size(), true));
}

inline Rule family_rule(const Family& fam, const std::vector<Condition>& conds) {
  Rule r;
  r.anchor_kind = fam.kind;
  r.conditions = conds;
  r.action.mode = fam.mode;
  r.action.label = fam.label;
  r.action.offset = fam.offset;
  return r;
}

inline CandidateScore family_score(const Family& fam, const std::vector<Condition>& conds,
                                   int fix_fired, int harm_fired) {
  CandidateScore score;
  score.rule = family_rule(fam, conds);
  if (fam.mode == ActionMode::Attach) {
    score.gained = fix_fired;
    score.spurious = harm_fired;
  } else {
    score.unspurious = fix_fired;
    score.lost = harm_fired;
  }
  return score;
}

inline bool score_preferred(const CandidateScore& a, const CandidateScore& b) {
  if (a.net() != b.net()) return a.net() > b.net();
  if (a.rule.conditions.size() != b.rule.conditions.size())
    return a.rule.conditions.size() < b.rule.conditions.size();
  return compare_rules(a.rule, b.rule) < 0;
}

inline std::vector<Family> all_families(const std::vector<RelationSet>& state,
                                        const AnnotatedCorpus& corpus,
                                        const TrainingConfig& cfg) {
  std::vector<Family> out;
  for (PartitionKey key : active_partitions(state, corpus, cfg))
    for (Family& fam : build_families(key, state, corpus)) out.push_back(std::move(fam));
  std::sort(out.begin(), out.end(), [](const Family& a, const Family& b) {
    return std::tie(a.kind, a.mode, a.label, a.offset) <
           std::tie(b.kind, b.mode, b.label, b.offset);
  });
  return out;
}

}  // namespace detail

// Every rule reachable under the configuration that is grounded in a current
// error site, in deterministic order.
inline std::vector<Rule> generate_candidates(const std::vector<RelationSet>& state,
                                             const AnnotatedCorpus& corpus,
                                             const TrainingConfig& cfg,
                                             const LexiconBundle& lex) {
  cfg.check();
  std::vector<Rule> out;
  for (const detail::Family& fam : detail::all_families(state, corpus, cfg))
    detail::enumerate_family(fam, corpus, cfg, lex,
                             [&](const std::vector<Condition>& conds, int, int) {
                               out.push_back(detail::family_rule(fam, conds));
                             });
  return out;
}

// ---------------------------------------------------------------------------
// Training
// ---------------------------------------------------------------------------

struct IterationLog {
  int iteration = 0;
  CandidateScore score;
  long matches = 0;   // gold triples matched after applying this rule
  long spurious = 0;  // non-gold triples present after applying this rule

  std::string render() const {
    return "iter=" + std::to_string(iteration) + " rule=" + render_rule(score.rule) +
           " net=" + std::to_string(score.net()) + " matches=" + std::to_string(matches) +
           " spurious=" + std::to_string(spurious);
  }
};

struct TrainOptions {
  int jobs = 1;                 // scoring threads; never affects the result
  std::ostream* log = nullptr;  // receives one line per iteration
};

struct TrainResult {
  RuleSequence sequence;
  std::vector<RelationSet> final_state;
  std::vector<IterationLog> log;
};

namespace detail {

inline std::optional<CandidateScore> best_in_partition(PartitionKey key,
                                                       const std::vector<RelationSet>& state,
                                                       const AnnotatedCorpus& corpus,
                                                       const TrainingConfig& cfg,
                                                       const LexiconBundle& lex) {
  std::optional<CandidateScore> best;
  for (const Family& fam : build_families(key, state, corpus)) {
    enumerate_family(fam, corpus, cfg, lex,
                     [&](const std::vector<Condition>& conds, int fix, int harm) {
                       CandidateScore s = family_score(fam, conds, fix, harm);
                       if (!best || score_preferred(s, *best)) best = std::move(s);
                     });
  }
  return best;
}

}  // namespace detail

// Trains a rule sequence starting from the corpus's initial labeling (empty
// by default). Deterministic for any number of scoring threads.
inline TrainResult train_detailed(const AnnotatedCorpus& corpus, const TrainingConfig& cfg,
                                  const LexiconBundle& lex, const TrainOptions& opts = {}) {
  cfg.check();
  TrainResult result;
  result.sequence.meta.config = cfg.snapshot();
  std::vector<RelationSet>& state = result.final_state;
  for (const AnnotatedSentence& as : corpus.sentences) state.push_back(as.initial);

  long matches = 0;
  long spurious = 0;
  for (size_t si = 0; si < corpus.sentences.size(); ++si) {
    for (const RelationInstance& r : state[si])
      corpus.sentences[si].gold.count(r) ? ++matches : ++spurious;
  }

  std::map<detail::PartitionKey, std::optional<CandidateScore>> best_by_partition;
  std::vector<detail::PartitionKey> stale;
  for (detail::PartitionKey key : detail::active_partitions(state, corpus, cfg))
    stale.push_back(key);

  int iteration = 0;
  while (true) {
    if (!stale.empty()) {
      const int jobs = std::max(1, opts.jobs);
      if (jobs == 1 || stale.size() == 1) {
        for (detail::PartitionKey key : stale)
          best_by_partition[key] = detail::best_in_partition(key, state, corpus, cfg, lex);
      } else {
        std::vector<std::optional<CandidateScore>> results(stale.size());
        std::atomic<size_t> next{0};
        auto worker = [&] {
          for (size_t i = next.fetch_add(1); i < stale.size(); i = next.fetch_add(1))
            results[i] = detail::best_in_partition(stale[i], state, corpus, cfg, lex);
        };
        std::vector<std::thread> threads;
        const size_t n_threads = std::min<size_t>(static_cast<size_t>(jobs), stale.size());
        for (size_t i = 0; i < n_threads; ++i) threads.emplace_back(worker);
        for (std::thread& t : threads) t.join();
        for (size_t i = 0; i < stale.size(); ++i)
          best_by_partition[stale[i]] = std::move(results[i]);
      }
      stale.clear();
    }

    const CandidateScore* winner = nullptr;
    for (const auto& [key, best] : best_by_partition)
      if (best && (!winner || detail::score_preferred(*best, *winner))) winner = &*best;
    if (!winner || winner->net() < cfg.gain_threshold) break;

    CandidateScore selected = *winner;
    for (size_t si = 0; si < corpus.sentences.size(); ++si)
      state[si] = apply_rule(selected.rule, corpus.sentences[si].sentence, state[si], lex);
    matches += selected.gained - selected.lost;
    spurious += selected.spurious - selected.unspurious;

    ++iteration;
    IterationLog entry{iteration, selected, matches, spurious};
    if (opts.log) (*opts.log) << entry.render() << '\n';
    result.log.push_back(entry);
    result.sequence.rules.push_back(selected.rule);
    stale.push_back(detail::PartitionKey{selected.rule.action.label,
                                         selected.rule.action.offset});
  }
  return result;
}

inline RuleSequence train(const AnnotatedCorpus& corpus, const TrainingConfig& cfg,
                          const LexiconBundle& lex, const TrainOptions& opts = {}) {
  return train_detailed(corpus, cfg, lex, opts).sequence;
}

// Post-processing mode: the corpus's initial labeling is the output of some
// other system and training reduces the error between it and the gold
// annotations. Same procedure, named for intent.
inline RuleSequence train_from_initial(const AnnotatedCorpus& corpus,
                                       const TrainingConfig& cfg, const LexiconBundle& lex,
                                       const TrainOptions& opts = {}) {
  return train_detailed(corpus, cfg, lex, opts).sequence;
}

}  // namespace relseq

#endif  // RELSEQ_LEARNER_HPP_
