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

// Scoring: recall/precision/f-score on exact (label, source, target) triples,
// per-label and per-distance breakdowns, and merged-label re-evaluation that
// collapses confusable labels into one class. There is deliberately no
// partial credit: a found arc with the wrong label costs both a missed key
// and a spurious response. Also hosts the propositional emitter that turns a
// relation graph into predicate/argument terms.

#ifndef RELSEQ_EVALUATOR_HPP_
#define RELSEQ_EVALUATOR_HPP_

#include <array>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "relseq/corpus.hpp"
#include "relseq/lexicon.hpp"
#include "relseq/util.hpp"

namespace relseq {

// ---------------------------------------------------------------------------
// Scores
// ---------------------------------------------------------------------------

inline double fscore(double p, double r) { return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r); }

struct Score {
  long matches = 0;
  long key_total = 0;       // gold triples
  long response_total = 0;  // predicted triples

  double recall() const { return key_total == 0 ? 0.0 : double(matches) / double(key_total); }
  // By convention an empty response has precision 0, keeping f at 0.
  double precision() const {
    return response_total == 0 ? 0.0 : double(matches) / double(response_total);
  }
  double f() const { return fscore(precision(), recall()); }
};

// Total map from the 19 labels to merged class names; identity by default.
struct LabelMerge {
  std::array<std::string, kRelationLabelCount> merged;

  LabelMerge() {
    for (int i = 0; i < kRelationLabelCount; ++i)
      merged[static_cast<size_t>(i)] = relation_label_name(static_cast<RelationLabel>(i));
  }

  const std::string& name_for(RelationLabel l) const {
    return merged[static_cast<size_t>(l)];
  }

  static LabelMerge identity() { return LabelMerge(); }

  // Generic, location and time modifiers scored as one class.
  static LabelMerge modifiers() {
    LabelMerge m;
    for (RelationLabel l : {RelationLabel::Mod, RelationLabel::ModLoc, RelationLabel::ModTime})
      m.merged[static_cast<size_t>(l)] = "mod-merged";
    return m;
  }

  // The modifier merge plus the location object and the pp-mediated
  // arguments, which share the same surface shape.
  static LabelMerge combined() {
    LabelMerge m = modifiers();
    for (RelationLabel l : {RelationLabel::LocObj, RelationLabel::PpSubj, RelationLabel::PpObj,
                            RelationLabel::PpIo})
      m.merged[static_cast<size_t>(l)] = "mod-merged";
    return m;
  }
};

struct EvalBreakdown {
  Score overall;
  // One row per merged label name, in label-table order.
  std::vector<std::pair<std::string, Score>> per_label;
  // Gold triples bucketed by |offset|: exactly 1, 2, 3, and greater.
  std::array<long, 4> distance_counts = {0, 0, 0, 0};
  long distance_total = 0;
};

// Scores predicted relation sets against gold ones under a label merge.
// A match is an exact (merged label, source, target) triple.
inline EvalBreakdown score(const std::vector<RelationSet>& predicted,
                           const std::vector<RelationSet>& gold,
                           const LabelMerge& merge = LabelMerge::identity()) {
  if (predicted.size() != gold.size())
    throw ValidationError("sentence:" + std::to_string(std::min(predicted.size(), gold.size())) +
                          " corpus shapes differ (" + std::to_string(predicted.size()) +
                          " vs " + std::to_string(gold.size()) + " sentences)");

  std::vector<std::string> row_order;
  std::map<std::string, Score> rows;
  for (int i = 0; i < kRelationLabelCount; ++i) {
    const std::string& name = merge.name_for(static_cast<RelationLabel>(i));
    if (!rows.count(name)) {
      rows[name] = Score{};
      row_order.push_back(name);
    }
  }

  using MergedTriple = std::tuple<std::string, int, int>;
  EvalBreakdown out;
  for (size_t si = 0; si < gold.size(); ++si) {
    std::map<MergedTriple, int> key_count;
    for (const RelationInstance& r : gold[si]) {
      const std::string& name = merge.name_for(r.label);
      key_count[{name, r.source, r.target}] += 1;
      rows[name].key_total += 1;
      out.overall.key_total += 1;
      const int d = std::abs(group_offset(r.source, r.target));
      out.distance_counts[static_cast<size_t>(d >= 4 ? 3 : d - 1)] += 1;
      out.distance_total += 1;
    }
    for (const RelationInstance& r : predicted[si]) {
      const std::string& name = merge.name_for(r.label);
      rows[name].response_total += 1;
      out.overall.response_total += 1;
      auto it = key_count.find({name, r.source, r.target});
      if (it != key_count.end() && it->second > 0) {
        it->second -= 1;
        rows[name].matches += 1;
        out.overall.matches += 1;
      }
    }
  }
  for (const std::string& name : row_order) out.per_label.emplace_back(name, rows[name]);
  return out;
}

inline Score merged_modifier_eval(const std::vector<RelationSet>& predicted,
                                  const std::vector<RelationSet>& gold) {
  return score(predicted, gold, LabelMerge::modifiers()).overall;
}

inline std::string render_report(const EvalBreakdown& b) {
  char buf[256];
  std::string out;
  std::snprintf(buf, sizeof(buf), "R=%.1f%% P=%.1f%% F=%.1f\n", 100.0 * b.overall.recall(),
                100.0 * b.overall.precision(), 100.0 * b.overall.f());
  out += buf;
  std::snprintf(buf, sizeof(buf), "%-12s %6s %6s %6s %7s %7s %6s\n", "label", "match", "key",
                "resp", "R", "P", "F");
  out += buf;
  for (const auto& [name, s] : b.per_label) {
    std::snprintf(buf, sizeof(buf), "%-12s %6ld %6ld %6ld %6.1f%% %6.1f%% %6.1f\n", name.c_str(),
                  s.matches, s.key_total, s.response_total, 100.0 * s.recall(),
                  100.0 * s.precision(), 100.0 * s.f());
    out += buf;
  }
  auto pct = [&](long upto) {
    return b.distance_total == 0 ? 0.0 : 100.0 * double(upto) / double(b.distance_total);
  };
  const long d1 = b.distance_counts[0];
  const long d2 = d1 + b.distance_counts[1];
  const long d3 = d2 + b.distance_counts[2];
  std::snprintf(buf, sizeof(buf),
                "gold relation lengths: <=1 %.1f%%  <=2 %.1f%%  <=3 %.1f%%  >3 %.1f%%\n",
                pct(d1), pct(d2), pct(d3), pct(b.distance_counts[3]));
  out += buf;
  return out;
}

// ---------------------------------------------------------------------------
// Proposition emission
//
// Verb groups become predicates; a subject arc fills argument 1 and an object
// arc argument 2. Noun groups contribute one unary predicate over their own
// variable. A modifier arc relates the modifying group's event variable to
// the modified group's variable. Every group owns one variable; verb groups
// and act/process nouns own an event variable, materialized when referenced.
// ---------------------------------------------------------------------------

inline std::vector<std::string> emit_propositions(const Sentence& s, const RelationSet& rels,
                                                  const LexiconBundle& lex) {
  std::vector<std::string> out;
  std::map<int, std::string> var;
  std::map<int, std::string> event_var;
  int counter = 1;

  auto var_of = [&](int g) -> const std::string& {
    auto it = var.find(g);
    if (it == var.end())
      it = var.emplace(g, "x" + std::to_string(counter++)).first;
    return it->second;
  };

  auto is_event_noun = [&](const SyntaxGroup& g) {
    if (g.kind != GroupKind::Noun) return false;
    const auto classes = lex.classes_of(s.lexemes[static_cast<size_t>(g.head_index)].text,
                                        GroupKind::Noun);
    return classes.count("act") > 0 || classes.count("process") > 0;
  };

  std::set<int> mod_sources;
  for (const RelationInstance& r : rels)
    if (r.label == RelationLabel::Mod) mod_sources.insert(r.source);

  // Unary predicates for noun groups, left to right.
  for (const SyntaxGroup& g : s.groups) {
    if (g.kind != GroupKind::Noun) continue;
    const std::string& head = s.lexemes[static_cast<size_t>(g.head_index)].text;
    out.push_back(head + "(" + var_of(g.id) + ")");
  }

  // Predicates with argument structure: verb groups and act/process nouns.
  for (const SyntaxGroup& g : s.groups) {
    const bool predicate_bearing = g.kind == GroupKind::Verb || is_event_noun(g);
    if (!predicate_bearing) continue;
    std::vector<int> subj_sources, obj_sources;
    for (const RelationInstance& r : rels) {
      if (r.target != g.id) continue;
      if (r.label == RelationLabel::Subj) subj_sources.push_back(r.source);
      if (r.label == RelationLabel::Obj) obj_sources.push_back(r.source);
    }
    const bool is_mod_source = mod_sources.count(g.id) > 0;
    if (subj_sources.empty() && obj_sources.empty() && !is_mod_source) continue;
    std::string args;
    for (int src : subj_sources) {
      if (!args.empty()) args += ' ';
      args += var_of(src);
    }
    for (int src : obj_sources) {
      if (!args.empty()) args += ' ';
      args += var_of(src);
    }
    const std::string& head = s.lexemes[static_cast<size_t>(g.head_index)].text;
    std::string prop = head + "(" + args + ")";
    if (is_mod_source) {
      event_var[g.id] = "e" + std::to_string(counter++);
      prop += "=" + event_var[g.id];
    }
    out.push_back(std::move(prop));
  }

  // Modifier propositions relate the modifier's event (or plain) variable to
  // the modified group's variable.
  for (const RelationInstance& r : rels) {
    if (r.label != RelationLabel::Mod) continue;
    auto ev = event_var.find(r.source);
    const std::string lhs = ev != event_var.end() ? ev->second : var_of(r.source);
    out.push_back("mod(" + lhs + " " + var_of(r.target) + ")");
  }

  // Labels outside the subj/obj/mod mapping are reported, not interpreted.
  for (const RelationInstance& r : rels) {
    if (r.label == RelationLabel::Subj || r.label == RelationLabel::Obj ||
        r.label == RelationLabel::Mod)
      continue;
    out.push_back(std::string("unmapped ") + relation_label_name(r.label) + "(" +
                  var_of(r.source) + " " + var_of(r.target) + ")");
  }
  return out;
}

}  // namespace relseq

#endif  // RELSEQ_EVALUATOR_HPP_
