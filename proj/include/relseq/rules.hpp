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

// The rule language: conditions test groups at signed offsets from an anchor
// group, an action attaches or unattaches one relation between the anchor and
// a group at a fixed offset. A rule's matches are computed against the
// sentence only, never against the evolving relation set, so within one rule
// all edits commit as a single batch and an action can only affect rules with
// the same or the opposite action.

#ifndef RELSEQ_RULES_HPP_
#define RELSEQ_RULES_HPP_

#include <algorithm>
#include <climits>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "relseq/corpus.hpp"
#include "relseq/lexicon.hpp"
#include "relseq/util.hpp"

namespace relseq {

// ---------------------------------------------------------------------------
// Conditions
// ---------------------------------------------------------------------------

enum class ConditionKind {
  GroupType,
  VerbGroupProperty,
  SentenceEndGroup,
  PPAttachment,
  GroupContainsLexeme,
  GroupContainsPos,
  BetweenGroupsLexeme,
  BetweenGroupsPos,
  HeadWord,
  HeadPos,
  HeadInNamedEntity,
  HeadSubcatCategory,
  HeadSemanticClass,
  BetweenGroupsPunctOrCC,
  HeadInWordList
};

inline constexpr int kConditionKindCount = 15;

inline const char* condition_kind_name(ConditionKind k) {
  static const std::array<const char*, kConditionKindCount> names = {
      "group-type",
      "verb-group-property",
      "sentence-end-group",
      "pp-attachment",
      "group-contains-lexeme",
      "group-contains-pos",
      "between-groups-lexeme",
      "between-groups-pos",
      "head-word",
      "head-pos",
      "head-in-named-entity",
      "head-subcat-category",
      "head-semantic-class",
      "between-groups-punct-or-cc",
      "head-in-word-list"};
  return names[static_cast<size_t>(k)];
}

inline ConditionKind condition_kind_from_name(const std::string& name) {
  for (int i = 0; i < kConditionKindCount; ++i) {
    ConditionKind k = static_cast<ConditionKind>(i);
    if (name == condition_kind_name(k)) return k;
  }
  throw ParseError(0, "unknown condition kind '" + name + "'");
}

inline bool is_between_kind(ConditionKind k) {
  return k == ConditionKind::BetweenGroupsLexeme || k == ConditionKind::BetweenGroupsPos ||
         k == ConditionKind::BetweenGroupsPunctOrCC;
}

// Tests that look at the head word of the group at their position. At most
// one such condition per position is allowed in a rule.
inline bool is_head_family(ConditionKind k) {
  return k == ConditionKind::HeadWord || k == ConditionKind::HeadPos ||
         k == ConditionKind::HeadInNamedEntity || k == ConditionKind::HeadSubcatCategory ||
         k == ConditionKind::HeadSemanticClass;
}

inline bool condition_takes_argument(ConditionKind k) {
  return k != ConditionKind::PPAttachment && k != ConditionKind::BetweenGroupsPunctOrCC;
}

struct Condition {
  ConditionKind kind = ConditionKind::GroupType;
  int position = 0;                       // group offset relative to the anchor
  std::optional<int> second_position;     // only for between-group kinds
  std::string argument;
  bool negated = false;

  bool operator==(const Condition&) const = default;
};

// Canonical total order over conditions; the basis of rule ordering.
inline int compare_conditions(const Condition& a, const Condition& b) {
  const int sa = a.second_position.value_or(INT_MIN);
  const int sb = b.second_position.value_or(INT_MIN);
  auto ta = std::tie(a.kind, a.position, sa, a.argument, a.negated);
  auto tb = std::tie(b.kind, b.position, sb, b.argument, b.negated);
  if (ta < tb) return -1;
  if (tb < ta) return 1;
  return 0;
}

inline bool condition_less(const Condition& a, const Condition& b) {
  return compare_conditions(a, b) < 0;
}

inline bool operator<(const Condition& a, const Condition& b) { return condition_less(a, b); }

// ---------------------------------------------------------------------------
// Actions and rules
// ---------------------------------------------------------------------------

enum class ActionMode { Attach, Unattach };

inline const char* action_mode_name(ActionMode m) {
  return m == ActionMode::Attach ? "attach" : "unattach";
}

inline ActionMode action_mode_from_name(const std::string& name) {
  if (name == "attach") return ActionMode::Attach;
  if (name == "unattach") return ActionMode::Unattach;
  throw ParseError(0, "unknown action mode '" + name + "'");
}

// The action's source is always the anchor group; the target sits at
// `offset` groups from it (positive means rightward).
struct Action {
  ActionMode mode = ActionMode::Attach;
  RelationLabel label = RelationLabel::Subj;
  int offset = 1;

  bool operator==(const Action&) const = default;
};

struct Rule {
  GroupKind anchor_kind = GroupKind::Noun;
  std::vector<Condition> conditions;
  Action action;
  std::string comment;  // free-form, not part of rule identity

  bool operator==(const Rule& o) const {
    return anchor_kind == o.anchor_kind && conditions == o.conditions && action == o.action;
  }
};

// Condition positions are limited to the groups spanned by the relationship
// plus their immediate neighbors.
inline int condition_window_lo(int offset) { return std::min(0, offset) - 1; }
inline int condition_window_hi(int offset) { return std::max(0, offset) + 1; }

inline int compare_rules(const Rule& a, const Rule& b) {
  auto ha = std::tie(a.anchor_kind, a.action.mode, a.action.label, a.action.offset);
  auto hb = std::tie(b.anchor_kind, b.action.mode, b.action.label, b.action.offset);
  if (ha < hb) return -1;
  if (hb < ha) return 1;
  if (a.conditions.size() != b.conditions.size())
    return a.conditions.size() < b.conditions.size() ? -1 : 1;
  for (size_t i = 0; i < a.conditions.size(); ++i) {
    int c = compare_conditions(a.conditions[i], b.conditions[i]);
    if (c != 0) return c;
  }
  return 0;
}

inline bool rule_less(const Rule& a, const Rule& b) { return compare_rules(a, b) < 0; }

// Structural validity of one rule; returns an explanation or empty when ok.
// `max_distance` bounds the action offset.
inline std::string validate_rule(const Rule& r, int max_distance) {
  if (r.action.offset == 0) return "action offset must not be 0";
  if (std::abs(r.action.offset) > max_distance)
    return "action offset " + std::to_string(r.action.offset) + " exceeds max distance " +
           std::to_string(max_distance);
  const int lo = condition_window_lo(r.action.offset);
  const int hi = condition_window_hi(r.action.offset);
  std::vector<int> head_positions;
  for (const Condition& c : r.conditions) {
    const std::string name = condition_kind_name(c.kind);
    if (c.position < lo || c.position > hi)
      return name + " position " + std::to_string(c.position) + " is outside [" +
             std::to_string(lo) + "," + std::to_string(hi) + "]";
    if (is_between_kind(c.kind)) {
      if (!c.second_position) return name + " needs a second position";
      if (*c.second_position == c.position)
        return name + " positions must differ";
      if (*c.second_position < lo || *c.second_position > hi)
        return name + " second position is outside the condition window";
    } else if (c.second_position) {
      return name + " does not take a second position";
    }
    if (condition_takes_argument(c.kind)) {
      if (c.argument.empty()) return name + " needs an argument";
    } else if (!c.argument.empty()) {
      return name + " does not take an argument";
    }
    if (c.kind == ConditionKind::SentenceEndGroup && c.argument != "first" &&
        c.argument != "last")
      return "sentence-end-group argument must be 'first' or 'last'";
    if (c.kind == ConditionKind::GroupType) group_kind_from_name(c.argument);
    if (c.kind == ConditionKind::VerbGroupProperty) verb_property_from_name(c.argument);
    if (c.kind == ConditionKind::PPAttachment && c.position != 0)
      return "pp-attachment only tests the anchor group (position 0)";
    if (is_head_family(c.kind)) {
      if (std::find(head_positions.begin(), head_positions.end(), c.position) !=
          head_positions.end())
        return "more than one head-word test at position " + std::to_string(c.position);
      head_positions.push_back(c.position);
    }
  }
  return "";
}

// ---------------------------------------------------------------------------
// Condition evaluation
// ---------------------------------------------------------------------------

namespace detail {

inline bool is_punct_or_cc_pos(const std::string& pos) {
  if (pos == "CC") return true;
  if (pos == "-LRB-" || pos == "-RRB-" || pos == "-LSB-" || pos == "-RSB-" ||
      pos == "-LCB-" || pos == "-RCB-")
    return true;
  if (pos.empty()) return false;
  for (char c : pos)
    if (std::isalnum(static_cast<unsigned char>(c))) return false;
  return true;
}

// Scans lexemes strictly between the spans of two groups, including any
// tokens that belong to intervening groups.
template <typename Pred>
inline bool any_lexeme_between(const Sentence& s, int left_group, int right_group,
                               Pred&& pred) {
  const SyntaxGroup& a = s.groups[static_cast<size_t>(std::min(left_group, right_group))];
  const SyntaxGroup& b = s.groups[static_cast<size_t>(std::max(left_group, right_group))];
  for (int i = a.span.hi + 1; i < b.span.lo; ++i)
    if (pred(s.lexemes[static_cast<size_t>(i)])) return true;
  return false;
}

}  // namespace detail

// Evaluates one condition at an anchor group. A position that falls outside
// the sentence's groups makes the un-negated test false (and its negation
// true).
inline bool eval_condition(const Condition& c, int anchor, const Sentence& s,
                           const LexiconBundle& lex) {
  const int gi = anchor + c.position;
  bool base = false;
  if (s.has_group(gi)) {
    const SyntaxGroup& g = s.groups[static_cast<size_t>(gi)];
    const Lexeme& head = s.lexemes[static_cast<size_t>(g.head_index)];
    switch (c.kind) {
      case ConditionKind::GroupType:
        base = g.kind == group_kind_from_name(c.argument);
        break;
      case ConditionKind::VerbGroupProperty:
        base = g.kind == GroupKind::Verb &&
               g.verb_properties.count(verb_property_from_name(c.argument)) > 0;
        break;
      case ConditionKind::SentenceEndGroup:
        base = c.argument == "first" ? gi == 0 : gi == s.group_count() - 1;
        break;
      case ConditionKind::PPAttachment:
        for (const SyntaxGroup& other : s.groups)
          if (other.kind == GroupKind::IN && other.attachment_target &&
              *other.attachment_target == gi)
            base = true;
        break;
      case ConditionKind::GroupContainsLexeme:
        for (int i = g.span.lo; i <= g.span.hi && !base; ++i)
          base = lex.lexeme_matches(s.lexemes[static_cast<size_t>(i)].text, c.argument);
        break;
      case ConditionKind::GroupContainsPos:
        for (int i = g.span.lo; i <= g.span.hi && !base; ++i)
          base = s.lexemes[static_cast<size_t>(i)].pos == c.argument;
        break;
      case ConditionKind::HeadWord:
        base = lex.lexeme_matches(head.text, c.argument);
        break;
      case ConditionKind::HeadPos:
        base = head.pos == c.argument;
        break;
      case ConditionKind::HeadInNamedEntity:
        base = g.named_entity && detail::to_lower(*g.named_entity) ==
                                     detail::to_lower(c.argument);
        break;
      case ConditionKind::HeadSubcatCategory:
        base = lex.subcat_categories_of(head.text).count(c.argument) > 0;
        break;
      case ConditionKind::HeadSemanticClass:
        base = lex.classes_of(head.text, g.kind).count(c.argument) > 0;
        break;
      case ConditionKind::HeadInWordList:
        base = lex.in_word_list(c.argument, head.text);
        break;
      case ConditionKind::BetweenGroupsLexeme:
      case ConditionKind::BetweenGroupsPos:
      case ConditionKind::BetweenGroupsPunctOrCC: {
        const int gj = anchor + c.second_position.value_or(c.position);
        if (s.has_group(gj) && gj != gi) {
          base = detail::any_lexeme_between(s, gi, gj, [&](const Lexeme& lx) {
            switch (c.kind) {
              case ConditionKind::BetweenGroupsLexeme:
                return lex.lexeme_matches(lx.text, c.argument);
              case ConditionKind::BetweenGroupsPos:
                return lx.pos == c.argument;
              default:
                return detail::is_punct_or_cc_pos(lx.pos);
            }
          });
        }
        break;
      }
    }
  }
  return c.negated ? !base : base;
}

// True when the anchor group has the rule's anchor kind, the action target
// exists, and every condition holds.
inline bool rule_matches(const Rule& r, int anchor, const Sentence& s,
                         const LexiconBundle& lex) {
  if (!s.has_group(anchor)) return false;
  if (s.groups[static_cast<size_t>(anchor)].kind != r.anchor_kind) return false;
  if (!s.has_group(anchor + r.action.offset)) return false;
  for (const Condition& c : r.conditions)
    if (!eval_condition(c, anchor, s, lex)) return false;
  return true;
}

inline std::vector<int> matching_anchors(const Rule& r, const Sentence& s,
                                         const LexiconBundle& lex) {
  std::vector<int> out;
  for (int a = 0; a < s.group_count(); ++a)
    if (rule_matches(r, a, s, lex)) out.push_back(a);
  return out;
}

// Applies one rule to a sentence. Matches are computed against the sentence
// alone, then all edits commit as one batch; attaching a present triple and
// unattaching an absent one are no-ops.
inline RelationSet apply_rule(const Rule& r, const Sentence& s, const RelationSet& rels,
                              const LexiconBundle& lex) {
  RelationSet out = rels;
  for (int anchor : matching_anchors(r, s, lex)) {
    RelationInstance t{r.action.label, anchor, anchor + r.action.offset};
    if (r.action.mode == ActionMode::Attach)
      out.insert(t);
    else
      out.erase(t);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Rule sequences
// ---------------------------------------------------------------------------

struct RuleSequenceMeta {
  std::string tool = std::string(kToolName) + " " + kToolVersion;
  // Flat training-config snapshot, key=value pairs in sorted key order.
  std::vector<std::pair<std::string, std::string>> config;

  bool operator==(const RuleSequenceMeta&) const = default;
};

struct RuleSequence {
  std::vector<Rule> rules;
  RuleSequenceMeta meta;

  bool operator==(const RuleSequence& o) const {
    return rules == o.rules && meta == o.meta;
  }
};

// Runs the rules in order over every sentence, starting from each sentence's
// initial relation set. Sentences are independent of each other.
inline std::vector<RelationSet> apply_sequence(const RuleSequence& seq,
                                               const AnnotatedCorpus& corpus,
                                               const LexiconBundle& lex) {
  std::vector<RelationSet> out;
  out.reserve(corpus.sentences.size());
  for (const AnnotatedSentence& as : corpus.sentences) {
    RelationSet rels = as.initial;
    for (const Rule& r : seq.rules) rels = apply_rule(r, as.sentence, rels, lex);
    out.push_back(std::move(rels));
  }
  return out;
}

// Compact canonical rendering, used in training logs and listings.
inline std::string render_condition(const Condition& c) {
  std::string out;
  if (c.negated) out += '!';
  out += condition_kind_name(c.kind);
  out += '(';
  out += std::to_string(c.position);
  if (c.second_position) {
    out += ',';
    out += std::to_string(*c.second_position);
  }
  out += ')';
  if (!c.argument.empty()) {
    out += '=';
    out += c.argument;
  }
  return out;
}

inline std::string render_rule(const Rule& r) {
  std::string out = action_mode_name(r.action.mode);
  out += '(';
  out += relation_label_name(r.action.label);
  out += ',';
  if (r.action.offset > 0) out += '+';
  out += std::to_string(r.action.offset);
  out += ")@";
  out += group_kind_name(r.anchor_kind);
  out += '[';
  for (size_t i = 0; i < r.conditions.size(); ++i) {
    if (i) out += '&';
    out += render_condition(r.conditions[i]);
  }
  out += ']';
  return out;
}

// ---------------------------------------------------------------------------
// Rule file format: header line, one meta record, one record per rule.
// ---------------------------------------------------------------------------

namespace detail {

inline Json condition_to_json(const Condition& c) {
  Json j = Json::object();
  j["test"] = condition_kind_name(c.kind);
  j["pos"] = c.position;
  if (c.second_position) j["pos2"] = *c.second_position;
  if (!c.argument.empty()) j["arg"] = c.argument;
  if (c.negated) j["neg"] = true;
  return j;
}

inline Json rule_to_json(const Rule& r) {
  Json j = Json::object();
  j["anchor"] = group_kind_name(r.anchor_kind);
  Json action = Json::object();
  action["mode"] = action_mode_name(r.action.mode);
  action["label"] = relation_label_name(r.action.label);
  action["offset"] = r.action.offset;
  j["action"] = std::move(action);
  Json conds = Json::array();
  for (const Condition& c : r.conditions) conds.push_back(condition_to_json(c));
  j["conditions"] = std::move(conds);
  if (!r.comment.empty()) j["comment"] = r.comment;
  return j;
}

inline Rule rule_from_json(const Json& j, int line) {
  if (!j.is_object()) throw ParseError(line, "rule record must be an object");
  reject_unknown_keys(j, {"anchor", "action", "conditions", "comment"}, "rule record", line);
  Rule r;
  try {
    r.anchor_kind = group_kind_from_name(j.at("anchor").get<std::string>());
    const Json& action = j.at("action");
    reject_unknown_keys(action, {"mode", "label", "offset"}, "action", line);
    r.action.mode = action_mode_from_name(action.at("mode").get<std::string>());
    r.action.label = relation_label_from_name(action.at("label").get<std::string>());
    r.action.offset = detail::get_int(action.at("offset"), "action offset", line);
    for (const Json& cj : j.at("conditions")) {
      reject_unknown_keys(cj, {"test", "pos", "pos2", "arg", "neg"}, "condition", line);
      Condition c;
      c.kind = condition_kind_from_name(cj.at("test").get<std::string>());
      c.position = detail::get_int(cj.at("pos"), "condition position", line);
      if (cj.contains("pos2"))
        c.second_position = detail::get_int(cj.at("pos2"), "condition second position", line);
      if (cj.contains("arg")) c.argument = cj.at("arg").get<std::string>();
      if (cj.contains("neg")) c.negated = cj.at("neg").get<bool>();
      r.conditions.push_back(std::move(c));
    }
    if (j.contains("comment")) r.comment = j.at("comment").get<std::string>();
  } catch (const ParseError& e) {
    throw ParseError(line, e.what());
  } catch (const Json::exception& e) {
    throw ParseError(line, std::string("malformed rule record: ") + e.what());
  }
  return r;
}

}  // namespace detail

inline void serialize_rules(const RuleSequence& seq, std::ostream& out) {
  out << kRulesHeader << '\n';
  Json meta = Json::object();
  meta["tool"] = seq.meta.tool;
  Json config = Json::object();
  for (const auto& [key, value] : seq.meta.config) config[key] = value;
  meta["config"] = std::move(config);
  out << Json{{"meta", std::move(meta)}}.dump() << '\n';
  for (const Rule& r : seq.rules) out << detail::rule_to_json(r).dump() << '\n';
}

inline RuleSequence parse_rules(std::istream& in) {
  RuleSequence seq;
  std::string line;
  int lineno = 0;
  if (!std::getline(in, line)) throw ParseError(1, "empty rule file");
  ++lineno;
  if (detail::trim(line) != kRulesHeader)
    throw ParseError(lineno, std::string("expected header '") + kRulesHeader +
                                 "', found '" + detail::trim(line) + "'");
  if (!std::getline(in, line)) throw ParseError(lineno, "missing meta record");
  ++lineno;
  try {
    Json j = Json::parse(line);
    detail::reject_unknown_keys(j, {"meta"}, "meta record", lineno);
    const Json& meta = j.at("meta");
    detail::reject_unknown_keys(meta, {"tool", "config"}, "meta", lineno);
    seq.meta.tool = meta.at("tool").get<std::string>();
    if (meta.contains("config"))
      for (auto it = meta.at("config").begin(); it != meta.at("config").end(); ++it)
        seq.meta.config.emplace_back(it.key(), it.value().get<std::string>());
  } catch (const Json::exception& e) {
    throw ParseError(lineno, std::string("malformed meta record: ") + e.what());
  }

  int max_distance = 3;
  int max_conditions = 3;
  for (const auto& [key, value] : seq.meta.config) {
    if (key == "max-distance") max_distance = std::stoi(value);
    if (key == "max-conditions") max_conditions = std::stoi(value);
  }

  while (std::getline(in, line)) {
    ++lineno;
    if (detail::is_blank(line)) continue;
    Json j;
    try {
      j = Json::parse(line);
    } catch (const Json::exception& e) {
      throw ParseError(lineno, std::string("invalid record: ") + e.what());
    }
    Rule r = detail::rule_from_json(j, lineno);
    std::string problem = validate_rule(r, max_distance);
    if (problem.empty() && static_cast<int>(r.conditions.size()) > max_conditions)
      problem = "rule has " + std::to_string(r.conditions.size()) +
                " conditions, the file's configuration allows " +
                std::to_string(max_conditions);
    if (!problem.empty()) throw ParseError(lineno, "invalid rule: " + problem);
    seq.rules.push_back(std::move(r));
  }
  return seq;
}

inline RuleSequence load_rules(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open rule file " + path.string());
  try {
    return parse_rules(in);
  } catch (const ParseError& e) {
    throw ParseError(e.line(), path.string() + ": " + e.what());
  }
}

inline void save_rules(const RuleSequence& seq, const std::filesystem::path& path) {
  std::ostringstream buf;
  serialize_rules(seq, buf);
  write_file(path, buf.str());
}

}  // namespace relseq

#endif  // RELSEQ_RULES_HPP_
