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

// Corpus data model: sentences made of lexemes, non-recursive syntax groups
// (noun/verb/adverb/adjective/IN) with head words, and labeled relation arcs
// between groups. Relations form a per-sentence graph; cycles and multiple
// parents are allowed. Includes the line-delimited corpus file format.

#ifndef RELSEQ_CORPUS_HPP_
#define RELSEQ_CORPUS_HPP_

#include <array>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "relseq/util.hpp"
#include "relseq/version.hpp"

namespace relseq {

using Json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Group kinds and relation labels
// ---------------------------------------------------------------------------

enum class GroupKind { Noun, Verb, Adverb, Adjective, IN };

inline constexpr int kGroupKindCount = 5;

inline const char* group_kind_name(GroupKind k) {
  static const std::array<const char*, kGroupKindCount> names = {
      "noun", "verb", "adverb", "adjective", "in"};
  return names[static_cast<size_t>(k)];
}

inline GroupKind group_kind_from_name(const std::string& name) {
  for (int i = 0; i < kGroupKindCount; ++i) {
    GroupKind k = static_cast<GroupKind>(i);
    if (name == group_kind_name(k)) return k;
  }
  throw ParseError(0, "unknown group kind '" + name + "'");
}

enum class RelationLabel {
  Subj,
  Obj,
  LocObj,
  IndObj,
  Empty,
  PpSubj,
  PpObj,
  PpIo,
  CopSubj,
  NCopObj,
  PCopObj,
  Subset,
  Mod,
  ModLoc,
  ModTime,
  ModPoss,
  ModQuant,
  ModIdent,
  ModScalar
};

inline constexpr int kRelationLabelCount = 19;

inline const char* relation_label_name(RelationLabel l) {
  static const std::array<const char*, kRelationLabelCount> names = {
      "subj",    "obj",      "loc-obj",  "indobj",    "empty",
      "pp-subj", "pp-obj",   "pp-io",    "cop-subj",  "n-cop-obj",
      "p-cop-obj", "subset", "mod",      "mod-loc",   "mod-time",
      "mod-poss", "mod-quant", "mod-ident", "mod-scalar"};
  return names[static_cast<size_t>(l)];
}

inline RelationLabel relation_label_from_name(const std::string& name) {
  for (int i = 0; i < kRelationLabelCount; ++i) {
    RelationLabel l = static_cast<RelationLabel>(i);
    if (name == relation_label_name(l)) return l;
  }
  throw ParseError(0, "unknown relation label '" + name + "'");
}

enum class VerbProperty { Passive, Infinitival, UnconjugatedPresentParticiple };

inline const char* verb_property_name(VerbProperty p) {
  static const std::array<const char*, 3> names = {
      "passive", "infinitival", "unconjugated-present-participle"};
  return names[static_cast<size_t>(p)];
}

inline VerbProperty verb_property_from_name(const std::string& name) {
  for (int i = 0; i < 3; ++i) {
    VerbProperty p = static_cast<VerbProperty>(i);
    if (name == verb_property_name(p)) return p;
  }
  throw ParseError(0, "unknown verb group property '" + name + "'");
}

// ---------------------------------------------------------------------------
// Sentence structure
// ---------------------------------------------------------------------------

struct Lexeme {
  std::string text;
  std::string pos;   // Penn-Treebank-style tag
  int index = 0;     // position within the sentence token stream

  bool operator==(const Lexeme&) const = default;
};

// Inclusive lexeme index range.
struct TokenSpan {
  int lo = 0;
  int hi = 0;

  bool contains(int i) const { return i >= lo && i <= hi; }
  bool operator==(const TokenSpan&) const = default;
};

struct SyntaxGroup {
  int id = 0;  // position among the sentence's groups, left to right
  GroupKind kind = GroupKind::Noun;
  TokenSpan span;
  int head_index = 0;  // lexeme index, must lie within span
  std::optional<std::string> named_entity;
  std::set<VerbProperty> verb_properties;      // only for verb groups
  std::optional<int> attachment_target;        // only for IN groups

  bool operator==(const SyntaxGroup&) const = default;
};

// Lexemes not covered by any group (coordinating conjunctions, punctuation)
// stay in the lexeme stream so between-group tests can see them.
struct Sentence {
  std::vector<Lexeme> lexemes;
  std::vector<SyntaxGroup> groups;

  int group_count() const { return static_cast<int>(groups.size()); }
  bool has_group(int id) const { return id >= 0 && id < group_count(); }
  const Lexeme& head_of(int group_id) const {
    return lexemes[static_cast<size_t>(groups[static_cast<size_t>(group_id)].head_index)];
  }

  bool operator==(const Sentence&) const = default;
};

// ---------------------------------------------------------------------------
// Relations
// ---------------------------------------------------------------------------

// One labeled directed arc between two groups of the same sentence.
struct RelationInstance {
  RelationLabel label = RelationLabel::Subj;
  int source = 0;
  int target = 0;

  bool operator==(const RelationInstance&) const = default;
  bool operator<(const RelationInstance& o) const {
    return std::tie(label, source, target) < std::tie(o.label, o.source, o.target);
  }
};

using RelationSet = std::set<RelationInstance>;

// Signed distance from group a to group b; positive means rightward.
inline int group_offset(int a, int b) { return b - a; }

struct AnnotatedSentence {
  Sentence sentence;
  RelationSet gold;
  RelationSet initial;

  bool operator==(const AnnotatedSentence&) const = default;
};

struct AnnotatedCorpus {
  std::vector<AnnotatedSentence> sentences;

  size_t size() const { return sentences.size(); }
  bool operator==(const AnnotatedCorpus&) const = default;
};

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

struct Diagnostic {
  int sentence = 0;
  std::string message;
  bool warning = false;  // warnings do not make a corpus unusable

  std::string render() const {
    return "sentence:" + std::to_string(sentence) + " " + message;
  }
};

namespace detail {

inline void validate_relations(const Sentence& s, const RelationSet& rels,
                               const char* which, int index,
                               std::vector<Diagnostic>* out) {
  for (const RelationInstance& r : rels) {
    if (!s.has_group(r.source) || !s.has_group(r.target)) {
      out->push_back({index,
                      std::string(which) + " relation " +
                          relation_label_name(r.label) + "(" +
                          std::to_string(r.source) + "->" + std::to_string(r.target) +
                          ") references a missing group",
                      false});
      continue;
    }
    if (r.source == r.target) {
      out->push_back({index,
                      std::string(which) + " relation " +
                          relation_label_name(r.label) + " has source == target (" +
                          std::to_string(r.source) + ")",
                      false});
    }
  }
}

}  // namespace detail

// Returns one diagnostic per violated invariant; empty means fully valid.
// Sentences without groups are reported as warnings, not errors.
inline std::vector<Diagnostic> validate(const AnnotatedCorpus& corpus) {
  std::vector<Diagnostic> out;
  for (size_t si = 0; si < corpus.sentences.size(); ++si) {
    const int index = static_cast<int>(si);
    const Sentence& s = corpus.sentences[si].sentence;
    const int n_lex = static_cast<int>(s.lexemes.size());

    for (int i = 0; i < n_lex; ++i) {
      const Lexeme& lx = s.lexemes[static_cast<size_t>(i)];
      if (lx.text.empty())
        out.push_back({index, "lexeme " + std::to_string(i) + " has empty text", false});
      if (lx.index != i)
        out.push_back({index,
                       "lexeme " + std::to_string(i) + " carries index " +
                           std::to_string(lx.index) + " (must be contiguous from 0)",
                       false});
    }

    if (s.groups.empty())
      out.push_back({index, "sentence has no groups", true});

    int prev_hi = -1;
    for (size_t gi = 0; gi < s.groups.size(); ++gi) {
      const SyntaxGroup& g = s.groups[gi];
      const std::string tag = "group " + std::to_string(gi);
      if (g.id != static_cast<int>(gi))
        out.push_back({index, tag + " carries id " + std::to_string(g.id), false});
      if (g.span.lo < 0 || g.span.hi >= n_lex || g.span.lo > g.span.hi) {
        out.push_back({index, tag + " span is outside the lexeme stream", false});
        continue;
      }
      if (g.span.lo <= prev_hi)
        out.push_back({index, tag + " overlaps or precedes the previous group", false});
      prev_hi = g.span.hi;
      if (!g.span.contains(g.head_index))
        out.push_back({index, tag + " head index lies outside its span", false});
      if (!g.verb_properties.empty() && g.kind != GroupKind::Verb)
        out.push_back({index, tag + " has verb properties but is not a verb group", false});
      if (g.attachment_target) {
        if (g.kind != GroupKind::IN)
          out.push_back({index, tag + " has an attachment target but is not an IN group",
                         false});
        else if (!s.has_group(*g.attachment_target) ||
                 *g.attachment_target == static_cast<int>(gi))
          out.push_back({index, tag + " attachment target is not a valid other group",
                         false});
      }
    }

    detail::validate_relations(s, corpus.sentences[si].gold, "gold", index, &out);
    detail::validate_relations(s, corpus.sentences[si].initial, "initial", index, &out);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Corpus file format
//
// Line 1 is the version header. Every other non-blank line is one sentence
// record: {"tokens":[{"text","pos"}...],
//          "groups":[{"kind","span":[lo,hi],"head", "ne"?, "vprops"?, "attach"?}...],
//          "gold":[[label,source,target]...], "initial"?: same shape}.
// Unknown fields are rejected.
// ---------------------------------------------------------------------------

namespace detail {

inline int get_int(const Json& j, const char* what, int line) {
  if (!j.is_number_integer())
    throw ParseError(line, std::string(what) + " must be an integer");
  return j.get<int>();
}

inline void reject_unknown_keys(const Json& obj, std::initializer_list<const char*> known,
                                const char* what, int line) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* k : known)
      if (it.key() == k) ok = true;
    if (!ok)
      throw ParseError(line, std::string("unknown field '") + it.key() + "' in " + what);
  }
}

inline RelationSet parse_relation_array(const Json& arr, const char* which, int line,
                                        int sentence_index, std::ostream& diag) {
  RelationSet out;
  if (!arr.is_array()) throw ParseError(line, std::string(which) + " must be an array");
  for (const Json& triple : arr) {
    if (!triple.is_array() || triple.size() != 3)
      throw ParseError(line, std::string(which) + " entries must be [label,source,target]");
    RelationInstance r;
    try {
      r.label = relation_label_from_name(triple[0].get<std::string>());
      r.source = get_int(triple[1], "relation source", line);
      r.target = get_int(triple[2], "relation target", line);
    } catch (const ParseError& e) {
      throw ParseError(line, e.what());
    } catch (const Json::exception& e) {
      throw ParseError(line, std::string(which) + " entry is malformed: " + e.what());
    }
    if (!out.insert(r).second) {
      Diagnostic d{sentence_index,
                   std::string("duplicate ") + which + " relation " +
                       relation_label_name(r.label) + "(" + std::to_string(r.source) +
                       "->" + std::to_string(r.target) + ") collapsed",
                   true};
      diag << d.render() << '\n';
    }
  }
  return out;
}

inline AnnotatedSentence parse_sentence_record(const Json& j, int line, int sentence_index,
                                               std::ostream& diag) {
  if (!j.is_object()) throw ParseError(line, "sentence record must be an object");
  reject_unknown_keys(j, {"tokens", "groups", "gold", "initial"}, "sentence record", line);
  if (!j.contains("tokens") || !j.contains("groups") || !j.contains("gold"))
    throw ParseError(line, "sentence record needs 'tokens', 'groups' and 'gold'");

  AnnotatedSentence out;
  try {
    int index = 0;
    for (const Json& tok : j.at("tokens")) {
      reject_unknown_keys(tok, {"text", "pos"}, "token", line);
      Lexeme lx;
      lx.text = tok.at("text").get<std::string>();
      lx.pos = tok.at("pos").get<std::string>();
      lx.index = index++;
      out.sentence.lexemes.push_back(std::move(lx));
    }
    int id = 0;
    for (const Json& grp : j.at("groups")) {
      reject_unknown_keys(grp, {"kind", "span", "head", "ne", "vprops", "attach"}, "group",
                          line);
      SyntaxGroup g;
      g.id = id++;
      g.kind = group_kind_from_name(grp.at("kind").get<std::string>());
      const Json& span = grp.at("span");
      if (!span.is_array() || span.size() != 2)
        throw ParseError(line, "group span must be [lo,hi]");
      g.span.lo = get_int(span[0], "span low", line);
      g.span.hi = get_int(span[1], "span high", line);
      g.head_index = get_int(grp.at("head"), "group head", line);
      if (grp.contains("ne")) g.named_entity = grp.at("ne").get<std::string>();
      if (grp.contains("vprops"))
        for (const Json& p : grp.at("vprops"))
          g.verb_properties.insert(verb_property_from_name(p.get<std::string>()));
      if (grp.contains("attach"))
        g.attachment_target = get_int(grp.at("attach"), "attachment target", line);
      out.sentence.groups.push_back(std::move(g));
    }
  } catch (const ParseError& e) {
    throw ParseError(line, e.what());
  } catch (const Json::exception& e) {
    throw ParseError(line, std::string("malformed sentence record: ") + e.what());
  }

  out.gold = parse_relation_array(j.at("gold"), "gold", line, sentence_index, diag);
  if (j.contains("initial"))
    out.initial = parse_relation_array(j.at("initial"), "initial", line, sentence_index, diag);
  return out;
}

}  // namespace detail

// Parses and validates a corpus. Warnings (duplicate triples, sentences
// without groups) go to `diag`; invariant violations throw ValidationError
// after all diagnostics have been written.
inline AnnotatedCorpus parse_corpus(std::istream& in, std::ostream& diag = std::cerr) {
  AnnotatedCorpus corpus;
  std::string line;
  int lineno = 0;
  if (!std::getline(in, line)) return corpus;  // empty input, empty corpus
  ++lineno;
  if (detail::trim(line) != kCorpusHeader)
    throw ParseError(lineno, std::string("expected header '") + kCorpusHeader + "'");

  while (std::getline(in, line)) {
    ++lineno;
    if (detail::is_blank(line)) continue;
    Json j;
    try {
      j = Json::parse(line);
    } catch (const Json::exception& e) {
      throw ParseError(lineno, std::string("invalid record: ") + e.what());
    }
    const int sentence_index = static_cast<int>(corpus.sentences.size());
    corpus.sentences.push_back(
        detail::parse_sentence_record(j, lineno, sentence_index, diag));
  }

  std::vector<Diagnostic> diags = validate(corpus);
  std::string first_error;
  for (const Diagnostic& d : diags) {
    diag << d.render() << '\n';
    if (!d.warning && first_error.empty()) first_error = d.render();
  }
  if (!first_error.empty()) throw ValidationError(first_error);
  return corpus;
}

namespace detail {

inline Json relation_set_to_json(const RelationSet& rels) {
  Json arr = Json::array();
  for (const RelationInstance& r : rels)
    arr.push_back(Json::array({relation_label_name(r.label), r.source, r.target}));
  return arr;
}

inline Json sentence_record_to_json(const AnnotatedSentence& as) {
  Json j = Json::object();
  Json tokens = Json::array();
  for (const Lexeme& lx : as.sentence.lexemes)
    tokens.push_back(Json{{"text", lx.text}, {"pos", lx.pos}});
  j["tokens"] = std::move(tokens);
  Json groups = Json::array();
  for (const SyntaxGroup& g : as.sentence.groups) {
    Json grp = Json::object();
    grp["kind"] = group_kind_name(g.kind);
    grp["span"] = Json::array({g.span.lo, g.span.hi});
    grp["head"] = g.head_index;
    if (g.named_entity) grp["ne"] = *g.named_entity;
    if (!g.verb_properties.empty()) {
      Json props = Json::array();
      for (VerbProperty p : g.verb_properties) props.push_back(verb_property_name(p));
      grp["vprops"] = std::move(props);
    }
    if (g.attachment_target) grp["attach"] = *g.attachment_target;
    groups.push_back(std::move(grp));
  }
  j["groups"] = std::move(groups);
  j["gold"] = relation_set_to_json(as.gold);
  if (!as.initial.empty()) j["initial"] = relation_set_to_json(as.initial);
  return j;
}

}  // namespace detail

inline void serialize_corpus(const AnnotatedCorpus& corpus, std::ostream& out) {
  out << kCorpusHeader << '\n';
  for (const AnnotatedSentence& as : corpus.sentences)
    out << detail::sentence_record_to_json(as).dump() << '\n';
}

inline AnnotatedCorpus load_corpus(const std::filesystem::path& path,
                                   std::ostream& diag = std::cerr) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open corpus file " + path.string());
  try {
    return parse_corpus(in, diag);
  } catch (const ParseError& e) {
    throw ParseError(e.line(), path.string() + ": " + e.what());
  }
}

inline void save_corpus(const AnnotatedCorpus& corpus, const std::filesystem::path& path) {
  std::ostringstream buf;
  serialize_corpus(corpus, buf);
  write_file(path, buf.str());
}

}  // namespace relseq

#endif  // RELSEQ_CORPUS_HPP_
