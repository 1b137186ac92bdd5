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

#include <doctest.h>

#include <random>
#include <sstream>

#include "helpers.hpp"
#include "relseq/corpus.hpp"

using namespace relseq;
using namespace relseq::testing;

namespace {

AnnotatedCorpus parse_string(const std::string& text, std::string* diagnostics = nullptr) {
  std::istringstream in(text);
  std::ostringstream diag;
  AnnotatedCorpus corpus = parse_corpus(in, diag);
  if (diagnostics) *diagnostics = diag.str();
  return corpus;
}

}  // namespace

TEST_CASE("group_offset is the signed distance and antisymmetric") {
  CHECK(group_offset(0, 2) == 2);
  CHECK(group_offset(3, 1) == -2);
  CHECK(group_offset(1, 1) == 0);
  std::mt19937 rng(11);
  std::uniform_int_distribution<int> die(0, 20);
  for (int i = 0; i < 200; ++i) {
    const int a = die(rng), b = die(rng);
    CHECK(group_offset(a, b) == -group_offset(b, a));
  }
}

TEST_CASE("parse_corpus reads the cat sentence with five groups and four arcs") {
  const std::string text =
      "relseq-corpus v1\n"
      R"({"tokens":[{"text":"I","pos":"PRP"},{"text":"saw","pos":"VBD"},)"
      R"({"text":"the","pos":"DT"},{"text":"cat","pos":"NN"},)"
      R"({"text":"that","pos":"WDT"},{"text":"ran","pos":"VBD"}],)"
      R"("groups":[{"kind":"noun","span":[0,0],"head":0},)"
      R"({"kind":"verb","span":[1,1],"head":1},)"
      R"({"kind":"noun","span":[2,3],"head":3},)"
      R"({"kind":"in","span":[4,4],"head":4,"attach":2},)"
      R"({"kind":"verb","span":[5,5],"head":5}],)"
      R"("gold":[["subj",0,1],["obj",2,1],["subj",2,4],["mod",4,2]]})"
      "\n";
  AnnotatedCorpus corpus = parse_string(text);
  REQUIRE(corpus.size() == 1);
  const AnnotatedSentence& as = corpus.sentences[0];
  CHECK(as.sentence.groups.size() == 5);
  CHECK(as.gold.size() == 4);
  CHECK(as.gold.count(rel(RelationLabel::Subj, 0, 1)) == 1);
  CHECK(as.gold.count(rel(RelationLabel::Mod, 4, 2)) == 1);
  CHECK(as.sentence.groups[3].attachment_target == 2);
  CHECK(as.initial.empty());
}

TEST_CASE("empty input parses to an empty corpus") {
  AnnotatedCorpus corpus = parse_string("");
  CHECK(corpus.size() == 0);
  AnnotatedCorpus header_only = parse_string("relseq-corpus v1\n");
  CHECK(header_only.size() == 0);
}

TEST_CASE("duplicate gold triples collapse with a warning") {
  const std::string text =
      "relseq-corpus v1\n"
      R"({"tokens":[{"text":"I","pos":"PRP"},{"text":"ran","pos":"VBD"}],)"
      R"("groups":[{"kind":"noun","span":[0,0],"head":0},)"
      R"({"kind":"verb","span":[1,1],"head":1}],)"
      R"("gold":[["subj",0,1],["subj",0,1]]})"
      "\n";
  std::string diagnostics;
  AnnotatedCorpus corpus = parse_string(text, &diagnostics);
  CHECK(corpus.sentences[0].gold.size() == 1);
  CHECK(diagnostics.find("sentence:0") != std::string::npos);
  CHECK(diagnostics.find("duplicate") != std::string::npos);
}

TEST_CASE("parse errors carry line numbers and reject unknown fields") {
  CHECK_THROWS_AS(parse_string("not-a-header\n"), ParseError);
  CHECK_THROWS_AS(parse_string("relseq-corpus v1\nnot json\n"), ParseError);
  const std::string unknown_field =
      "relseq-corpus v1\n"
      R"({"tokens":[{"text":"I","pos":"PRP"}],)"
      R"("groups":[{"kind":"noun","span":[0,0],"head":0}],"gold":[],"extra":1})"
      "\n";
  CHECK_THROWS_AS(parse_string(unknown_field), ParseError);
  const std::string unknown_group_field =
      "relseq-corpus v1\n"
      R"({"tokens":[{"text":"I","pos":"PRP"}],)"
      R"("groups":[{"kind":"noun","span":[0,0],"head":0,"color":"red"}],"gold":[]})"
      "\n";
  CHECK_THROWS_AS(parse_string(unknown_group_field), ParseError);
  const std::string fractional_span =
      "relseq-corpus v1\n"
      R"({"tokens":[{"text":"I","pos":"PRP"}],)"
      R"("groups":[{"kind":"noun","span":[0.5,0],"head":0}],"gold":[]})"
      "\n";
  CHECK_THROWS_AS(parse_string(fractional_span), ParseError);
}

TEST_CASE("validate flags attachment targets on non-IN groups") {
  Sentence s = SentenceBuilder()
                   .group(GroupKind::Noun, {{"cats", "NNS"}})
                   .group(GroupKind::Verb, {{"ran", "VBD"}})
                   .build();
  s.groups[0].attachment_target = 1;  // nouns do not attach
  AnnotatedCorpus corpus;
  corpus.sentences.push_back(annotated(std::move(s), {}));
  auto diags = validate(corpus);
  REQUIRE(diags.size() == 1);
  CHECK(!diags[0].warning);
  CHECK(diags[0].render().find("sentence:0") == 0);
  CHECK(diags[0].message.find("attachment") != std::string::npos);
}

TEST_CASE("validate accepts a well-formed appendix sentence") {
  // [He] [loves] [to work] [with] [words]
  Sentence s = SentenceBuilder()
                   .group(GroupKind::Noun, {{"He", "PRP"}})
                   .group(GroupKind::Verb, {{"loves", "VBZ"}})
                   .group(GroupKind::Verb, {{"to", "TO"}, {"work", "VB"}},
                          {.vprops = {VerbProperty::Infinitival}})
                   .group(GroupKind::IN, {{"with", "IN"}}, {.attach = 2})
                   .group(GroupKind::Noun, {{"words", "NNS"}})
                   .loose(".", ".")
                   .build();
  RelationSet gold = {rel(RelationLabel::Subj, 0, 1), rel(RelationLabel::Obj, 2, 1),
                      rel(RelationLabel::Subj, 0, 2), rel(RelationLabel::PpObj, 3, 2),
                      rel(RelationLabel::Obj, 4, 3)};
  AnnotatedCorpus corpus;
  corpus.sentences.push_back(annotated(std::move(s), std::move(gold)));
  CHECK(validate(corpus).empty());
}

TEST_CASE("validate flags dangling relation targets") {
  Sentence s = SentenceBuilder().group(GroupKind::Noun, {{"cats", "NNS"}}).build();
  AnnotatedCorpus corpus;
  corpus.sentences.push_back(annotated(std::move(s), {rel(RelationLabel::Subj, 0, 3)}));
  auto diags = validate(corpus);
  REQUIRE(diags.size() == 1);
  CHECK(diags[0].message.find("missing group") != std::string::npos);
}

TEST_CASE("validate warns on sentences without groups") {
  AnnotatedCorpus corpus;
  corpus.sentences.push_back(annotated(Sentence{}, {}));
  auto diags = validate(corpus);
  REQUIRE(diags.size() == 1);
  CHECK(diags[0].warning);
}

TEST_CASE("gold relations may exceed the rule distance limit") {
  std::mt19937 rng(5);
  Sentence s = random_sentence(rng, 6);
  AnnotatedCorpus corpus;
  corpus.sentences.push_back(annotated(std::move(s), {rel(RelationLabel::Mod, 0, 5)}));
  CHECK(validate(corpus).empty());
}

TEST_CASE("serialization round-trips random corpora") {
  std::mt19937 rng(42);
  for (int i = 0; i < 50; ++i) {
    RandomCorpusParams params;
    params.allow_long_arcs = true;
    AnnotatedCorpus corpus = random_corpus(rng, params);
    // Give some sentences an initial labeling too.
    if (!corpus.sentences.empty()) corpus.sentences[0].initial = corpus.sentences[0].gold;
    std::ostringstream diag;
    std::istringstream in(serialize_corpus_to_string(corpus));
    AnnotatedCorpus reparsed = parse_corpus(in, diag);
    CHECK(reparsed == corpus);
  }
}

TEST_CASE("relation sets are idempotent under union and removal") {
  RelationSet rels;
  const RelationInstance r = rel(RelationLabel::Obj, 1, 2);
  rels.insert(r);
  rels.insert(r);
  CHECK(rels.size() == 1);
  rels.erase(rel(RelationLabel::Obj, 2, 1));  // absent, no-op
  CHECK(rels.size() == 1);
  rels.erase(r);
  rels.erase(r);
  CHECK(rels.empty());
}

TEST_CASE("load_corpus reports missing files as I/O errors") {
  std::ostringstream diag;
  CHECK_THROWS_AS(load_corpus("/nonexistent/corpus.jsonl", diag), IoError);
}
