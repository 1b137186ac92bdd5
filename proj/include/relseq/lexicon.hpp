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

// Word-knowledge sources backing head-word tests: stem table,
// subcategorization categories, semantic classes (separate noun and verb
// partitions) and named word lists. All lookups are case-insensitive and the
// bundle is immutable once loaded, so it can be shared across threads.

#ifndef RELSEQ_LEXICON_HPP_
#define RELSEQ_LEXICON_HPP_

#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "relseq/corpus.hpp"
#include "relseq/util.hpp"

namespace relseq {

struct WordList {
  std::string name;
  std::set<std::string> members;  // lowercase word forms
};

class LexiconBundle {
 public:
  // Mutators, used by the loader and by test fixtures.
  void add_stem(const std::string& surface, const std::string& stem) {
    stems_[detail::to_lower(surface)].insert(detail::to_lower(stem));
  }
  void add_subcat(const std::string& stem, const std::string& category) {
    subcat_[detail::to_lower(stem)].insert(category);
  }
  void add_noun_class(const std::string& stem, const std::string& cls) {
    noun_classes_[detail::to_lower(stem)].insert(cls);
  }
  void add_verb_class(const std::string& stem, const std::string& cls) {
    verb_classes_[detail::to_lower(stem)].insert(cls);
  }
  void add_word_list(WordList list) { word_lists_[list.name] = std::move(list); }

  // Stems of a surface form; a word absent from the table is its own stem.
  std::set<std::string> stems_of(const std::string& word) const {
    const std::string key = detail::to_lower(word);
    auto it = stems_.find(key);
    if (it == stems_.end()) return {key};
    return it->second;
  }

  // Union of semantic classes over all stems of `word`, restricted to the
  // noun partition for noun groups and the verb partition for verb groups.
  // Other group kinds have no semantic classes.
  std::set<std::string> classes_of(const std::string& word, GroupKind kind) const {
    const std::map<std::string, std::set<std::string>>* table = nullptr;
    if (kind == GroupKind::Noun) table = &noun_classes_;
    else if (kind == GroupKind::Verb) table = &verb_classes_;
    else return {};
    std::set<std::string> out;
    for (const std::string& stem : stems_of(word)) {
      auto it = table->find(stem);
      if (it != table->end()) out.insert(it->second.begin(), it->second.end());
    }
    return out;
  }

  std::set<std::string> subcat_categories_of(const std::string& word) const {
    std::set<std::string> out;
    for (const std::string& stem : stems_of(word)) {
      auto it = subcat_.find(stem);
      if (it != subcat_.end()) out.insert(it->second.begin(), it->second.end());
    }
    return out;
  }

  bool in_word_list(const std::string& list_name, const std::string& word) const {
    auto it = word_lists_.find(list_name);
    if (it == word_lists_.end()) return false;
    return it->second.members.count(detail::to_lower(word)) > 0;
  }

  // True when `candidate` names the word itself or one of its stems. This is
  // the matching used by single-lexeme tests, so a rule can test "be" and
  // match "was".
  bool lexeme_matches(const std::string& surface, const std::string& candidate) const {
    const std::string want = detail::to_lower(candidate);
    if (detail::to_lower(surface) == want) return true;
    auto it = stems_.find(detail::to_lower(surface));
    return it != stems_.end() && it->second.count(want) > 0;
  }

  const std::map<std::string, WordList>& word_lists() const { return word_lists_; }

 private:
  std::map<std::string, std::set<std::string>> subcat_;        // stem -> categories
  std::map<std::string, std::set<std::string>> noun_classes_;  // stem -> classes
  std::map<std::string, std::set<std::string>> verb_classes_;
  std::map<std::string, std::set<std::string>> stems_;         // surface -> stems
  std::map<std::string, WordList> word_lists_;
};

namespace detail {

// One entry per line: `word<TAB>value1 value2 ...`. Comments start with '#'.
template <typename Fn>
inline void parse_tsv(std::istream& in, const std::string& name, Fn&& add_entry) {
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (is_blank(line) || line[0] == '#') continue;
    size_t tab = line.find('\t');
    if (tab == std::string::npos || tab == 0)
      throw ParseError(lineno, name + ": expected 'word<TAB>values'");
    const std::string word = trim(line.substr(0, tab));
    bool any = false;
    for (const std::string& value : split(line.substr(tab + 1), ' ')) {
      const std::string v = trim(value);
      if (v.empty()) continue;
      add_entry(word, v);
      any = true;
    }
    if (!any) throw ParseError(lineno, name + ": entry for '" + word + "' has no values");
  }
}

// Word lists are one member per line.
inline void parse_word_list(std::istream& in, const std::string& name, WordList* list) {
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (is_blank(line) || line[0] == '#') continue;
    const std::string word = trim(line);
    if (word.find('\t') != std::string::npos || word.find(' ') != std::string::npos)
      throw ParseError(lineno, name + ": word list entries are single words");
    list->members.insert(to_lower(word));
  }
}

template <typename Fn>
inline void load_optional_tsv(const std::filesystem::path& path, Fn&& add_entry) {
  std::ifstream in(path);
  if (!in) return;  // optional file, absent means empty
  try {
    parse_tsv(in, path.filename().string(), add_entry);
  } catch (const ParseError& e) {
    throw ParseError(e.line(), path.string() + ": " + e.what());
  }
}

}  // namespace detail

// Loads the lexicon files found under `dir`: subcat.tsv, semclass-noun.tsv,
// semclass-verb.tsv, stems.tsv and any wordlist-<name>.tsv. Missing files
// yield empty lexicons; a missing directory yields an empty bundle with a
// warning on `diag`.
inline LexiconBundle load_lexicons(const std::filesystem::path& dir,
                                   std::ostream& diag = std::cerr) {
  LexiconBundle bundle;
  if (dir.empty()) return bundle;
  if (!std::filesystem::is_directory(dir)) {
    diag << "warning: lexicon directory " << dir.string()
         << " not found, using empty lexicons\n";
    return bundle;
  }
  detail::load_optional_tsv(dir / "stems.tsv", [&](const std::string& w, const std::string& v) {
    bundle.add_stem(w, v);
  });
  detail::load_optional_tsv(dir / "subcat.tsv", [&](const std::string& w, const std::string& v) {
    bundle.add_subcat(w, v);
  });
  detail::load_optional_tsv(dir / "semclass-noun.tsv",
                            [&](const std::string& w, const std::string& v) {
                              bundle.add_noun_class(w, v);
                            });
  detail::load_optional_tsv(dir / "semclass-verb.tsv",
                            [&](const std::string& w, const std::string& v) {
                              bundle.add_verb_class(w, v);
                            });
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    const std::string filename = entry.path().filename().string();
    const std::string prefix = "wordlist-";
    if (filename.rfind(prefix, 0) != 0 || entry.path().extension() != ".tsv") continue;
    WordList list;
    list.name = filename.substr(prefix.size(),
                                filename.size() - prefix.size() - std::string(".tsv").size());
    if (list.name.empty()) throw ParseError(0, filename + ": word list has no name");
    std::ifstream in(entry.path());
    if (!in) throw IoError("cannot open " + entry.path().string());
    try {
      detail::parse_word_list(in, filename, &list);
    } catch (const ParseError& e) {
      throw ParseError(e.line(), entry.path().string() + ": " + e.what());
    }
    bundle.add_word_list(std::move(list));
  }
  return bundle;
}

}  // namespace relseq

#endif  // RELSEQ_LEXICON_HPP_
