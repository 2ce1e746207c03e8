#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "provclass/segmenter.hpp"
#include "provclass/taxonomy.hpp"

namespace provclass {

/// Case-insensitive multi-pattern matcher (Aho-Corasick over case-folded
/// bytes) with word-boundary checks: a phrase never matches inside a longer
/// alphanumeric token. Build once, share across threads.
class PhraseMatcher {
 public:
  PhraseMatcher() = default;
  void add(ConceptId concept_id, std::string_view phrase);
  void build();

  /// Concepts with at least one phrase occurring in `text`.
  LabelSet match(std::string_view text) const;

  bool built() const { return built_; }

 private:
  struct Node {
    std::vector<std::pair<unsigned char, int>> edges;
    int fail = 0;
    std::vector<int> outputs;  // pattern indices ending here
  };
  struct Pattern {
    ConceptId concept_id;
    std::string folded;
    bool starts_alnum = false;
    bool ends_alnum = false;
  };

  int child(int node, unsigned char c) const;

  std::vector<Node> nodes_{1};
  std::vector<Pattern> patterns_;
  bool built_ = false;
};

/// Keyword lookup table for the scarce concepts. The loader enforces that
/// only scarce concepts appear and that phrases are non-empty and unique per
/// concept.
struct KeywordTable {
  std::vector<std::pair<ConceptId, std::string>> entries;

  /// TSV: `concept_id<TAB>phrase`, UTF-8, '#' comment lines.
  static KeywordTable load(const std::string& path);
  static KeywordTable parse(const std::string& content, const std::string& source_name);

  void validate() const;
  PhraseMatcher matcher() const;
};

/// Scarce concepts whose phrases occur in the provision text. Never returns
/// non-scarce concepts and never applies closure.
LabelSet classify_keywords(const Provision& provision, const KeywordTable& table);
LabelSet classify_keywords(std::string_view text, const PhraseMatcher& matcher);

}  // namespace provclass
