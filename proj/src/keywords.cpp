#include "provclass/keywords.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <fstream>
#include <sstream>

#include "provclass/errors.hpp"

namespace provclass {
namespace {

unsigned char fold(unsigned char c) { return static_cast<unsigned char>(std::tolower(c)); }

bool is_alnum(unsigned char c) { return std::isalnum(c) != 0; }

std::string fold_string(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(fold(c)); });
  return out;
}

std::string_view trimmed(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

int PhraseMatcher::child(int node, unsigned char c) const {
  for (const auto& [edge, to] : nodes_[node].edges) {
    if (edge == c) return to;
  }
  return -1;
}

void PhraseMatcher::add(ConceptId concept_id, std::string_view phrase) {
  if (built_) throw ValidationError("PhraseMatcher is frozen after build()");
  Pattern pat;
  pat.concept_id = concept_id;
  pat.folded = fold_string(phrase);
  if (pat.folded.empty()) throw ValidationError("empty keyword phrase");
  pat.starts_alnum = is_alnum(static_cast<unsigned char>(pat.folded.front()));
  pat.ends_alnum = is_alnum(static_cast<unsigned char>(pat.folded.back()));

  int node = 0;
  for (unsigned char c : pat.folded) {
    int next = child(node, c);
    if (next < 0) {
      next = static_cast<int>(nodes_.size());
      nodes_.emplace_back();
      nodes_[node].edges.emplace_back(c, next);
    }
    node = next;
  }
  nodes_[node].outputs.push_back(static_cast<int>(patterns_.size()));
  patterns_.push_back(std::move(pat));
}

void PhraseMatcher::build() {
  std::deque<int> queue;
  for (const auto& [c, to] : nodes_[0].edges) {
    nodes_[to].fail = 0;
    queue.push_back(to);
  }
  while (!queue.empty()) {
    const int node = queue.front();
    queue.pop_front();
    for (const auto& [c, to] : nodes_[node].edges) {
      int fail = nodes_[node].fail;
      while (fail != 0 && child(fail, c) < 0) fail = nodes_[fail].fail;
      const int target = child(fail, c);
      nodes_[to].fail = (target >= 0 && target != to) ? target : 0;
      const auto& inherited = nodes_[nodes_[to].fail].outputs;
      nodes_[to].outputs.insert(nodes_[to].outputs.end(), inherited.begin(), inherited.end());
      queue.push_back(to);
    }
  }
  built_ = true;
}

LabelSet PhraseMatcher::match(std::string_view text) const {
  if (!built_) throw ValidationError("PhraseMatcher::build() must run before match()");
  LabelSet result;
  int node = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const unsigned char c = fold(static_cast<unsigned char>(text[i]));
    while (node != 0 && child(node, c) < 0) node = nodes_[node].fail;
    const int next = child(node, c);
    node = next >= 0 ? next : 0;
    for (int pattern_index : nodes_[node].outputs) {
      const Pattern& pat = patterns_[pattern_index];
      if (result.contains(pat.concept_id)) continue;
      const std::size_t begin = i + 1 - pat.folded.size();
      // Boundary holds unless an alphanumeric phrase edge touches an
      // alphanumeric neighbour in the text.
      if (pat.starts_alnum && begin > 0 &&
          is_alnum(static_cast<unsigned char>(text[begin - 1]))) {
        continue;
      }
      if (pat.ends_alnum && i + 1 < text.size() &&
          is_alnum(static_cast<unsigned char>(text[i + 1]))) {
        continue;
      }
      result.insert(pat.concept_id);
    }
  }
  return result;
}

KeywordTable KeywordTable::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open keyword table: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str(), path);
}

KeywordTable KeywordTable::parse(const std::string& content, const std::string& source_name) {
  KeywordTable table;
  std::istringstream in(content);
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    auto t = trimmed(line);
    if (t.empty() || t.front() == '#') continue;
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos) {
      throw ValidationError(source_name + ":" + std::to_string(line_number) +
                            ": expected `concept_id<TAB>phrase`");
    }
    const std::string key(trimmed(line.substr(0, tab)));
    const std::string phrase(trimmed(line.substr(tab + 1)));
    const ConceptId concept_id = parse_concept(key);
    if (phrase.empty()) {
      throw ValidationError(source_name + ":" + std::to_string(line_number) + ": empty phrase");
    }
    table.entries.emplace_back(concept_id, phrase);
  }
  table.validate();
  return table;
}

void KeywordTable::validate() const {
  for (const auto& [concept_id, phrase] : entries) {
    if (!concept_info(concept_id).scarce) {
      throw ValidationError("keyword table entry for non-scarce concept \"" +
                            std::string(concept_key(concept_id)) + "\"");
    }
    if (phrase.empty()) throw ValidationError("empty keyword phrase");
  }
  for (std::size_t i = 0; i < entries.size(); ++i) {
    for (std::size_t j = i + 1; j < entries.size(); ++j) {
      if (entries[i].first == entries[j].first &&
          fold_string(entries[i].second) == fold_string(entries[j].second)) {
        throw ValidationError("duplicate phrase \"" + entries[i].second + "\" for concept \"" +
                              std::string(concept_key(entries[i].first)) + "\"");
      }
    }
  }
}

PhraseMatcher KeywordTable::matcher() const {
  validate();
  PhraseMatcher m;
  for (const auto& [concept_id, phrase] : entries) m.add(concept_id, phrase);
  m.build();
  return m;
}

LabelSet classify_keywords(const Provision& provision, const KeywordTable& table) {
  return table.matcher().match(provision.text);
}

LabelSet classify_keywords(std::string_view text, const PhraseMatcher& matcher) {
  return matcher.match(text);
}

}  // namespace provclass
