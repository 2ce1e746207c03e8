#include <fstream>
#include <sstream>

#include "provclass/backend.hpp"
#include "provclass/errors.hpp"

namespace provclass {
namespace {

std::string_view trimmed(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
    s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

}  // namespace

void BackendConfig::validate() const {
  if (temperature < 0.0 || temperature > 2.0) {
    throw ValidationError("temperature must lie in [0, 2]");
  }
  if (max_parallel_requests < 1) {
    throw ValidationError("max_parallel_requests must be at least 1");
  }
  if (retry.max_attempts < 1) {
    throw ValidationError("retry.max_attempts must be at least 1");
  }
}

MockBackend::MockBackend(std::vector<std::pair<ConceptId, std::string>> rules, std::string name)
    : name_(std::move(name)) {
  for (const auto& [concept_id, phrase] : rules) matcher_.add(concept_id, phrase);
  matcher_.build();
}

MockBackend MockBackend::from_rules_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open mock rules file: " + path);
  std::vector<std::pair<ConceptId, std::string>> rules;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    auto t = trimmed(line);
    if (t.empty() || t.front() == '#') continue;
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos) {
      throw ValidationError(path + ":" + std::to_string(line_number) +
                            ": expected `concept_id<TAB>phrase`");
    }
    rules.emplace_back(parse_concept(trimmed(line.substr(0, tab))),
                       std::string(trimmed(line.substr(tab + 1))));
  }
  if (rules.empty()) throw ValidationError("mock rules file is empty: " + path);
  return MockBackend(std::move(rules), "mock:" + path);
}

std::string MockBackend::complete(const std::vector<ChatMessage>& messages) {
  const ChatMessage* last_user = nullptr;
  for (const ChatMessage& m : messages) {
    if (m.role == Role::User) last_user = &m;
  }
  if (last_user == nullptr) throw ValidationError("mock backend needs a user message");

  std::vector<LabelledSentence> labelled;
  for (const std::string& sentence : split_sentences(last_user->content, splitter_)) {
    // The output grammar is line-oriented; sentences spanning lines must be
    // flattened before rendering.
    std::string flat;
    flat.reserve(sentence.size());
    bool pending = false;
    for (char c : sentence) {
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        pending = !flat.empty();
        continue;
      }
      if (pending) flat.push_back(' ');
      pending = false;
      flat.push_back(c);
    }
    labelled.push_back({flat, matcher_.match(flat)});
  }
  return render_labelled_sentences(labelled);
}

}  // namespace provclass
