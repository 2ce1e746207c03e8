#include <algorithm>

#include "provclass/backend.hpp"
#include "provclass/errors.hpp"
#include "provclass/model_output.hpp"

namespace provclass {
namespace {

std::string normalize_ws(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending = false;
  for (char c : s) {
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      pending = !out.empty();
      continue;
    }
    if (pending) out.push_back(' ');
    pending = false;
    out.push_back(c);
  }
  return out;
}

std::vector<ChatMessage> build_messages(const PromptTemplate& tpl, const std::string& paragraph) {
  switch (tpl.mode) {
    case PromptMode::Fewshot:
      return build_fewshot_prompt(tpl, paragraph);
    case PromptMode::FinetuneInfer:
      tpl.validate();
      return {{Role::System, tpl.system_instruction}, {Role::User, tpl.user_message(paragraph)}};
    case PromptMode::FinetuneTrain:
      break;
  }
  throw ValidationError("classification requires a finetune_infer or fewshot template");
}

}  // namespace

ClassifyOutcome classify_paragraph(ChatBackend& backend, const PromptTemplate& tpl,
                                   const std::string& paragraph,
                                   const std::vector<Provision>& provisions) {
  ClassifyOutcome outcome;
  if (provisions.empty()) return outcome;

  outcome.raw_response = backend.complete(build_messages(tpl, paragraph));
  const std::vector<ParsedSentence> records = parse_model_output(outcome.raw_response);

  // Map label names onto the registry; anything unknown is dropped loudly.
  std::vector<LabelSet> record_labels(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    for (const std::string& name : records[i].labels) {
      auto id = concept_from_display_name(name);
      if (!id) id = concept_from_key(name);
      if (id) {
        record_labels[i].insert(*id);
      } else {
        outcome.warnings.push_back("dropped unknown label \"" + name + "\" for sentence \"" +
                                   records[i].text + "\"");
      }
    }
  }

  // Alignment passes: exact text, whitespace-normalized text, then leftover
  // records to leftover provisions in order.
  std::vector<int> assignment(provisions.size(), -1);
  std::vector<bool> record_used(records.size(), false);

  auto match_pass = [&](auto&& key) {
    for (std::size_t p = 0; p < provisions.size(); ++p) {
      if (assignment[p] >= 0) continue;
      const std::string want = key(provisions[p].text);
      for (std::size_t r = 0; r < records.size(); ++r) {
        if (record_used[r]) continue;
        if (key(records[r].text) == want) {
          assignment[p] = static_cast<int>(r);
          record_used[r] = true;
          break;
        }
      }
    }
  };
  match_pass([](const std::string& s) { return s; });
  match_pass([](const std::string& s) { return normalize_ws(s); });
  {
    std::size_t r = 0;
    for (std::size_t p = 0; p < provisions.size(); ++p) {
      if (assignment[p] >= 0) continue;
      while (r < records.size() && record_used[r]) ++r;
      if (r >= records.size()) break;
      assignment[p] = static_cast<int>(r);
      record_used[r] = true;
    }
  }

  outcome.labels.reserve(provisions.size());
  for (std::size_t p = 0; p < provisions.size(); ++p) {
    LabelSet labels;
    if (assignment[p] >= 0) labels = record_labels[static_cast<std::size_t>(assignment[p])];
    outcome.labels.emplace_back(provisions[p].provision_id, labels);
  }
  for (std::size_t r = 0; r < records.size(); ++r) {
    if (!record_used[r]) {
      outcome.warnings.push_back("response sentence not matched to any provision: \"" +
                                 records[r].text + "\"");
    }
  }
  return outcome;
}

}  // namespace provclass
