#include "provclass/prompt.hpp"

#include <fstream>
#include <sstream>

#include "nlohmann/json.hpp"
#include "provclass/errors.hpp"

namespace provclass {
namespace {

using json = nlohmann::json;

// Our own wording; the replication package's exact instruction text can be
// substituted through PromptTemplate::from_file.
constexpr std::string_view kInstructionBody =
    "You label provisions of food-safety regulations. Split the given paragraph into its "
    "sentences and assign to each sentence every concept it mentions, choosing only from this "
    "list:\n"
    "- Data: information that must be recorded, shown or kept\n"
    "- Label Data: information required to appear on a product label or package\n"
    "- Non-label Data: information collected or retained outside the label, such as records and "
    "certificates\n"
    "- Measurement: a physical quantity to be measured or checked\n"
    "- Colour: colour of a product\n"
    "- Firmness: how firm a product must be\n"
    "- Mass: weight, volume or net quantity\n"
    "- Pathogen: disease-causing microorganisms\n"
    "- Size: dimensions such as length, thickness or area\n"
    "- Temperature: temperature conditions or limits\n"
    "- Water Content: moisture or humidity\n"
    "- Time Constraint: deadlines, intervals or periodicity\n"
    "Write one line per sentence in the form: <sentence> -> [Concept, Concept]. Use [] when no "
    "concept applies.\n";

std::string replace_all(std::string text, std::string_view needle, std::string_view value) {
  std::size_t pos = 0;
  while ((pos = text.find(needle, pos)) != std::string::npos) {
    text.replace(pos, needle.size(), value);
    pos += value.size();
  }
  return text;
}

}  // namespace

Role parse_role(std::string_view text) {
  if (text == "system") return Role::System;
  if (text == "user") return Role::User;
  if (text == "assistant") return Role::Assistant;
  throw ValidationError("unknown chat role: \"" + std::string(text) + "\"");
}

std::string_view to_string(Role role) {
  switch (role) {
    case Role::System:
      return "system";
    case Role::User:
      return "user";
    case Role::Assistant:
      return "assistant";
  }
  return "";
}

std::string render_labelled_sentences(const std::vector<LabelledSentence>& sentences) {
  std::ostringstream os;
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    if (i > 0) os << "\n";
    os << sentences[i].text << " -> [";
    const auto ids = sentences[i].labels.to_vector();
    for (std::size_t j = 0; j < ids.size(); ++j) {
      if (j > 0) os << ", ";
      os << concept_display_name(ids[j]);
    }
    os << "]";
  }
  return os.str();
}

PromptMode parse_prompt_mode(std::string_view text) {
  if (text == "finetune_train") return PromptMode::FinetuneTrain;
  if (text == "finetune_infer") return PromptMode::FinetuneInfer;
  if (text == "fewshot") return PromptMode::Fewshot;
  throw ValidationError("unknown prompt mode: \"" + std::string(text) + "\"");
}

std::string_view to_string(PromptMode mode) {
  switch (mode) {
    case PromptMode::FinetuneTrain:
      return "finetune_train";
    case PromptMode::FinetuneInfer:
      return "finetune_infer";
    case PromptMode::Fewshot:
      return "fewshot";
  }
  return "";
}

void PromptTemplate::validate() const {
  if (system_instruction.empty()) throw ValidationError("prompt template has no instruction");
  if (mode == PromptMode::Fewshot && shots.empty()) {
    throw ValidationError("few-shot template requires at least one shot");
  }
  if (mode == PromptMode::FinetuneInfer) {
    const std::string_view trigger = kImperativeTrigger;
    std::string_view text = system_instruction;
    while (!text.empty() && (text.back() == '\n' || text.back() == ' ')) text.remove_suffix(1);
    if (text.size() < trigger.size() ||
        text.substr(text.size() - trigger.size()) != trigger) {
      throw ValidationError(std::string("inference instruction must end with \"") +
                            std::string(trigger) + "\"");
    }
  }
}

PromptTemplate PromptTemplate::finetune_train_default() {
  PromptTemplate tpl;
  tpl.mode = PromptMode::FinetuneTrain;
  tpl.system_instruction = std::string(kInstructionBody) + "Answer:";
  return tpl;
}

PromptTemplate PromptTemplate::finetune_infer_default() {
  PromptTemplate tpl;
  tpl.mode = PromptMode::FinetuneInfer;
  tpl.system_instruction = std::string(kInstructionBody) + std::string(kImperativeTrigger);
  return tpl;
}

PromptTemplate PromptTemplate::fewshot_default(std::vector<Shot> shots) {
  PromptTemplate tpl;
  tpl.mode = PromptMode::Fewshot;
  tpl.system_instruction = std::string(kInstructionBody) + std::string(kImperativeTrigger);
  tpl.shots = std::move(shots);
  return tpl;
}

PromptTemplate PromptTemplate::from_file(const std::string& path, PromptMode mode) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open prompt template: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  PromptTemplate tpl;
  tpl.mode = mode;
  tpl.system_instruction = buffer.str();
  while (!tpl.system_instruction.empty() && tpl.system_instruction.back() == '\n') {
    tpl.system_instruction.pop_back();
  }
  tpl.validate();
  return tpl;
}

std::string PromptTemplate::user_message(const std::string& paragraph) const {
  if (user_template.find("{{paragraph}}") == std::string::npos) return paragraph;
  return replace_all(user_template, "{{paragraph}}", paragraph);
}

std::vector<Shot> load_shots(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open shots file: " + path);
  std::vector<Shot> shots;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::exception& ex) {
      throw ValidationError(path + ":" + std::to_string(line_number) + ": " + ex.what());
    }
    Shot shot;
    shot.paragraph = record.at("paragraph").get<std::string>();
    for (const auto& s : record.at("sentences")) {
      LabelledSentence sentence;
      sentence.text = s.at("text").get<std::string>();
      sentence.labels = LabelSet::from_keys(s.at("labels").get<std::vector<std::string>>());
      shot.sentences.push_back(std::move(sentence));
    }
    shots.push_back(std::move(shot));
  }
  if (shots.empty()) throw ValidationError("shots file is empty: " + path);
  return shots;
}

std::string load_user_template(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open user template: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  std::string text = buffer.str();
  while (!text.empty() && text.back() == '\n') text.pop_back();
  if (text.find("{{paragraph}}") == std::string::npos) {
    throw ValidationError("user template " + path + " lacks the {{paragraph}} placeholder");
  }
  return text;
}

std::vector<ChatMessage> build_finetune_record(const PromptTemplate& tpl,
                                               const std::string& paragraph,
                                               const std::vector<LabelledSentence>& annotated) {
  if (paragraph.find_first_not_of(" \t\r\n") == std::string::npos) {
    throw ValidationError("fine-tuning record requires a non-empty paragraph");
  }
  for (const LabelledSentence& s : annotated) {
    if (s.text.empty()) throw ValidationError("annotated sentence text must be non-empty");
    if (s.text.find('\n') != std::string::npos) {
      throw ValidationError("sentence text must not span lines: \"" + s.text + "\"");
    }
  }
  return {
      {Role::System, tpl.system_instruction},
      {Role::User, tpl.user_message(paragraph)},
      {Role::Assistant, render_labelled_sentences(annotated)},
  };
}

std::vector<ChatMessage> build_finetune_record(const std::string& paragraph,
                                               const std::vector<LabelledSentence>& annotated) {
  return build_finetune_record(PromptTemplate::finetune_train_default(), paragraph, annotated);
}

std::vector<ChatMessage> build_fewshot_prompt(const PromptTemplate& tpl,
                                              const std::string& paragraph) {
  if (tpl.mode != PromptMode::Fewshot) {
    throw ValidationError("build_fewshot_prompt requires a few-shot template");
  }
  tpl.validate();
  if (paragraph.find_first_not_of(" \t\r\n") == std::string::npos) {
    throw ValidationError("few-shot prompt requires a non-empty paragraph");
  }
  std::vector<ChatMessage> messages;
  messages.reserve(2 + 2 * tpl.shots.size());
  messages.push_back({Role::System, tpl.system_instruction});
  for (const Shot& shot : tpl.shots) {
    messages.push_back({Role::User, tpl.user_message(shot.paragraph)});
    messages.push_back({Role::Assistant, render_labelled_sentences(shot.sentences)});
  }
  messages.push_back({Role::User, tpl.user_message(paragraph)});
  return messages;
}

std::string render_messages(const std::vector<ChatMessage>& messages) {
  std::ostringstream os;
  for (const ChatMessage& m : messages) {
    os << "[" << to_string(m.role) << "]\n" << m.content << "\n\n";
  }
  return os.str();
}

}  // namespace provclass
