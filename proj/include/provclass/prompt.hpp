#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "provclass/taxonomy.hpp"

namespace provclass {

enum class Role { System, User, Assistant };

Role parse_role(std::string_view text);
std::string_view to_string(Role role);

struct ChatMessage {
  Role role = Role::User;
  std::string content;

  friend bool operator==(const ChatMessage&, const ChatMessage&) = default;
};

/// One sentence with its labels, as carried by training data and shots.
struct LabelledSentence {
  std::string text;
  LabelSet labels;

  friend bool operator==(const LabelledSentence&, const LabelledSentence&) = default;
};

/// Canonical labelled-sentence grammar, one line per sentence:
///   <sentence text> -> [Label, Label]
/// with display names in registry order and `[]` for an unlabelled sentence.
/// This is both what fine-tuning exports teach a model to emit and what
/// parse_model_output reads back.
std::string render_labelled_sentences(const std::vector<LabelledSentence>& sentences);

enum class PromptMode { FinetuneTrain, FinetuneInfer, Fewshot };

PromptMode parse_prompt_mode(std::string_view text);
std::string_view to_string(PromptMode mode);

/// Inference instructions must end with this imperative trigger.
inline constexpr std::string_view kImperativeTrigger = "Answer.";

struct Shot {
  std::string paragraph;
  std::vector<LabelledSentence> sentences;
};

struct PromptTemplate {
  std::string system_instruction;
  PromptMode mode = PromptMode::FinetuneInfer;
  std::vector<Shot> shots;  // few-shot only; at least one required there

  void validate() const;

  static PromptTemplate finetune_train_default();
  static PromptTemplate finetune_infer_default();
  static PromptTemplate fewshot_default(std::vector<Shot> shots);

  /// Plain-text instruction file; a `{{paragraph}}` placeholder, when
  /// present, is substituted into user messages instead of the bare text.
  static PromptTemplate from_file(const std::string& path, PromptMode mode);

  std::string user_message(const std::string& paragraph) const;

  std::string user_template = "{{paragraph}}";
};

/// Shots file: JSONL, one {"paragraph": ..., "sentences": [{"text": ...,
/// "labels": [ids]}]} per line.
std::vector<Shot> load_shots(const std::string& path);

/// User-message template file; must contain the {{paragraph}} placeholder.
std::string load_user_template(const std::string& path);

/// [system, user paragraph, assistant labelled listing] — one fine-tuning
/// record in the conversational chat format.
std::vector<ChatMessage> build_finetune_record(const PromptTemplate& tpl,
                                               const std::string& paragraph,
                                               const std::vector<LabelledSentence>& annotated);
std::vector<ChatMessage> build_finetune_record(const std::string& paragraph,
                                               const std::vector<LabelledSentence>& annotated);

/// System instruction, then one user/assistant pair per shot, then the
/// target paragraph as the final user message: 1 + 2k + 1 messages.
std::vector<ChatMessage> build_fewshot_prompt(const PromptTemplate& tpl,
                                              const std::string& paragraph);

/// Messages rendered as readable text (for goldens and audits).
std::string render_messages(const std::vector<ChatMessage>& messages);

}  // namespace provclass
