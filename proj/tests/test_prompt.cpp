#include <random>

#include "doctest.h"
#include "provclass/errors.hpp"
#include "provclass/jsonl.hpp"
#include "provclass/model_output.hpp"
#include "provclass/prompt.hpp"
#include "test_util.hpp"

using namespace provclass;

namespace {

std::vector<LabelledSentence> parse_back(const std::string& rendered) {
  std::vector<LabelledSentence> out;
  for (const ParsedSentence& record : parse_model_output(rendered)) {
    LabelledSentence sentence;
    sentence.text = record.text;
    for (const std::string& name : record.labels) {
      sentence.labels.insert(parse_concept(name));
    }
    out.push_back(std::move(sentence));
  }
  return out;
}

}  // namespace

TEST_SUITE("prompt") {

TEST_CASE("labels are rendered with display names in registry order") {
  const std::string rendered = render_labelled_sentences(
      {{"The mass must be checked.", {ConceptId::Mass, ConceptId::Measurement}}});
  CHECK(rendered == "The mass must be checked. -> [Measurement, Mass]");
}

TEST_CASE("finetune record: system, user paragraph, assistant listing") {
  const auto messages = build_finetune_record(
      "The mass must be checked.",
      {{"The mass must be checked.", {ConceptId::Mass, ConceptId::Measurement}}});
  REQUIRE(messages.size() == 3);
  CHECK(messages[0].role == Role::System);
  CHECK(messages[1].role == Role::User);
  CHECK(messages[1].content == "The mass must be checked.");
  CHECK(messages[2].role == Role::Assistant);
  CHECK(messages[2].content == "The mass must be checked. -> [Measurement, Mass]");
}

TEST_CASE("finetune record: unlabelled sentences carry explicit empty lists") {
  const auto messages = build_finetune_record(
      "One. Two.", {{"One.", {}}, {"Two.", {}}});
  CHECK(messages[2].content == "One. -> []\nTwo. -> []");
}

TEST_CASE("finetune record: multi-concept provision lists labels with parents") {
  // A provision constraining net weight over time at temperature.
  LabelSet labels{ConceptId::Mass, ConceptId::Temperature, ConceptId::TimeConstraint,
                  ConceptId::Measurement};
  const std::string text =
      "The loss must not exceed 4 per cent of the net weight 1 hour after filling.";
  const auto messages = build_finetune_record(text, {{text, labels}});
  CHECK(messages[2].content ==
        text + " -> [Measurement, Mass, Temperature, Time Constraint]");
}

TEST_CASE("finetune record: empty paragraph is a validation error") {
  CHECK_THROWS_AS(build_finetune_record("  \n", {}), ValidationError);
}

TEST_CASE("finetune record: sentences must not span lines") {
  CHECK_THROWS_AS(build_finetune_record("p", {{"two\nlines.", {}}}), ValidationError);
}

TEST_CASE("fewshot message arithmetic: 1 + 2k + 1") {
  for (int k = 1; k <= 5; ++k) {
    std::vector<Shot> shots;
    for (int i = 0; i < k; ++i) {
      shots.push_back({"Paragraph " + std::to_string(i) + ".",
                       {{"Paragraph " + std::to_string(i) + ".", {}}}});
    }
    const PromptTemplate tpl = PromptTemplate::fewshot_default(std::move(shots));
    const auto messages = build_fewshot_prompt(tpl, "Target paragraph.");
    CHECK(messages.size() == static_cast<std::size_t>(1 + 2 * k + 1));
    CHECK(messages.front().role == Role::System);
    CHECK(messages.back().role == Role::User);
    CHECK(messages.back().content == "Target paragraph.");
    for (int i = 0; i < k; ++i) {
      CHECK(messages[1 + 2 * i].role == Role::User);
      CHECK(messages[2 + 2 * i].role == Role::Assistant);
    }
  }
}

TEST_CASE("fewshot without shots is a validation error") {
  PromptTemplate tpl;
  tpl.mode = PromptMode::Fewshot;
  tpl.system_instruction = "x";
  CHECK_THROWS_AS(build_fewshot_prompt(tpl, "Paragraph."), ValidationError);
}

TEST_CASE("fewshot prompt from shipped shots matches the committed golden") {
  const PromptTemplate tpl =
      PromptTemplate::fewshot_default(load_shots(shipped_data("fewshot_shots.example.jsonl")));
  const auto messages = build_fewshot_prompt(
      tpl, "The container must be kept below 4 degrees Celsius for 2 hours.");
  const std::string expected = read_text_file(test_data("fewshot_prompt.golden.txt"));
  CHECK(render_messages(messages) == expected);
}

TEST_CASE("inference instruction must end with the imperative trigger") {
  PromptTemplate tpl = PromptTemplate::finetune_infer_default();
  CHECK_NOTHROW(tpl.validate());
  tpl.system_instruction = "Label the sentences. Answer:";
  CHECK_THROWS_AS(tpl.validate(), ValidationError);
  const PromptTemplate from_file =
      PromptTemplate::from_file(shipped_data("templates/finetune_infer.txt"),
                                PromptMode::FinetuneInfer);
  CHECK(from_file.system_instruction.ends_with(std::string(kImperativeTrigger)));
}

TEST_CASE("round-trip: parse_model_output inverts build_finetune_record") {
  std::mt19937 gen(20240504);
  std::uniform_int_distribution<int> sentence_count(1, 6);
  std::uniform_int_distribution<int> word_count(1, 10);
  std::uniform_int_distribution<int> coin(0, 1);
  const std::vector<std::string> words = {"the",  "product", "label",  "must", "weight",
                                          "hold", "4",       "within", "cold", "e.g."};
  // A few hostile tokens that stress the grammar.
  const std::vector<std::string> hostile = {"->", "[note]", "a,b", "x]"};
  std::uniform_int_distribution<std::size_t> word_pick(0, words.size() - 1);
  std::uniform_int_distribution<std::size_t> hostile_pick(0, hostile.size() - 1);
  std::uniform_int_distribution<int> label_pick(0, kConceptCount - 2);

  for (int trial = 0; trial < 100; ++trial) {
    std::vector<LabelledSentence> annotated;
    const int sentences = sentence_count(gen);
    for (int s = 0; s < sentences; ++s) {
      std::string text;
      const int n_words = word_count(gen);
      for (int w = 0; w < n_words; ++w) {
        if (!text.empty()) text += " ";
        text += coin(gen) == 0 && w > 0 ? hostile[hostile_pick(gen)] : words[word_pick(gen)];
      }
      text += ".";
      LabelSet labels;
      const int n_labels = coin(gen) ? label_pick(gen) % 4 : 0;
      for (int l = 0; l < n_labels; ++l) {
        labels.insert(static_cast<ConceptId>(label_pick(gen)));
      }
      annotated.push_back({text, labels});
    }
    const auto messages = build_finetune_record("paragraph stand-in", annotated);
    const auto recovered = parse_back(messages[2].content);
    REQUIRE(recovered.size() == annotated.size());
    for (std::size_t i = 0; i < annotated.size(); ++i) {
      CAPTURE(annotated[i].text);
      CHECK(recovered[i].text == annotated[i].text);
      CHECK(recovered[i].labels == annotated[i].labels);
    }
  }
}

TEST_CASE("parser tolerates fences and blank lines") {
  const std::string fenced =
      "```\n\nKeep at 4 \u00b0C. -> [Measurement, Temperature]\n\nSome sentence. -> []\n```\n";
  const auto records = parse_model_output(fenced);
  REQUIRE(records.size() == 2);
  CHECK(records[0].text == "Keep at 4 \u00b0C.");
  CHECK(records[0].labels == std::vector<std::string>{"Measurement", "Temperature"});
  CHECK(records[1].labels.empty());
}

TEST_CASE("parser reports the offending line") {
  try {
    parse_model_output("good one. -> []\nthis line is junk\n");
    FAIL("expected ParseError");
  } catch (const ParseError& ex) {
    CHECK(ex.line == 2);
    CHECK(ex.raw == "this line is junk");
  }
  CHECK_THROWS_AS(parse_model_output("x. -> [Mass,,Temperature]"), ParseError);
  CHECK_THROWS_AS(parse_model_output(" -> [Mass]"), ParseError);
}

TEST_CASE("shots file loader validates structure") {
  const auto shots = load_shots(shipped_data("fewshot_shots.example.jsonl"));
  REQUIRE(shots.size() == 5);
  CHECK(!shots[0].paragraph.empty());
  CHECK(shots[0].sentences.size() == 2);
  CHECK(shots[0].sentences[0].labels.contains(ConceptId::Mass));
}

TEST_CASE("user template substitutes the paragraph placeholder") {
  PromptTemplate tpl = PromptTemplate::finetune_infer_default();
  tpl.user_template = "Paragraph follows.\n{{paragraph}}\nEnd.";
  CHECK(tpl.user_message("BODY") == "Paragraph follows.\nBODY\nEnd.");
}

}  // TEST_SUITE
