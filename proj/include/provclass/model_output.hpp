#pragma once

#include <string>
#include <vector>

namespace provclass {

struct ParsedSentence {
  std::string text;
  std::vector<std::string> labels;  // label names as emitted; not yet validated

  friend bool operator==(const ParsedSentence&, const ParsedSentence&) = default;
};

/// Parses the canonical grammar `<sentence> -> [Label, Label, ...]`, one
/// record per line. Blank lines and Markdown code fences are tolerated; any
/// other non-conforming line raises ParseError with its line number and raw
/// content.
std::vector<ParsedSentence> parse_model_output(const std::string& raw);

}  // namespace provclass
