#include "provclass/model_output.hpp"

#include <cctype>

#include "provclass/errors.hpp"

namespace provclass {
namespace {

std::string_view rtrimmed(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string_view trimmed(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  return rtrimmed(s);
}

}  // namespace

std::vector<ParsedSentence> parse_model_output(const std::string& raw) {
  std::vector<ParsedSentence> records;
  std::size_t pos = 0;
  int line_number = 0;
  while (pos <= raw.size()) {
    const std::size_t nl = raw.find('\n', pos);
    const std::string line =
        raw.substr(pos, nl == std::string::npos ? std::string::npos : nl - pos);
    pos = nl == std::string::npos ? raw.size() + 1 : nl + 1;
    ++line_number;

    const std::string_view body = trimmed(line);
    if (body.empty()) continue;
    if (body.substr(0, 3) == "```") continue;  // fence line

    if (body.back() != ']') {
      throw ParseError("expected `sentence -> [labels]`", line_number, line);
    }
    const std::size_t open = body.rfind('[');
    if (open == std::string_view::npos) {
      throw ParseError("missing '[' in record", line_number, line);
    }
    // The arrow sits directly before the bracket, modulo whitespace.
    std::string_view head = rtrimmed(body.substr(0, open));
    if (head.size() < 2 || head.substr(head.size() - 2) != "->") {
      throw ParseError("missing '->' separator", line_number, line);
    }
    head.remove_suffix(2);
    const std::string_view sentence = rtrimmed(head);
    if (sentence.empty()) {
      throw ParseError("empty sentence text", line_number, line);
    }

    ParsedSentence record;
    record.text = std::string(sentence);
    std::string_view labels = body.substr(open + 1, body.size() - open - 2);
    labels = trimmed(labels);
    if (!labels.empty()) {
      std::size_t start = 0;
      while (start <= labels.size()) {
        std::size_t comma = labels.find(',', start);
        if (comma == std::string_view::npos) comma = labels.size();
        const std::string_view name = trimmed(labels.substr(start, comma - start));
        if (name.empty()) {
          throw ParseError("empty label name", line_number, line);
        }
        record.labels.emplace_back(name);
        if (comma == labels.size()) break;
        start = comma + 1;
      }
    }
    records.push_back(std::move(record));
  }
  return records;
}

}  // namespace provclass
