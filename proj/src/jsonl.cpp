#include "provclass/jsonl.hpp"

#include <fstream>
#include <sstream>

#include "nlohmann/json.hpp"
#include "provclass/errors.hpp"

namespace provclass {
namespace {

using ordered_json = nlohmann::ordered_json;

}  // namespace

std::string provisions_to_jsonl(const std::vector<Provision>& provisions) {
  std::ostringstream os;
  for (const Provision& p : provisions) {
    ordered_json record;
    record["provision_id"] = p.provision_id;
    record["doc_id"] = p.doc_id;
    record["index"] = p.index;
    record["paragraph"] = p.paragraph;
    record["text"] = p.text;
    record["prefix"] = p.prefix;
    record["prefix_applied"] = p.prefix_applied;
    os << record.dump() << "\n";
  }
  return os.str();
}

std::vector<Provision> provisions_from_jsonl(const std::string& content,
                                             const std::string& source_name) {
  std::vector<Provision> provisions;
  std::istringstream in(content);
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const ordered_json record = ordered_json::parse(line);
      Provision p;
      p.provision_id = record.at("provision_id").get<std::string>();
      p.doc_id = record.at("doc_id").get<std::string>();
      p.index = record.value("index", static_cast<int>(provisions.size()));
      p.paragraph = record.value("paragraph", p.index);
      p.text = record.at("text").get<std::string>();
      p.prefix = record.value("prefix", "");
      p.prefix_applied = record.value("prefix_applied", false);
      provisions.push_back(std::move(p));
    } catch (const nlohmann::json::exception& ex) {
      throw ValidationError(source_name + ":" + std::to_string(line_number) + ": " + ex.what());
    }
  }
  return provisions;
}

std::vector<Provision> load_provisions(const std::string& path) {
  return provisions_from_jsonl(read_text_file(path), path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write file: " + path);
  out << content;
}

}  // namespace provclass
