#pragma once

#include <string>
#include <vector>

#include "provclass/segmenter.hpp"

namespace provclass {

/// Provisions JSONL: provision_id, doc_id, index, paragraph, text, prefix,
/// prefix_applied. Written by `segment`, consumed by `classify`/`predict`.
std::string provisions_to_jsonl(const std::vector<Provision>& provisions);
std::vector<Provision> provisions_from_jsonl(const std::string& content,
                                             const std::string& source_name);
std::vector<Provision> load_provisions(const std::string& path);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace provclass
