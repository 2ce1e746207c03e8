#include "provclass/config.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "nlohmann/json.hpp"
#include "provclass/errors.hpp"

namespace provclass {
namespace {

using json = nlohmann::json;

std::string get_string(const json& node, const char* key, std::string fallback) {
  if (!node.contains(key)) return fallback;
  return interpolate_env(node.at(key).get<std::string>());
}

// Relative paths inside a config resolve against the config's directory.
std::string resolve_path(const std::filesystem::path& base, const std::string& path) {
  if (path.empty()) return path;
  std::filesystem::path p(path);
  if (p.is_absolute()) return path;
  return (base / p).lexically_normal().string();
}

}  // namespace

std::string interpolate_env(const std::string& text) {
  std::string out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t open = text.find("${", pos);
    if (open == std::string::npos) {
      out += text.substr(pos);
      break;
    }
    const std::size_t closing = text.find('}', open + 2);
    if (closing == std::string::npos) {
      out += text.substr(pos);
      break;
    }
    out += text.substr(pos, open - pos);
    const std::string name = text.substr(open + 2, closing - open - 2);
    const char* value = std::getenv(name.c_str());
    if (value == nullptr) {
      throw ValidationError("config references unset environment variable ${" + name + "}");
    }
    out += value;
    pos = closing + 1;
  }
  return out;
}

AppConfig AppConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config: " + path);
  json root;
  try {
    root = json::parse(in);
  } catch (const json::exception& ex) {
    throw ValidationError("config " + path + " is not valid JSON: " + ex.what());
  }

  AppConfig cfg;
  const std::filesystem::path base = std::filesystem::path(path).parent_path();
  if (root.contains("segmenter")) {
    const json& seg = root["segmenter"];
    const std::string abbr_path = resolve_path(base, get_string(seg, "abbreviations_path", ""));
    if (!abbr_path.empty()) cfg.segmenter.abbreviations = load_abbreviations(abbr_path);
    if (seg.contains("markers")) {
      const json& markers = seg["markers"];
      cfg.segmenter.paren_letter = markers.value("paren_letter", true);
      cfg.segmenter.paren_roman = markers.value("paren_roman", true);
      cfg.segmenter.paren_number = markers.value("paren_number", true);
      cfg.segmenter.number_dot = markers.value("number_dot", true);
      cfg.segmenter.bullet = markers.value("bullet", true);
    }
  }
  cfg.keyword_table_path = resolve_path(base, get_string(root, "keyword_table", ""));
  cfg.mock_rules_path = resolve_path(base, get_string(root, "mock_rules", ""));
  if (root.contains("backend")) {
    const json& be = root["backend"];
    cfg.backend.endpoint = get_string(be, "endpoint", "");
    cfg.backend.model = get_string(be, "model", "");
    cfg.backend.temperature = be.value("temperature", 0.2);
    cfg.backend.max_parallel_requests = be.value("max_parallel_requests", 4);
    cfg.backend.retry.max_attempts = be.value("retry_max_attempts", 3);
    cfg.backend.retry.base_delay =
        std::chrono::milliseconds(be.value("retry_base_delay_ms", 250));
    cfg.backend.timeout = std::chrono::milliseconds(be.value("timeout_ms", 30000));
    cfg.backend.api_key_env = get_string(be, "api_key_env", "PROVCLASS_API_KEY");
    cfg.backend.validate();
  }
  if (root.contains("templates")) {
    const json& tpl = root["templates"];
    cfg.finetune_train_template_path = resolve_path(base, get_string(tpl, "finetune_train", ""));
    cfg.finetune_infer_template_path = resolve_path(base, get_string(tpl, "finetune_infer", ""));
    cfg.fewshot_template_path = resolve_path(base, get_string(tpl, "fewshot", ""));
    cfg.user_template_path = resolve_path(base, get_string(tpl, "user", ""));
  }
  cfg.shots_path = resolve_path(base, get_string(root, "shots", ""));
  cfg.run_count = root.value("run_count", 20);
  if (cfg.run_count < 1) throw ValidationError("run_count must be at least 1");
  if (root.contains("overall_mode")) {
    cfg.overall_mode = parse_overall_mode(root["overall_mode"].get<std::string>());
  }
  cfg.output_dir = get_string(root, "output_dir", ".");
  cfg.seed = root.value("seed", 0u);
  return cfg;
}

}  // namespace provclass
