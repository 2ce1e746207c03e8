#pragma once

#include <string>

#include "provclass/backend.hpp"
#include "provclass/segmenter.hpp"
#include "provclass/taxonomy.hpp"

namespace provclass {

/// Experiment manifest shared by all subcommands. JSON file; string values
/// may interpolate environment variables as ${NAME}. Flags override fields.
struct AppConfig {
  SegmenterConfig segmenter;
  std::string keyword_table_path;
  std::string mock_rules_path;
  BackendConfig backend;
  std::string finetune_train_template_path;
  std::string finetune_infer_template_path;
  std::string fewshot_template_path;
  std::string user_template_path;  // plain text with a {{paragraph}} placeholder
  std::string shots_path;
  int run_count = 20;
  OverallMode overall_mode = OverallMode::Derived;
  std::string output_dir = ".";
  unsigned seed = 0;

  static AppConfig load(const std::string& path);
};

/// Replaces every ${NAME} with the value of the environment variable NAME;
/// an unset variable is a validation error naming it.
std::string interpolate_env(const std::string& text);

}  // namespace provclass
