#include <cstdlib>

#include "doctest.h"
#include "provclass/config.hpp"
#include "provclass/errors.hpp"
#include "test_util.hpp"

using namespace provclass;

TEST_SUITE("config") {

TEST_CASE("environment interpolation") {
  setenv("PROVCLASS_TEST_VALUE", "resolved", 1);
  CHECK(interpolate_env("plain") == "plain");
  CHECK(interpolate_env("pre-${PROVCLASS_TEST_VALUE}-post") == "pre-resolved-post");
  CHECK(interpolate_env("${PROVCLASS_TEST_VALUE}${PROVCLASS_TEST_VALUE}") ==
        "resolvedresolved");
  unsetenv("PROVCLASS_TEST_VALUE");
  CHECK_THROWS_WITH_AS(interpolate_env("${PROVCLASS_TEST_VALUE}"),
                       doctest::Contains("PROVCLASS_TEST_VALUE"), ValidationError);
}

TEST_CASE("example config loads with expected fields") {
  // Paths inside the example are relative to the repository root; loading
  // only parses them, so the cwd does not matter.
  const AppConfig cfg = AppConfig::load(shipped_data("config.example.json"));
  CHECK(cfg.run_count == 20);
  CHECK(cfg.overall_mode == OverallMode::Derived);
  CHECK(cfg.backend.model == "my-finetuned-model");
  CHECK(cfg.backend.temperature == 0.2);
  CHECK(cfg.backend.retry.max_attempts == 3);
  CHECK(cfg.seed == 7);
  CHECK(!cfg.keyword_table_path.empty());
  CHECK(!cfg.segmenter.abbreviations.empty());
}

TEST_CASE("config validation") {
  CHECK_THROWS_AS(AppConfig::load("/nonexistent/config.json"), IoError);
}

}  // TEST_SUITE
