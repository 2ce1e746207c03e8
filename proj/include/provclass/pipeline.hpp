#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "provclass/backend.hpp"
#include "provclass/keywords.hpp"
#include "provclass/segmenter.hpp"
#include "provclass/taxonomy.hpp"

namespace provclass {

enum class Provenance { Llm, Keyword, Both };
std::string_view to_string(Provenance p);

struct AnnotatedProvision {
  Provision provision;
  LabelSet raw_llm;      // backend labels before closure (audit)
  LabelSet raw_keyword;  // keyword hits before closure (audit)
  LabelSet predicted;    // closed final label set
  std::map<ConceptId, Provenance> sources;
  std::optional<LabelSet> gold;
  bool failed = false;  // backend/parse failure; excluded from metrics
  std::string error;
};

struct PredictOptions {
  OverallMode overall_mode = OverallMode::Derived;
};

/// Steps 2-4 over a set of provisions: paragraph-batched backend
/// classification, keyword classification, union, closure, provenance.
/// Backend failures mark the affected paragraph's provisions as failed and
/// the run continues.
std::vector<AnnotatedProvision> predict(const std::vector<Provision>& provisions,
                                        ChatBackend& backend, const PromptTemplate& tpl,
                                        const KeywordTable& keywords,
                                        const PredictOptions& options = {});

struct RunResult {
  int run_index = 0;
  std::vector<AnnotatedProvision> annotations;
  std::string backend_identity;
  std::string timestamp;  // wall-clock; not serialized into run files
};

struct RunOptions {
  int n = 20;
  unsigned seed = 0;
  PredictOptions predict;
  /// When positive and the template has more shots, each run samples this
  /// many shots with a run-specific generator seeded from `seed`.
  int sample_shots = 0;
  /// Runs execute sequentially by default (rate limits); this opts into
  /// concurrent runs.
  bool parallel_runs = false;
};

std::vector<RunResult> run_many(const std::vector<Provision>& provisions, ChatBackend& backend,
                                const PromptTemplate& tpl, const KeywordTable& keywords,
                                const RunOptions& options);

/// Attaches gold labels (by provision id) to prediction results.
void attach_gold(std::vector<AnnotatedProvision>& annotations,
                 const std::map<std::string, LabelSet>& gold);

/// Annotations JSONL: one object per provision with provision_id, doc_id,
/// text, predicted ids, per-concept sources, optional gold and run_index;
/// failed provisions carry failed/error fields instead of predictions.
std::string annotations_to_jsonl(const std::vector<AnnotatedProvision>& annotations,
                                 int run_index);
std::vector<AnnotatedProvision> annotations_from_jsonl(const std::string& content,
                                                       const std::string& source_name);
std::vector<AnnotatedProvision> load_annotations(const std::string& path);

/// Scored (non-failed, gold-carrying) provisions of one run as prediction
/// and gold maps for the metrics module.
void scored_maps(const std::vector<AnnotatedProvision>& annotations,
                 std::map<std::string, LabelSet>& predictions,
                 std::map<std::string, LabelSet>& gold);

}  // namespace provclass
