#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "provclass/segmenter.hpp"
#include "provclass/taxonomy.hpp"

namespace provclass {

enum class Split { F, T };
Split parse_split(std::string_view text);
std::string_view to_string(Split split);

struct CorpusRecord {
  std::string provision_id;
  std::string doc_id;
  Jurisdiction jurisdiction = Jurisdiction::CA;
  Split split = Split::F;
  std::string text;
  LabelSet gold;  // closure-normalized on load
  std::vector<std::string> annotators;
  std::map<std::string, LabelSet> gold_by_annotator;  // adjudication left to the user

  friend bool operator==(const CorpusRecord&, const CorpusRecord&) = default;
};

struct NormalizationChange {
  std::string provision_id;
  std::vector<std::string> added;  // concept keys closure had to add
};

struct Corpus {
  std::vector<CorpusRecord> records;
  std::vector<NormalizationChange> normalized;  // never silent
};

/// JSONL loader: provision_id, doc_id, jurisdiction ("CA"|"US"), split
/// ("F"|"T"), text, gold (concept-id array), optional annotators and
/// gold_by_annotator. Errors carry line numbers; duplicate ids are named.
Corpus load_corpus(const std::string& path);
Corpus parse_corpus(const std::string& content, const std::string& source_name);

std::string corpus_to_jsonl(const Corpus& corpus);
void save_corpus(const Corpus& corpus, const std::string& path);

/// Per-concept counts by column: F, T-Canada, T-US.
struct LabelDistribution {
  std::array<std::array<long, 3>, kConceptCount> counts{};
  std::array<long, 3> totals{};  // records per column

  long f(ConceptId id) const { return counts[static_cast<std::size_t>(id)][0]; }
  long t_ca(ConceptId id) const { return counts[static_cast<std::size_t>(id)][1]; }
  long t_us(ConceptId id) const { return counts[static_cast<std::size_t>(id)][2]; }
};

LabelDistribution distribution(const Corpus& corpus);
std::string render_distribution(const LabelDistribution& dist);

/// Provisions view for the pipeline. Each record becomes its own paragraph,
/// so backends classify corpus provisions one at a time.
std::vector<Provision> corpus_provisions(const Corpus& corpus);
std::map<std::string, LabelSet> corpus_gold(const Corpus& corpus);

struct AnnotationBatches {
  std::vector<std::string> shared;                     // seen by every annotator
  std::vector<std::vector<std::string>> per_annotator; // distinct block + shared
};

/// Splits ids into k batches with a common shared block for reliability
/// checks: the shared size is ceil(overlap*n/k), bumped so the distinct rest
/// divides evenly; each annotator sees (n-shared)/k + shared items.
/// Deterministic for a given seed.
AnnotationBatches make_annotation_batches(std::vector<std::string> ids, int annotators,
                                          double overlap_fraction, unsigned seed);

}  // namespace provclass
