#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "provclass/taxonomy.hpp"

namespace provclass {

struct ConfusionCounts {
  ConceptId concept_id = ConceptId::Overall;
  long tp = 0;
  long fp = 0;
  long tn = 0;
  long fn = 0;

  long total() const { return tp + fp + tn + fn; }
  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

/// Precision/recall/f1 with the explicit undefined convention: a zero
/// denominator yields nullopt (excluded from averaging, counted separately);
/// f1 is undefined whenever either component is.
struct PrfResult {
  std::optional<double> precision;
  std::optional<double> recall;
  std::optional<double> f1;
};

/// Counts "concept in the label set" as the positive class. Throws
/// ValidationError when the two maps do not cover identical provision ids.
ConfusionCounts confusion(const std::map<std::string, LabelSet>& predictions,
                          const std::map<std::string, LabelSet>& gold, ConceptId concept_id);

PrfResult precision_recall_f1(const ConfusionCounts& counts);

/// Cohen's kappa over two boolean annotation vectors of equal length >= 1.
/// Degenerate chance agreement (p_e == 1, both raters constant and equal) is
/// defined as 1.
double cohen_kappa(const std::vector<bool>& a, const std::vector<bool>& b);

struct WilcoxonResult {
  double u = 0.0;  // U statistic of the first sample (ties counted half)
  double p_value = 1.0;
  bool exact = false;
};

/// Two-sided Wilcoxon rank-sum (Mann-Whitney U). Exact enumeration when
/// n1+n2 <= 12 and tie-free; otherwise normal approximation with tie and
/// continuity corrections. All-tied samples yield p = 1.
WilcoxonResult wilcoxon_rank_sum(const std::vector<double>& a, const std::vector<double>& b);

/// The two p-value routes, exposed so tests can cross-check them.
double wilcoxon_exact_p(const std::vector<double>& a, const std::vector<double>& b);
double wilcoxon_approx_p(const std::vector<double>& a, const std::vector<double>& b);

enum class EffectBand { Negligible, Small, Medium, Large };
std::string_view to_string(EffectBand band);  // "N", "S", "M", "L"

struct A12Result {
  double a12 = 0.5;
  EffectBand band = EffectBand::Negligible;
};

/// Probability that a random draw from `a` beats one from `b`; ties count
/// half. Bands follow the scaled thresholds 0.06/0.14/0.21 on |a12 - 0.5|.
A12Result vargha_delaney_a12(const std::vector<double>& a, const std::vector<double>& b);

struct BoxplotSummary {
  double min = 0, q1 = 0, median = 0, q3 = 0, max = 0;
  double mean = 0, sd = 0;
};

/// Quartiles by linear interpolation; sd is the sample standard deviation
/// (n-1), zero for a single value.
BoxplotSummary summarize_runs(const std::vector<double>& values);

enum class Metric { Precision, Recall };
Metric parse_metric(std::string_view text);
std::string_view to_string(Metric metric);

/// Per-concept accuracy of one stochastic run.
struct RunMetrics {
  int run_index = 0;
  std::map<ConceptId, ConfusionCounts> counts;
  std::map<ConceptId, PrfResult> metrics;
};

RunMetrics compute_run_metrics(const std::map<std::string, LabelSet>& predictions,
                               const std::map<std::string, LabelSet>& gold, int run_index);

struct ComparisonReport {
  Metric metric = Metric::Precision;
  ConceptId concept_id = ConceptId::Overall;
  std::vector<double> samples_a;  // one defined value per run
  std::vector<double> samples_b;
  int undefined_a = 0;  // runs excluded for undefined metric values
  int undefined_b = 0;
  double p_value = 1.0;
  double a12 = 0.5;
  EffectBand band = EffectBand::Negligible;
  std::string direction;  // "A", "B" or "none"
  bool significant = false;
  bool valid = false;  // false when either side has no defined values
};

/// Pairwise model comparison over repeated runs; significance at p < 0.05,
/// no multiple-comparison correction.
std::vector<ComparisonReport> compare_models(const std::vector<RunMetrics>& runs_a,
                                             const std::vector<RunMetrics>& runs_b, Metric metric,
                                             const std::vector<ConceptId>& concepts);

}  // namespace provclass
