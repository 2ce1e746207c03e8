#include "provclass/evalstat.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "provclass/errors.hpp"

namespace provclass {
namespace {

constexpr double kEps = 1e-9;

double pairwise_u(const std::vector<double>& a, const std::vector<double>& b) {
  double u = 0.0;
  for (double x : a) {
    for (double y : b) {
      if (x > y) {
        u += 1.0;
      } else if (x == y) {
        u += 0.5;
      }
    }
  }
  return u;
}

bool has_ties(std::vector<double> pooled) {
  std::sort(pooled.begin(), pooled.end());
  return std::adjacent_find(pooled.begin(), pooled.end()) != pooled.end();
}

// Sum of (t^3 - t) over tie groups of the pooled sample.
double tie_term(std::vector<double> pooled) {
  std::sort(pooled.begin(), pooled.end());
  double total = 0.0;
  std::size_t i = 0;
  while (i < pooled.size()) {
    std::size_t j = i;
    while (j < pooled.size() && pooled[j] == pooled[i]) ++j;
    const double t = static_cast<double>(j - i);
    total += t * t * t - t;
    i = j;
  }
  return total;
}

void require_non_empty(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.empty() || b.empty()) throw ValidationError("samples must be non-empty");
}

}  // namespace

ConfusionCounts confusion(const std::map<std::string, LabelSet>& predictions,
                          const std::map<std::string, LabelSet>& gold, ConceptId concept_id) {
  if (predictions.size() != gold.size()) {
    throw ValidationError("predictions and gold cover different provision sets");
  }
  ConfusionCounts counts;
  counts.concept_id = concept_id;
  for (const auto& [id, predicted] : predictions) {
    auto it = gold.find(id);
    if (it == gold.end()) {
      throw ValidationError("provision \"" + id + "\" present in predictions but not in gold");
    }
    const bool predicted_positive = predicted.contains(concept_id);
    const bool gold_positive = it->second.contains(concept_id);
    if (predicted_positive && gold_positive) {
      ++counts.tp;
    } else if (predicted_positive) {
      ++counts.fp;
    } else if (gold_positive) {
      ++counts.fn;
    } else {
      ++counts.tn;
    }
  }
  return counts;
}

PrfResult precision_recall_f1(const ConfusionCounts& counts) {
  PrfResult out;
  if (counts.tp + counts.fp > 0) {
    out.precision = static_cast<double>(counts.tp) / static_cast<double>(counts.tp + counts.fp);
  }
  if (counts.tp + counts.fn > 0) {
    out.recall = static_cast<double>(counts.tp) / static_cast<double>(counts.tp + counts.fn);
  }
  if (out.precision && out.recall) {
    const double p = *out.precision;
    const double r = *out.recall;
    out.f1 = (p + r) > 0 ? 2.0 * p * r / (p + r) : 0.0;
  }
  return out;
}

double cohen_kappa(const std::vector<bool>& a, const std::vector<bool>& b) {
  if (a.size() != b.size()) throw ValidationError("annotation vectors differ in length");
  if (a.empty()) throw ValidationError("annotation vectors must be non-empty");
  const double n = static_cast<double>(a.size());
  double agree = 0, a_true = 0, b_true = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == b[i]) ++agree;
    if (a[i]) ++a_true;
    if (b[i]) ++b_true;
  }
  const double po = agree / n;
  const double pa = a_true / n;
  const double pb = b_true / n;
  const double pe = pa * pb + (1.0 - pa) * (1.0 - pb);
  if (std::abs(1.0 - pe) < kEps) return 1.0;  // both raters constant and identical
  return (po - pe) / (1.0 - pe);
}

double wilcoxon_exact_p(const std::vector<double>& a, const std::vector<double>& b) {
  require_non_empty(a, b);
  const std::size_t n1 = a.size();
  const std::size_t n = n1 + b.size();
  if (n > 20) throw ValidationError("exact enumeration limited to small samples");
  std::vector<double> pooled(a);
  pooled.insert(pooled.end(), b.begin(), b.end());
  if (has_ties(pooled)) throw ValidationError("exact enumeration requires tie-free samples");

  const double u_obs = pairwise_u(a, b);
  const double mu = static_cast<double>(n1) * static_cast<double>(b.size()) / 2.0;
  const double dev = std::abs(u_obs - mu);

  // Walk every assignment of n1 ranks out of 1..n.
  std::vector<int> combo(n1);
  std::iota(combo.begin(), combo.end(), 1);
  long long matched = 0, total = 0;
  const long long min_rank_sum = static_cast<long long>(n1) * (n1 + 1) / 2;
  while (true) {
    const long long rank_sum = std::accumulate(combo.begin(), combo.end(), 0LL);
    const double u = static_cast<double>(rank_sum - min_rank_sum);
    if (std::abs(u - mu) >= dev - kEps) ++matched;
    ++total;

    int i = static_cast<int>(n1) - 1;
    while (i >= 0 && combo[i] == static_cast<int>(n - n1 + 1 + i)) --i;
    if (i < 0) break;
    ++combo[i];
    for (std::size_t j = i + 1; j < n1; ++j) combo[j] = combo[j - 1] + 1;
  }
  return static_cast<double>(matched) / static_cast<double>(total);
}

double wilcoxon_approx_p(const std::vector<double>& a, const std::vector<double>& b) {
  require_non_empty(a, b);
  const double n1 = static_cast<double>(a.size());
  const double n2 = static_cast<double>(b.size());
  const double n = n1 + n2;
  std::vector<double> pooled(a);
  pooled.insert(pooled.end(), b.begin(), b.end());

  const double u = pairwise_u(a, b);
  const double mu = n1 * n2 / 2.0;
  double sigma2 = n1 * n2 / 12.0 * ((n + 1.0) - tie_term(pooled) / (n * (n - 1.0)));
  if (sigma2 <= kEps) return 1.0;  // everything tied
  double z = (std::abs(u - mu) - 0.5) / std::sqrt(sigma2);
  if (z < 0.0) z = 0.0;
  const double p = std::erfc(z / std::sqrt(2.0));
  return std::min(1.0, std::max(0.0, p));
}

WilcoxonResult wilcoxon_rank_sum(const std::vector<double>& a, const std::vector<double>& b) {
  require_non_empty(a, b);
  WilcoxonResult result;
  result.u = pairwise_u(a, b);
  std::vector<double> pooled(a);
  pooled.insert(pooled.end(), b.begin(), b.end());
  if (pooled.size() <= 12 && !has_ties(pooled)) {
    result.exact = true;
    result.p_value = wilcoxon_exact_p(a, b);
  } else {
    result.exact = false;
    result.p_value = wilcoxon_approx_p(a, b);
  }
  return result;
}

std::string_view to_string(EffectBand band) {
  switch (band) {
    case EffectBand::Negligible:
      return "N";
    case EffectBand::Small:
      return "S";
    case EffectBand::Medium:
      return "M";
    case EffectBand::Large:
      return "L";
  }
  return "";
}

A12Result vargha_delaney_a12(const std::vector<double>& a, const std::vector<double>& b) {
  require_non_empty(a, b);
  A12Result result;
  result.a12 = pairwise_u(a, b) / (static_cast<double>(a.size()) * static_cast<double>(b.size()));
  const double d = std::abs(result.a12 - 0.5);
  if (d < 0.06) {
    result.band = EffectBand::Negligible;
  } else if (d < 0.14) {
    result.band = EffectBand::Small;
  } else if (d < 0.21) {
    result.band = EffectBand::Medium;
  } else {
    result.band = EffectBand::Large;
  }
  return result;
}

BoxplotSummary summarize_runs(const std::vector<double>& values) {
  if (values.empty()) throw ValidationError("summarize_runs requires at least one value");
  std::vector<double> sorted(values);
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();

  auto quantile = [&](double p) {
    const double h = static_cast<double>(n - 1) * p;
    const std::size_t lo = static_cast<std::size_t>(h);
    const double frac = h - static_cast<double>(lo);
    if (lo + 1 >= n) return sorted[n - 1];
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
  };

  BoxplotSummary s;
  s.min = sorted.front();
  s.q1 = quantile(0.25);
  s.median = quantile(0.5);
  s.q3 = quantile(0.75);
  s.max = sorted.back();
  s.mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / static_cast<double>(n);
  if (n > 1) {
    double ss = 0.0;
    for (double v : sorted) ss += (v - s.mean) * (v - s.mean);
    s.sd = std::sqrt(ss / static_cast<double>(n - 1));
  }
  return s;
}

Metric parse_metric(std::string_view text) {
  if (text == "precision") return Metric::Precision;
  if (text == "recall") return Metric::Recall;
  throw ValidationError("unknown metric: \"" + std::string(text) +
                        "\" (expected precision or recall)");
}

std::string_view to_string(Metric metric) {
  return metric == Metric::Precision ? "precision" : "recall";
}

RunMetrics compute_run_metrics(const std::map<std::string, LabelSet>& predictions,
                               const std::map<std::string, LabelSet>& gold, int run_index) {
  RunMetrics run;
  run.run_index = run_index;
  for (const Concept& c : registry()) {
    ConfusionCounts counts = confusion(predictions, gold, c.id);
    run.metrics[c.id] = precision_recall_f1(counts);
    run.counts[c.id] = counts;
  }
  return run;
}

std::vector<ComparisonReport> compare_models(const std::vector<RunMetrics>& runs_a,
                                             const std::vector<RunMetrics>& runs_b, Metric metric,
                                             const std::vector<ConceptId>& concepts) {
  if (runs_a.size() < 2 || runs_b.size() < 2) {
    throw ValidationError("compare_models requires at least two runs per side");
  }
  auto collect = [&](const std::vector<RunMetrics>& runs, ConceptId concept_id, int& undefined) {
    std::vector<double> values;
    for (const RunMetrics& run : runs) {
      auto it = run.metrics.find(concept_id);
      if (it == run.metrics.end()) {
        throw ValidationError("run is missing concept \"" + std::string(concept_key(concept_id)) +
                              "\"");
      }
      const auto& value =
          metric == Metric::Precision ? it->second.precision : it->second.recall;
      if (value) {
        values.push_back(*value);
      } else {
        ++undefined;
      }
    }
    return values;
  };

  std::vector<ComparisonReport> reports;
  for (ConceptId concept_id : concepts) {
    ComparisonReport report;
    report.metric = metric;
    report.concept_id = concept_id;
    report.samples_a = collect(runs_a, concept_id, report.undefined_a);
    report.samples_b = collect(runs_b, concept_id, report.undefined_b);
    if (report.samples_a.empty() || report.samples_b.empty()) {
      report.valid = false;
      reports.push_back(std::move(report));
      continue;
    }
    const WilcoxonResult w = wilcoxon_rank_sum(report.samples_a, report.samples_b);
    const A12Result effect = vargha_delaney_a12(report.samples_a, report.samples_b);
    report.p_value = w.p_value;
    report.a12 = effect.a12;
    report.band = effect.band;
    report.direction = effect.a12 > 0.5 ? "A" : (effect.a12 < 0.5 ? "B" : "none");
    report.significant = w.p_value < 0.05;
    report.valid = true;
    reports.push_back(std::move(report));
  }
  return reports;
}

}  // namespace provclass
