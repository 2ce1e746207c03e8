#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "provclass/errors.hpp"
#include "provclass/evalstat.hpp"

using namespace provclass;

namespace {

// ---- independent oracles -------------------------------------------------

// Brute-force pairwise count, written directly from the definition.
double oracle_a12(const std::vector<double>& a, const std::vector<double>& b) {
  double wins = 0;
  for (double x : a) {
    for (double y : b) {
      if (x > y) wins += 1.0;
      if (x == y) wins += 0.5;
    }
  }
  return wins / (static_cast<double>(a.size()) * static_cast<double>(b.size()));
}

// Exact two-sided rank-sum p by enumerating index subsets of the pooled
// sample (values, not ranks) and counting pairwise wins per assignment.
double oracle_exact_p(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> pooled(a);
  pooled.insert(pooled.end(), b.begin(), b.end());
  const std::size_t n = pooled.size();
  const std::size_t n1 = a.size();

  auto u_of = [&](const std::vector<std::size_t>& left) {
    std::vector<bool> in_left(n, false);
    for (std::size_t i : left) in_left[i] = true;
    double u = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!in_left[i]) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (in_left[j]) continue;
        if (pooled[i] > pooled[j]) u += 1.0;
        if (pooled[i] == pooled[j]) u += 0.5;
      }
    }
    return u;
  };

  std::vector<std::size_t> observed(n1);
  for (std::size_t i = 0; i < n1; ++i) observed[i] = i;
  const double mu = static_cast<double>(n1) * static_cast<double>(n - n1) / 2.0;
  const double dev = std::abs(u_of(observed) - mu);

  long long matched = 0, total = 0;
  std::vector<std::size_t> pick;
  auto recurse = [&](auto&& self, std::size_t next) -> void {
    if (pick.size() == n1) {
      if (std::abs(u_of(pick) - mu) >= dev - 1e-9) ++matched;
      ++total;
      return;
    }
    if (next >= n) return;
    pick.push_back(next);
    self(self, next + 1);
    pick.pop_back();
    if (n - next - 1 >= n1 - pick.size()) self(self, next + 1);
  };
  recurse(recurse, 0);
  return static_cast<double>(matched) / static_cast<double>(total);
}

// Direct evaluation of the kappa formula.
double oracle_kappa(const std::vector<bool>& a, const std::vector<bool>& b) {
  const double n = static_cast<double>(a.size());
  double agree = 0, pa = 0, pb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    agree += a[i] == b[i] ? 1 : 0;
    pa += a[i] ? 1 : 0;
    pb += b[i] ? 1 : 0;
  }
  pa /= n;
  pb /= n;
  const double po = agree / n;
  const double pe = pa * pb + (1 - pa) * (1 - pb);
  return (po - pe) / (1 - pe);
}

std::vector<double> tie_free_sample(std::mt19937& gen, std::size_t n,
                                    std::vector<double>& pool_seen) {
  std::uniform_real_distribution<double> dist(0.0, 100.0);
  std::vector<double> out;
  while (out.size() < n) {
    const double v = dist(gen);
    if (std::find(pool_seen.begin(), pool_seen.end(), v) == pool_seen.end()) {
      out.push_back(v);
      pool_seen.push_back(v);
    }
  }
  return out;
}

std::map<std::string, LabelSet> label_map(
    const std::vector<std::pair<std::string, LabelSet>>& entries) {
  return {entries.begin(), entries.end()};
}

}  // namespace

TEST_SUITE("evalstat") {

TEST_CASE("confusion: hand-counted fixture") {
  // gold positives {p1, p2}; predicted positives {p1, p3, p4}; p5 and p6
  // are plain negatives. Hand count: tp=1 (p1), fp=2 (p3, p4), fn=1 (p2),
  // tn=2 (p5, p6).
  const auto gold = label_map({{"p1", {ConceptId::Mass}},
                               {"p2", {ConceptId::Mass}},
                               {"p3", {}},
                               {"p4", {}},
                               {"p5", {}},
                               {"p6", {}}});
  const auto predicted = label_map({{"p1", {ConceptId::Mass}},
                                    {"p2", {}},
                                    {"p3", {ConceptId::Mass}},
                                    {"p4", {ConceptId::Mass}},
                                    {"p5", {}},
                                    {"p6", {}}});
  const ConfusionCounts c = confusion(predicted, gold, ConceptId::Mass);
  CHECK(c.tp == 1);
  CHECK(c.fp == 2);
  CHECK(c.tn == 2);
  CHECK(c.fn == 1);
  CHECK(c.total() == 6);

  const PrfResult prf = precision_recall_f1(c);
  CHECK(*prf.precision == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(*prf.recall == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(*prf.f1 == doctest::Approx(0.4).epsilon(1e-12));
}

TEST_CASE("confusion: degenerate cases") {
  const auto gold = label_map({{"p1", {ConceptId::Mass}},
                               {"p2", {ConceptId::Mass}},
                               {"p3", {}},
                               {"p4", {}},
                               {"p5", {}}});
  SUBCASE("predicted equals gold") {
    const ConfusionCounts c = confusion(gold, gold, ConceptId::Mass);
    CHECK(c.fp == 0);
    CHECK(c.fn == 0);
  }
  SUBCASE("nothing predicted") {
    const auto empty = label_map({{"p1", {}}, {"p2", {}}, {"p3", {}}, {"p4", {}}, {"p5", {}}});
    const ConfusionCounts c = confusion(empty, gold, ConceptId::Mass);
    CHECK(c.tp == 0);
    CHECK(c.fp == 0);
    CHECK(c.tn == 3);
    CHECK(c.fn == 2);
  }
  SUBCASE("id mismatch is a validation error") {
    auto other = gold;
    other.erase("p5");
    other["p6"] = LabelSet{};
    CHECK_THROWS_AS(confusion(other, gold, ConceptId::Mass), ValidationError);
  }
}

TEST_CASE("precision/recall undefined conventions") {
  ConfusionCounts c;
  c.tp = 0;
  c.fp = 0;
  c.fn = 2;
  c.tn = 3;
  const PrfResult prf = precision_recall_f1(c);
  CHECK(!prf.precision.has_value());
  CHECK(*prf.recall == 0.0);
  CHECK(!prf.f1.has_value());

  ConfusionCounts perfect;
  perfect.tp = 7;
  const PrfResult p = precision_recall_f1(perfect);
  CHECK(*p.precision == 1.0);
  CHECK(*p.recall == 1.0);
  CHECK(*p.f1 == 1.0);

  ConfusionCounts zero;  // tp=0 with both denominators non-zero
  zero.fp = 1;
  zero.fn = 1;
  zero.tn = 1;
  const PrfResult z = precision_recall_f1(zero);
  CHECK(*z.precision == 0.0);
  CHECK(*z.recall == 0.0);
  CHECK(*z.f1 == 0.0);
}

TEST_CASE("harmonic-mean bound: min(p,r) <= f1 <= max(p,r)") {
  std::mt19937 gen(7);
  std::uniform_int_distribution<long> count(0, 30);
  for (int trial = 0; trial < 200; ++trial) {
    ConfusionCounts c;
    c.tp = count(gen);
    c.fp = count(gen);
    c.fn = count(gen);
    c.tn = count(gen);
    const PrfResult prf = precision_recall_f1(c);
    if (prf.precision && prf.recall) {
      CHECK(*prf.precision >= 0.0);
      CHECK(*prf.precision <= 1.0);
      CHECK(*prf.recall >= 0.0);
      CHECK(*prf.recall <= 1.0);
      REQUIRE(prf.f1.has_value());
      CHECK(*prf.f1 >= std::min(*prf.precision, *prf.recall) - 1e-12);
      CHECK(*prf.f1 <= std::max(*prf.precision, *prf.recall) + 1e-12);
    }
  }
}

TEST_CASE("cohen_kappa: stated examples") {
  CHECK(cohen_kappa({true, false, true, false}, {true, false, true, false}) == 1.0);
  CHECK(cohen_kappa({true, true, true}, {false, false, false}) == 0.0);

  // 20 items, 19 agreements, 5 vs 4 positives -> direct-formula oracle.
  std::vector<bool> a(20, false), b(20, false);
  for (int i = 0; i < 5; ++i) a[i] = true;
  for (int i = 0; i < 4; ++i) b[i] = true;
  const double expected = oracle_kappa(a, b);
  CHECK(expected == doctest::Approx(6.0 / 7.0).epsilon(1e-12));
  CHECK(cohen_kappa(a, b) == doctest::Approx(expected).epsilon(1e-12));

  CHECK(cohen_kappa({true, true}, {true, true}) == 1.0);  // degenerate p_e = 1
  CHECK_THROWS_AS(cohen_kappa({true}, {true, false}), ValidationError);
  CHECK_THROWS_AS(cohen_kappa({}, {}), ValidationError);
}

TEST_CASE("cohen_kappa stays within [-1, 1] and matches the formula") {
  std::mt19937 gen(11);
  std::uniform_int_distribution<int> coin(0, 1);
  std::uniform_int_distribution<int> len(1, 40);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = len(gen);
    std::vector<bool> a(n), b(n);
    for (int i = 0; i < n; ++i) {
      a[i] = coin(gen) == 1;
      b[i] = coin(gen) == 1;
    }
    const double k = cohen_kappa(a, b);
    CHECK(k >= -1.0 - 1e-12);
    CHECK(k <= 1.0 + 1e-12);
    double pa = 0, pb = 0;
    for (int i = 0; i < n; ++i) {
      pa += a[i];
      pb += b[i];
    }
    const double pe = (pa / n) * (pb / n) + (1 - pa / n) * (1 - pb / n);
    if (std::abs(1 - pe) > 1e-9) {
      CHECK(k == doctest::Approx(oracle_kappa(a, b)).epsilon(1e-12));
    }
  }
}

TEST_CASE("wilcoxon: stated examples") {
  SUBCASE("disjoint small samples, exact path") {
    const WilcoxonResult r = wilcoxon_rank_sum({1, 2, 3}, {4, 5, 6});
    CHECK(r.exact);
    CHECK(r.u == 0.0);
    CHECK(r.p_value == doctest::Approx(0.1).epsilon(1e-12));
  }
  SUBCASE("all-tied degenerate samples") {
    const WilcoxonResult r = wilcoxon_rank_sum({2, 2, 2}, {2, 2, 2});
    CHECK(r.p_value == 1.0);
  }
  SUBCASE("empty sample is a validation error") {
    CHECK_THROWS_AS(wilcoxon_rank_sum({}, {1.0}), ValidationError);
  }
}

TEST_CASE("wilcoxon exact path matches enumeration oracle for n1+n2 <= 10") {
  std::mt19937 gen(23);
  for (std::size_t n1 = 1; n1 <= 9; ++n1) {
    for (std::size_t n2 = 1; n1 + n2 <= 10; ++n2) {
      for (int rep = 0; rep < 4; ++rep) {
        std::vector<double> seen;
        const std::vector<double> a = tie_free_sample(gen, n1, seen);
        const std::vector<double> b = tie_free_sample(gen, n2, seen);
        const WilcoxonResult r = wilcoxon_rank_sum(a, b);
        REQUIRE(r.exact);
        CHECK(r.p_value == doctest::Approx(oracle_exact_p(a, b)).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("wilcoxon approximation tracks the exact path on n1=n2=6") {
  std::mt19937 gen(29);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<double> seen;
    const std::vector<double> a = tie_free_sample(gen, 6, seen);
    const std::vector<double> b = tie_free_sample(gen, 6, seen);
    const double exact = wilcoxon_exact_p(a, b);
    const double approx = wilcoxon_approx_p(a, b);
    CHECK(std::abs(exact - approx) <= 0.02);
  }
}

TEST_CASE("wilcoxon invariances") {
  std::mt19937 gen(31);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<double> a(8), b(5);
    for (double& v : a) v = dist(gen);
    for (double& v : b) v = dist(gen);

    const WilcoxonResult ab = wilcoxon_rank_sum(a, b);
    const WilcoxonResult ba = wilcoxon_rank_sum(b, a);
    CHECK(ab.p_value == doctest::Approx(ba.p_value).epsilon(1e-12));  // two-sided symmetry

    // Strictly monotone transform of the pooled values changes nothing.
    auto transform = [](double v) { return std::exp(3.0 * v) + 1.0; };
    std::vector<double> ta(a.size()), tb(b.size());
    std::transform(a.begin(), a.end(), ta.begin(), transform);
    std::transform(b.begin(), b.end(), tb.begin(), transform);
    const WilcoxonResult tr = wilcoxon_rank_sum(ta, tb);
    CHECK(tr.p_value == doctest::Approx(ab.p_value).epsilon(1e-9));
    CHECK(tr.u == doctest::Approx(ab.u).epsilon(1e-12));
  }
}

TEST_CASE("a12: stated examples") {
  const A12Result same = vargha_delaney_a12({1, 2, 3}, {1, 2, 3});
  CHECK(same.a12 == 0.5);
  CHECK(same.band == EffectBand::Negligible);

  const A12Result dominated = vargha_delaney_a12({1, 2, 3}, {4, 5, 6});
  CHECK(dominated.a12 == 0.0);
  CHECK(dominated.band == EffectBand::Large);

  const A12Result ties = vargha_delaney_a12({1, 2}, {1, 2});
  CHECK(ties.a12 == 0.5);

  CHECK_THROWS_AS(vargha_delaney_a12({}, {1.0}), ValidationError);
}

TEST_CASE("a12 equals the brute-force oracle and is antisymmetric") {
  std::mt19937 gen(37);
  std::uniform_int_distribution<int> len(1, 12);
  std::uniform_int_distribution<int> value(0, 5);  // small range forces ties
  for (int rep = 0; rep < 1000; ++rep) {
    std::vector<double> a(len(gen)), b(len(gen));
    for (double& v : a) v = value(gen);
    for (double& v : b) v = value(gen);
    const double ab = vargha_delaney_a12(a, b).a12;
    const double ba = vargha_delaney_a12(b, a).a12;
    CHECK(ab == doctest::Approx(oracle_a12(a, b)).epsilon(1e-12));
    CHECK(ab + ba == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("a12 band thresholds") {
  auto band_of = [](double a12) {
    std::vector<double> b{0.0};
    // Construct samples with the requested a12 by mixing wins and losses.
    const int total = 1000;
    const int wins = static_cast<int>(a12 * total);
    std::vector<double> a;
    for (int i = 0; i < wins; ++i) a.push_back(1.0);
    for (int i = wins; i < total; ++i) a.push_back(-1.0);
    return vargha_delaney_a12(a, b).band;
  };
  // interior points of each band; exact thresholds are float-hostile
  CHECK(band_of(0.50) == EffectBand::Negligible);
  CHECK(band_of(0.554) == EffectBand::Negligible);
  CHECK(band_of(0.566) == EffectBand::Small);
  CHECK(band_of(0.634) == EffectBand::Small);
  CHECK(band_of(0.646) == EffectBand::Medium);
  CHECK(band_of(0.704) == EffectBand::Medium);
  CHECK(band_of(0.716) == EffectBand::Large);
  CHECK(band_of(1.0) == EffectBand::Large);
  CHECK(band_of(0.0) == EffectBand::Large);  // direction-symmetric
}

TEST_CASE("summarize_runs: stated examples") {
  const BoxplotSummary flat = summarize_runs({0.5, 0.5, 0.5});
  CHECK(flat.min == 0.5);
  CHECK(flat.q1 == 0.5);
  CHECK(flat.median == 0.5);
  CHECK(flat.q3 == 0.5);
  CHECK(flat.max == 0.5);
  CHECK(flat.mean == 0.5);
  CHECK(flat.sd == 0.0);

  const BoxplotSummary four = summarize_runs({1, 2, 3, 4});
  CHECK(four.q1 == doctest::Approx(1.75).epsilon(1e-12));
  CHECK(four.median == doctest::Approx(2.5).epsilon(1e-12));
  CHECK(four.q3 == doctest::Approx(3.25).epsilon(1e-12));

  const BoxplotSummary single = summarize_runs({0.25});
  CHECK(single.min == 0.25);
  CHECK(single.q1 == 0.25);
  CHECK(single.median == 0.25);
  CHECK(single.q3 == 0.25);
  CHECK(single.max == 0.25);
  CHECK(single.mean == 0.25);
  CHECK(single.sd == 0.0);

  CHECK_THROWS_AS(summarize_runs({}), ValidationError);
}

TEST_CASE("compare_models over synthetic run sets") {
  auto runs_with = [](double precision_value, double recall_value, int n) {
    std::vector<RunMetrics> runs;
    for (int i = 0; i < n; ++i) {
      RunMetrics run;
      run.run_index = i;
      for (const Concept& c : registry()) {
        PrfResult prf;
        prf.precision = precision_value;
        prf.recall = recall_value;
        run.metrics[c.id] = prf;
      }
      runs.push_back(std::move(run));
    }
    return runs;
  };

  SUBCASE("identical run sets: no effect, not significant") {
    const auto runs = runs_with(0.8, 0.9, 20);
    const auto reports =
        compare_models(runs, runs, Metric::Recall, {ConceptId::Overall, ConceptId::Mass});
    REQUIRE(reports.size() == 2);
    for (const ComparisonReport& r : reports) {
      CHECK(r.valid);
      CHECK(r.p_value == 1.0);
      CHECK(r.a12 == 0.5);
      CHECK(!r.significant);
      CHECK(r.direction == "none");
    }
  }

  SUBCASE("strict dominance with n=20: large significant effect") {
    const auto high = runs_with(0.9, 0.95, 20);
    const auto low = runs_with(0.6, 0.55, 20);
    const auto reports = compare_models(high, low, Metric::Recall, {ConceptId::Overall});
    REQUIRE(reports.size() == 1);
    CHECK(reports[0].a12 == 1.0);
    CHECK(reports[0].band == EffectBand::Large);
    CHECK(reports[0].significant);
    CHECK(reports[0].direction == "A");
  }

  SUBCASE("undefined values are excluded and counted") {
    auto runs_a = runs_with(0.9, 0.9, 20);
    runs_a[3].metrics[ConceptId::Overall].recall.reset();
    const auto runs_b = runs_with(0.8, 0.8, 20);
    const auto reports = compare_models(runs_a, runs_b, Metric::Recall, {ConceptId::Overall});
    CHECK(reports[0].samples_a.size() == 19);
    CHECK(reports[0].undefined_a == 1);
  }

  SUBCASE("runs missing a requested concept are a validation error") {
    auto broken = runs_with(0.9, 0.9, 3);
    for (RunMetrics& run : broken) run.metrics.erase(ConceptId::Firmness);
    const auto other = runs_with(0.8, 0.8, 3);
    CHECK_THROWS_AS(compare_models(broken, other, Metric::Recall, {ConceptId::Firmness}),
                    ValidationError);
  }

  SUBCASE("fewer than two runs per side is a validation error") {
    const auto one = runs_with(0.9, 0.9, 1);
    const auto many = runs_with(0.8, 0.8, 20);
    CHECK_THROWS_AS(compare_models(one, many, Metric::Recall, {ConceptId::Overall}),
                    ValidationError);
  }
}

TEST_CASE("agreement between pairwise U and the rank-sum view") {
  // u / (n1*n2) must equal a12 by construction.
  std::mt19937 gen(41);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  std::vector<double> a(20), b(20);
  for (double& v : a) v = dist(gen);
  for (double& v : b) v = dist(gen);
  const WilcoxonResult w = wilcoxon_rank_sum(a, b);
  const A12Result e = vargha_delaney_a12(a, b);
  CHECK(w.u / 400.0 == doctest::Approx(e.a12).epsilon(1e-12));
}

}  // TEST_SUITE
