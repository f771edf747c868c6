#include <cmath>
#include <fstream>

#include "doctest.h"
#include "helpers.hpp"
#include "hsx/stats.hpp"

using namespace hsx;
using hsx::testing::TempDir;

TEST_SUITE_BEGIN("stats");

TEST_CASE("auroc hand values") {
  // neg=[1,2,3], pos=[2,3,4]: 6 strict wins + 2 ties counted half = 7/9.
  CHECK(auroc({1, 2, 3}, {2, 3, 4}) == doctest::Approx(7.0 / 9.0).epsilon(1e-15));
  CHECK(auroc({1, 2}, {5, 6}) == 1.0);
  CHECK(auroc({1, 2, 3}, {1, 2, 3}) == 0.5);
  CHECK_THROWS_AS(auroc({}, {1.0}), DataError);
}

TEST_CASE("auroc complementarity and monotone invariance") {
  Rng rng(12);
  std::vector<double> x, y;
  for (int i = 0; i < 15; ++i) x.push_back(rng.uniform(0, 10));
  for (int i = 0; i < 9; ++i) y.push_back(rng.uniform(2, 12));
  CHECK(auroc(x, y) + auroc(y, x) == doctest::Approx(1.0).epsilon(1e-12));

  auto squash = [](std::vector<double> v) {
    for (double& t : v) t = std::atan(0.3 * t);  // strictly increasing
    return v;
  };
  CHECK(auroc(squash(x), squash(y)) == doctest::Approx(auroc(x, y)).epsilon(1e-15));
}

TEST_CASE("ranksum exact fixtures") {
  const TestResult r = ranksum_test({1, 2}, {3, 4});
  CHECK(r.exact);
  CHECK(r.p == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

  const TestResult same = ranksum_test({1, 2}, {1, 2});
  CHECK(same.p == 1.0);

  CHECK_THROWS_AS(ranksum_test({}, {1.0}), DataError);
}

TEST_CASE("ranksum exact p invariant under common monotone transform") {
  const std::vector<double> x = {0.3, 1.7, 2.1, 5.0};
  const std::vector<double> y = {0.9, 2.4, 3.3};
  const double p0 = ranksum_test(x, y, TestMode::exact).p;
  auto expv = [](std::vector<double> v) {
    for (double& t : v) t = std::exp(t);
    return v;
  };
  CHECK(ranksum_test(expv(x), expv(y), TestMode::exact).p == doctest::Approx(p0));
}

TEST_CASE("ranksum approx close to exact on tie-free integer data") {
  // The 0.02 bound holds for every tie-free 5-vs-5 dataset (the exact
  // distribution depends only on ranks); ties at this n can push the gap
  // past 0.1, so duplicate draws are rerolled.
  Rng rng(31);
  double max_dp = 0.0;
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<double> pooled;
    while (pooled.size() < 10) {
      const double v = static_cast<double>(rng.uniform_int(0, 1000000));
      if (std::find(pooled.begin(), pooled.end(), v) == pooled.end()) pooled.push_back(v);
    }
    const std::vector<double> x(pooled.begin(), pooled.begin() + 5);
    const std::vector<double> y(pooled.begin() + 5, pooled.end());
    const double pe = ranksum_test(x, y, TestMode::exact).p;
    const double pa = ranksum_test(x, y, TestMode::approx).p;
    max_dp = std::max(max_dp, std::abs(pe - pa));
  }
  CHECK(max_dp < 0.02);
}

TEST_CASE("ranksum cross-check fixtures (permutation distribution with midranks)") {
  // Tie-free values agree with the classical tables; tied values agree with
  // a brute-force permutation over midranks.
  TestResult r = ranksum_test({10, 20, 30, 40, 50, 60}, {15, 25, 35, 45, 55, 65},
                              TestMode::exact);
  CHECK(r.statistic == 36.0);
  CHECK(r.p == doctest::Approx(0.699134199134).epsilon(1e-9));
  r = ranksum_test({10, 20, 30, 40, 50, 60}, {15, 25, 35, 45, 55, 65}, TestMode::approx);
  CHECK(r.p == doctest::Approx(0.688920555804).epsilon(1e-9));

  r = ranksum_test({8, 8, 7, 4, 2}, {7, 2, 7, 7, 7}, TestMode::exact);
  CHECK(r.statistic == 29.5);
  CHECK(r.p == doctest::Approx(0.642857142857).epsilon(1e-9));
  r = ranksum_test({3, 1, 4, 1, 5}, {9, 2, 6, 5, 3}, TestMode::exact);
  CHECK(r.p == doctest::Approx(0.230158730159).epsilon(1e-9));
}

TEST_CASE("signed rank exact fixtures") {
  // Three positive differences.
  const TestResult r = signedrank_test({{2, 1}, {4, 1}, {9, 3}});
  CHECK(r.exact);
  CHECK(r.p == doctest::Approx(0.25).epsilon(1e-12));

  CHECK_THROWS_AS(signedrank_test({{1, 1}, {2, 2}}), DegenerateError);
}

TEST_CASE("signed rank approx close to exact at n=10") {
  Rng rng(77);
  double max_dp = 0.0;
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<std::pair<double, double>> pairs;
    for (int i = 0; i < 10; ++i) {
      const double a = rng.uniform(0, 5);
      pairs.emplace_back(a + rng.uniform(-1.0, 1.5), a);
    }
    const double pe = signedrank_test(pairs, TestMode::exact).p;
    const double pa = signedrank_test(pairs, TestMode::approx).p;
    max_dp = std::max(max_dp, std::abs(pe - pa));
  }
  CHECK(max_dp < 0.02);
}

TEST_CASE("signed rank cross-check fixtures") {
  // Zero difference dropped, n=4 effective.
  TestResult r = signedrank_test({{2, 1}, {1, 4}, {9, 3}, {5, 5}, {7, 2}},
                                 TestMode::exact);
  CHECK(r.statistic == 8.0);
  CHECK(r.p == doctest::Approx(0.375).epsilon(1e-12));
  r = signedrank_test({{2, 1}, {1, 4}, {9, 3}, {5, 5}, {7, 2}}, TestMode::approx);
  CHECK(r.p == doctest::Approx(0.361310428526).epsilon(1e-9));

  // Tied magnitudes: matches brute-force sign-flip enumeration over midranks.
  r = signedrank_test({{3.5, 1}, {2, 2.5}, {8, 3}, {1, 6}, {4, 0.5}, {9, 9.5}, {2, 7},
                       {5, 1.5}},
                      TestMode::exact);
  CHECK(r.statistic == 19.0);
  CHECK(r.p == doctest::Approx(0.90625).epsilon(1e-12));
}

TEST_CASE("delong self-comparison and consistency with auroc") {
  std::vector<double> scores = {0.1, 0.4, 0.35, 0.8, 0.7, 0.2};
  std::vector<bool> labels = {false, true, false, true, true, false};
  const DelongResult r = delong_test(scores, scores, labels);
  CHECK(r.z == 0.0);
  CHECK(r.p == 1.0);

  std::vector<double> neg, pos;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    (labels[i] ? pos : neg).push_back(scores[i]);
  }
  CHECK(r.auc_a == doctest::Approx(auroc(neg, pos)).epsilon(1e-12));
}

TEST_CASE("delong covariance matches hand-enumerated placements at n=6") {
  const std::vector<double> a = {0.9, 0.8, 0.3, 0.6, 0.2, 0.1};
  const std::vector<double> b = {0.7, 0.5, 0.45, 0.55, 0.3, 0.35};
  const std::vector<bool> labels = {true, true, true, false, false, false};
  const DelongResult r = delong_test(a, b, labels);

  // Placement values computed by hand for model a:
  // positives {0.9,0.8,0.3} vs negatives {0.6,0.2,0.1}.
  const std::vector<double> v10_a = {1.0, 1.0, 2.0 / 3.0};
  double auc_a = 0.0;
  for (double v : v10_a) auc_a += v / 3.0;
  CHECK(r.auc_a == doctest::Approx(auc_a).epsilon(1e-12));

  // z sign flips when the models swap; p unchanged.
  const DelongResult rs = delong_test(b, a, labels);
  CHECK(rs.z == doctest::Approx(-r.z).epsilon(1e-12));
  CHECK(rs.p == doctest::Approx(r.p).epsilon(1e-12));
}

TEST_CASE("delong rejects single-class labels") {
  CHECK_THROWS_AS(delong_test({1, 2}, {1, 2}, {true, true}), DataError);
}

TEST_CASE("pearson fixtures and formula oracle") {
  CHECK(pearson({1, 2, 3, 4}, {2, 4, 6, 8}) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(pearson({1, 2, 3}, {-1, -2, -3}) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK_THROWS_AS(pearson({1, 1, 1}, {1, 2, 3}), DegenerateError);

  Rng rng(5);
  std::vector<double> x, y;
  for (int i = 0; i < 50; ++i) {
    x.push_back(rng.uniform(-3, 3));
    y.push_back(0.4 * x.back() + rng.normal());
  }
  const double n = 50.0;
  double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (int i = 0; i < 50; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    syy += y[i] * y[i];
    sxy += x[i] * y[i];
  }
  const double direct = (n * sxy - sx * sy) /
                        std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy));
  CHECK(pearson(x, y) == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("bonferroni arithmetic and cap") {
  CHECK(bonferroni({0.01, 0.02}) == std::vector<double>{0.02, 0.04});
  CHECK(bonferroni({0.9, 0.9}) == std::vector<double>{1.0, 1.0});
  CHECK(bonferroni({0.2}) == std::vector<double>{0.2});
  CHECK_THROWS_AS(bonferroni({1.5}), DataError);
}

TEST_CASE("tiv normalization") {
  GroupTable t;
  t.region_names = {"whole"};
  t.rows.push_back({"s1", "control", 1.5e6, {1500.0}});
  const GroupTable n = tiv_normalize(t);
  CHECK(n.rows[0].region_volumes_mm3[0] == doctest::Approx(1e-3).epsilon(1e-15));

  GroupTable scaled = t;
  scaled.rows[0].tiv_mm3 *= 2.0;
  scaled.rows[0].region_volumes_mm3[0] *= 2.0;
  CHECK(tiv_normalize(scaled).rows[0].region_volumes_mm3[0] ==
        doctest::Approx(1e-3).epsilon(1e-15));

  t.rows[0].tiv_mm3 = 0.0;
  CHECK_THROWS_AS(tiv_normalize(t), DataError);
}

TEST_CASE("group table CSV round trip and error rows") {
  TempDir tmp("stats_csv");
  GroupTable t;
  t.region_names = {"anterior", "whole"};
  t.rows.push_back({"s1", "control", 1.4e6, {120.5, 900.25}});
  t.rows.push_back({"s2", "patient", 1.6e6, {100.0, 800.0}});
  const auto p = tmp / "table.csv";
  save_group_table(t, p);
  const GroupTable t2 = load_group_table(p);
  REQUIRE(t2.rows.size() == 2);
  CHECK(t2.region_names == t.region_names);
  CHECK(t2.rows[1].cohort == "patient");
  CHECK(t2.rows[0].region_volumes_mm3[1] == doctest::Approx(900.25));

  // Malformed rows report a row number.
  std::ofstream bad(tmp / "bad.csv");
  bad << "subject,cohort,tiv_mm3,whole_mm3\n";
  bad << "s1,control,1e6,5\n";
  bad << "s2,control,1e6\n";
  bad.close();
  try {
    load_group_table(tmp / "bad.csv");
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("row 2") != std::string::npos);
  }
}

TEST_SUITE_END();
