#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace hsx {

// AUROC: probability that a random positive-group score exceeds a random
// negative-group score, ties counted half.
double auroc(const std::vector<double>& x_neg, const std::vector<double>& x_pos);

enum class TestMode { exact, approx, automatic };

struct TestResult {
  double statistic = 0.0;  // rank sum W of x (ranksum) or W+ (signed rank)
  double p = 1.0;          // two-sided
  bool exact = false;
};

// Wilcoxon rank-sum (Mann-Whitney). Exact enumeration of the rank-sum
// distribution when |x|+|y| <= 12 in automatic mode; otherwise normal
// approximation with midranks, tie correction and 0.5 continuity correction.
TestResult ranksum_test(const std::vector<double>& x, const std::vector<double>& y,
                        TestMode mode = TestMode::automatic);

// Wilcoxon signed-rank on paired differences; zero differences dropped.
TestResult signedrank_test(const std::vector<std::pair<double, double>>& pairs,
                           TestMode mode = TestMode::automatic);

struct DelongResult {
  double auc_a = 0.0;
  double auc_b = 0.0;
  double z = 0.0;
  double p = 1.0;
};

// DeLong test for two correlated AUROCs computed on the same subjects.
// labels: true class per observation (false = negative, true = positive).
DelongResult delong_test(const std::vector<double>& scores_a,
                         const std::vector<double>& scores_b,
                         const std::vector<bool>& labels);

double pearson(const std::vector<double>& x, const std::vector<double>& y);

// min(1, p*m) per entry.
std::vector<double> bonferroni(const std::vector<double>& pvals);

// Standard normal CDF.
double normal_cdf(double x);

// Per-subject cohort rows for group statistics.
struct GroupRow {
  std::string subject;
  std::string cohort;  // "control" or "patient"
  double tiv_mm3 = 0.0;
  std::vector<double> region_volumes_mm3;
};

struct GroupTable {
  std::vector<std::string> region_names;  // column order
  std::vector<GroupRow> rows;
};

// Divides every region volume by the row's TIV. Nonpositive TIV -> DataError.
GroupTable tiv_normalize(const GroupTable& table);

// CSV schema: subject,cohort,tiv_mm3,<region>_mm3,...
GroupTable load_group_table(const std::filesystem::path& path);
void save_group_table(const GroupTable& table, const std::filesystem::path& path);

}  // namespace hsx
