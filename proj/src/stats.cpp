#include "hsx/stats.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "hsx/errors.hpp"

namespace hsx {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double auroc(const std::vector<double>& x_neg, const std::vector<double>& x_pos) {
  if (x_neg.empty() || x_pos.empty()) throw DataError("auroc: empty group");
  double wins = 0.0;
  for (double p : x_pos) {
    for (double n : x_neg) {
      if (p > n) {
        wins += 1.0;
      } else if (p == n) {
        wins += 0.5;
      }
    }
  }
  return wins / (static_cast<double>(x_pos.size()) * static_cast<double>(x_neg.size()));
}

namespace {

// Midranks of the pooled sample, plus the tie-group sizes.
std::vector<double> midranks(const std::vector<double>& pooled, std::vector<int>* ties) {
  const std::size_t n = pooled.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return pooled[a] < pooled[b]; });
  std::vector<double> rank(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && pooled[order[j + 1]] == pooled[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t) rank[order[t]] = r;
    if (ties) ties->push_back(static_cast<int>(j - i + 1));
    i = j + 1;
  }
  return rank;
}

// Exact two-sided p for the rank-sum statistic: enumerate every n1-subset of
// the pooled midranks; p = min(1, 2*min(P(W<=w), P(W>=w))).
double ranksum_exact_p(const std::vector<double>& ranks, std::size_t n1, double w_obs) {
  const std::size_t n = ranks.size();
  std::vector<std::size_t> comb(n1);
  std::iota(comb.begin(), comb.end(), 0);
  std::size_t total = 0, le = 0, ge = 0;
  const double eps = 1e-9;
  while (true) {
    double w = 0.0;
    for (std::size_t idx : comb) w += ranks[idx];
    ++total;
    if (w <= w_obs + eps) ++le;
    if (w >= w_obs - eps) ++ge;
    // next combination
    std::size_t i = n1;
    while (i > 0) {
      --i;
      if (comb[i] != i + n - n1) break;
      if (i == 0) {
        const double p = 2.0 * std::min(static_cast<double>(le), static_cast<double>(ge)) /
                         static_cast<double>(total);
        return std::min(1.0, p);
      }
    }
    ++comb[i];
    for (std::size_t j = i + 1; j < n1; ++j) comb[j] = comb[j - 1] + 1;
  }
}

}  // namespace

TestResult ranksum_test(const std::vector<double>& x, const std::vector<double>& y,
                        TestMode mode) {
  if (x.empty() || y.empty()) throw DataError("ranksum: empty group");
  const std::size_t n1 = x.size(), n2 = y.size(), n = n1 + n2;
  std::vector<double> pooled = x;
  pooled.insert(pooled.end(), y.begin(), y.end());
  std::vector<int> ties;
  const std::vector<double> ranks = midranks(pooled, &ties);
  double w = 0.0;
  for (std::size_t i = 0; i < n1; ++i) w += ranks[i];

  const bool use_exact =
      mode == TestMode::exact || (mode == TestMode::automatic && n <= 12);
  TestResult res;
  res.statistic = w;
  res.exact = use_exact;
  if (use_exact) {
    res.p = ranksum_exact_p(ranks, n1, w);
    return res;
  }

  const double mean = static_cast<double>(n1) * (n + 1) / 2.0;
  double tie_term = 0.0;
  for (int t : ties) tie_term += static_cast<double>(t) * t * t - t;
  const double var = (static_cast<double>(n1) * n2 / 12.0) *
                     ((n + 1) - tie_term / (static_cast<double>(n) * (n - 1)));
  if (var <= 0.0) {
    res.p = 1.0;
    return res;
  }
  // 0.5 continuity correction toward the mean.
  double delta = w - mean;
  if (delta > 0.5) {
    delta -= 0.5;
  } else if (delta < -0.5) {
    delta += 0.5;
  } else {
    delta = 0.0;
  }
  const double z = delta / std::sqrt(var);
  res.p = std::min(1.0, 2.0 * (1.0 - normal_cdf(std::abs(z))));
  return res;
}

TestResult signedrank_test(const std::vector<std::pair<double, double>>& pairs,
                           TestMode mode) {
  std::vector<double> diffs;
  for (const auto& [a, b] : pairs) {
    const double d = a - b;
    if (d != 0.0) diffs.push_back(d);
  }
  if (diffs.empty()) throw DegenerateError("signed rank: all differences are zero");
  const std::size_t n = diffs.size();

  std::vector<double> mags(n);
  for (std::size_t i = 0; i < n; ++i) mags[i] = std::abs(diffs[i]);
  std::vector<int> ties;
  const std::vector<double> ranks = midranks(mags, &ties);
  double w_plus = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (diffs[i] > 0.0) w_plus += ranks[i];
  }

  const bool use_exact =
      mode == TestMode::exact || (mode == TestMode::automatic && n <= 12);
  TestResult res;
  res.statistic = w_plus;
  res.exact = use_exact;
  if (use_exact) {
    // Enumerate all 2^n sign assignments over the observed ranks.
    const std::size_t total = std::size_t{1} << n;
    std::size_t le = 0, ge = 0;
    const double eps = 1e-9;
    for (std::size_t bits = 0; bits < total; ++bits) {
      double w = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (bits & (std::size_t{1} << i)) w += ranks[i];
      }
      if (w <= w_plus + eps) ++le;
      if (w >= w_plus - eps) ++ge;
    }
    res.p = std::min(1.0, 2.0 * std::min(static_cast<double>(le), static_cast<double>(ge)) /
                              static_cast<double>(total));
    return res;
  }

  const double mean = static_cast<double>(n) * (n + 1) / 4.0;
  double tie_term = 0.0;
  for (int t : ties) tie_term += static_cast<double>(t) * t * t - t;
  const double var = static_cast<double>(n) * (n + 1) * (2.0 * n + 1) / 24.0 - tie_term / 48.0;
  if (var <= 0.0) {
    res.p = 1.0;
    return res;
  }
  double delta = w_plus - mean;
  if (delta > 0.5) {
    delta -= 0.5;
  } else if (delta < -0.5) {
    delta += 0.5;
  } else {
    delta = 0.0;
  }
  const double z = delta / std::sqrt(var);
  res.p = std::min(1.0, 2.0 * (1.0 - normal_cdf(std::abs(z))));
  return res;
}

DelongResult delong_test(const std::vector<double>& scores_a,
                         const std::vector<double>& scores_b,
                         const std::vector<bool>& labels) {
  if (scores_a.size() != labels.size() || scores_b.size() != labels.size()) {
    throw DataError("delong: score/label length mismatch");
  }
  std::vector<double> pos_a, neg_a, pos_b, neg_b;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i]) {
      pos_a.push_back(scores_a[i]);
      pos_b.push_back(scores_b[i]);
    } else {
      neg_a.push_back(scores_a[i]);
      neg_b.push_back(scores_b[i]);
    }
  }
  if (pos_a.empty() || neg_a.empty()) throw DataError("delong: both classes required");
  const std::size_t m = pos_a.size(), n = neg_a.size();

  auto placements = [](const std::vector<double>& pos, const std::vector<double>& neg) {
    // V10(i): mean over negatives of psi(pos_i, neg_j); V01(j) analogous.
    std::vector<double> v10(pos.size(), 0.0), v01(neg.size(), 0.0);
    for (std::size_t i = 0; i < pos.size(); ++i) {
      for (std::size_t j = 0; j < neg.size(); ++j) {
        const double psi = pos[i] > neg[j] ? 1.0 : (pos[i] == neg[j] ? 0.5 : 0.0);
        v10[i] += psi;
        v01[j] += psi;
      }
    }
    for (double& v : v10) v /= static_cast<double>(neg.size());
    for (double& v : v01) v /= static_cast<double>(pos.size());
    return std::make_pair(v10, v01);
  };

  const auto [v10_a, v01_a] = placements(pos_a, neg_a);
  const auto [v10_b, v01_b] = placements(pos_b, neg_b);

  DelongResult res;
  res.auc_a = std::accumulate(v10_a.begin(), v10_a.end(), 0.0) / static_cast<double>(m);
  res.auc_b = std::accumulate(v10_b.begin(), v10_b.end(), 0.0) / static_cast<double>(m);

  auto cov = [](const std::vector<double>& u, const std::vector<double>& v, double mu,
                double mv) {
    if (u.size() < 2) return 0.0;
    double acc = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) acc += (u[i] - mu) * (v[i] - mv);
    return acc / static_cast<double>(u.size() - 1);
  };

  const double s10_aa = cov(v10_a, v10_a, res.auc_a, res.auc_a);
  const double s10_bb = cov(v10_b, v10_b, res.auc_b, res.auc_b);
  const double s10_ab = cov(v10_a, v10_b, res.auc_a, res.auc_b);
  const double s01_aa = cov(v01_a, v01_a, res.auc_a, res.auc_a);
  const double s01_bb = cov(v01_b, v01_b, res.auc_b, res.auc_b);
  const double s01_ab = cov(v01_a, v01_b, res.auc_a, res.auc_b);

  const double var = (s10_aa + s10_bb - 2.0 * s10_ab) / static_cast<double>(m) +
                     (s01_aa + s01_bb - 2.0 * s01_ab) / static_cast<double>(n);
  const double diff = res.auc_a - res.auc_b;
  if (var <= 0.0) {
    res.z = 0.0;
    res.p = diff == 0.0 ? 1.0 : 0.0;
    return res;
  }
  res.z = diff / std::sqrt(var);
  res.p = std::min(1.0, 2.0 * (1.0 - normal_cdf(std::abs(res.z))));
  return res;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw DataError("pearson: need two equal-length samples of size >= 2");
  }
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) throw DegenerateError("pearson: zero variance");
  return sxy / std::sqrt(sxx * syy);
}

std::vector<double> bonferroni(const std::vector<double>& pvals) {
  const double m = static_cast<double>(pvals.size());
  std::vector<double> out;
  out.reserve(pvals.size());
  for (double p : pvals) {
    if (!(p >= 0.0 && p <= 1.0)) throw DataError("bonferroni: p outside [0,1]");
    out.push_back(std::min(1.0, p * m));
  }
  return out;
}

GroupTable tiv_normalize(const GroupTable& table) {
  GroupTable out = table;
  for (auto& row : out.rows) {
    if (!(row.tiv_mm3 > 0.0)) {
      throw DataError("tiv_normalize: nonpositive TIV for subject " + row.subject);
    }
    for (double& v : row.region_volumes_mm3) v /= row.tiv_mm3;
  }
  return out;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss(line);
  while (std::getline(ss, cur, ',')) out.push_back(cur);
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

std::string strip_suffix(const std::string& s, const std::string& suf) {
  if (s.size() >= suf.size() && s.compare(s.size() - suf.size(), suf.size(), suf) == 0) {
    return s.substr(0, s.size() - suf.size());
  }
  return s;
}

}  // namespace

GroupTable load_group_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingInputError("cannot open table: " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty group table (row 0)");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_csv_line(line);
  if (header.size() < 4 || header[0] != "subject" || header[1] != "cohort" ||
      header[2] != "tiv_mm3") {
    throw DataError("bad group-table header (row 0)");
  }
  GroupTable table;
  for (std::size_t c = 3; c < header.size(); ++c) {
    table.region_names.push_back(strip_suffix(header[c], "_mm3"));
  }
  std::size_t rownum = 0;
  while (std::getline(in, line)) {
    ++rownum;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw DataError("wrong column count (row " + std::to_string(rownum) + ")");
    }
    GroupRow row;
    row.subject = cells[0];
    row.cohort = cells[1];
    if (row.cohort != "control" && row.cohort != "patient") {
      throw DataError("unknown cohort '" + row.cohort + "' (row " +
                      std::to_string(rownum) + ")");
    }
    try {
      row.tiv_mm3 = std::stod(cells[2]);
      for (std::size_t c = 3; c < cells.size(); ++c) {
        row.region_volumes_mm3.push_back(std::stod(cells[c]));
      }
    } catch (const std::exception&) {
      throw DataError("non-numeric value (row " + std::to_string(rownum) + ")");
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

void save_group_table(const GroupTable& table, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write table: " + path.string());
  out << "subject,cohort,tiv_mm3";
  for (const auto& r : table.region_names) out << "," << r << "_mm3";
  out << "\n";
  out.precision(17);
  for (const auto& row : table.rows) {
    out << row.subject << "," << row.cohort << "," << row.tiv_mm3;
    for (double v : row.region_volumes_mm3) out << "," << v;
    out << "\n";
  }
}

}  // namespace hsx
