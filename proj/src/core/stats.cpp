#include "uqod/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>

#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/gamma.hpp>

namespace uqod::stats {

namespace {

double normal_upper(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

struct SignedRanks {
  std::vector<double> ranks;      // rank of |d| among non-zero differences
  std::vector<bool> positive;
  double tie_term = 0.0;          // sum of t^3 - t over tie groups
};

SignedRanks signed_ranks(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("paired vectors differ in length");
  if (a.empty()) throw std::invalid_argument("paired vectors are empty");
  std::vector<double> magnitudes;
  SignedRanks out;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    if (d == 0.0) continue;
    magnitudes.push_back(std::fabs(d));
    out.positive.push_back(d > 0.0);
  }
  out.ranks = average_ranks(magnitudes);

  std::vector<double> sorted = magnitudes;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    const auto t = static_cast<double>(j - i);
    out.tie_term += t * t * t - t;
    i = j;
  }
  return out;
}

// Number of sign assignments per doubled positive rank sum.
std::vector<double> signed_rank_counts(std::span<const long> doubled_ranks) {
  long total = 0;
  for (long r : doubled_ranks) total += r;
  std::vector<double> counts(static_cast<std::size_t>(total) + 1, 0.0);
  counts[0] = 1.0;
  long reach = 0;
  for (long r : doubled_ranks) {
    for (long s = reach; s >= 0; --s) {
      counts[static_cast<std::size_t>(s + r)] += counts[static_cast<std::size_t>(s)];
    }
    reach += r;
  }
  return counts;
}

double exact_wilcoxon_p(const SignedRanks& sr, double w_plus, Alternative alternative) {
  std::vector<long> doubled;
  doubled.reserve(sr.ranks.size());
  for (double r : sr.ranks) doubled.push_back(std::lround(2.0 * r));
  const auto counts = signed_rank_counts(doubled);
  const long observed = std::lround(2.0 * w_plus);

  double lower = 0.0;
  double upper = 0.0;
  for (std::size_t s = 0; s < counts.size(); ++s) {
    if (static_cast<long>(s) <= observed) lower += counts[s];
    if (static_cast<long>(s) >= observed) upper += counts[s];
  }
  const double total = std::ldexp(1.0, static_cast<int>(sr.ranks.size()));
  switch (alternative) {
    case Alternative::Greater: return upper / total;
    case Alternative::Less: return lower / total;
    case Alternative::TwoSided: break;
  }
  return std::min(1.0, 2.0 * std::min(lower, upper) / total);
}

double normal_wilcoxon_p(const SignedRanks& sr, double w_plus, Alternative alternative) {
  const auto n = static_cast<double>(sr.ranks.size());
  const double mu = n * (n + 1.0) / 4.0;
  const double var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - sr.tie_term / 48.0;
  if (!(var > 0.0)) return 1.0;
  const double sigma = std::sqrt(var);
  switch (alternative) {
    case Alternative::Greater: return normal_upper((w_plus - mu - 0.5) / sigma);
    case Alternative::Less: return normal_upper((mu - w_plus - 0.5) / sigma);
    case Alternative::TwoSided: break;
  }
  const double z = std::max(0.0, (std::fabs(w_plus - mu) - 0.5) / sigma);
  return std::min(1.0, 2.0 * normal_upper(z));
}

// 2 * rank - (n + 1): an integer even with half ranks, and centred on zero.
std::vector<long> centred_doubled(std::span<const double> ranks) {
  const auto n = static_cast<double>(ranks.size());
  std::vector<long> out;
  out.reserve(ranks.size());
  for (double r : ranks) out.push_back(std::lround(2.0 * r - (n + 1.0)));
  return out;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  const auto n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

}  // namespace

PairedSampleMatrix::PairedSampleMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), values_(rows * cols, 0.0) {}

PairedSampleMatrix::PairedSampleMatrix(std::size_t rows, std::size_t cols,
                                       std::vector<double> row_major)
    : rows_(rows), cols_(cols), values_(std::move(row_major)) {
  if (values_.size() != rows_ * cols_) {
    throw std::invalid_argument("matrix data does not match its shape");
  }
}

std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size(), 0.0);
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && values[order[j]] == values[order[i]]) ++j;
    const double rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = rank;
    i = j;
  }
  return ranks;
}

double median(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("median of empty input");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  return v.size() % 2 == 1 ? v[mid] : (v[mid - 1] + v[mid]) / 2.0;
}

TestOutcome friedman(const PairedSampleMatrix& m) {
  const std::size_t n = m.rows();
  const std::size_t k = m.cols();
  if (k < 3) throw std::invalid_argument("friedman needs at least 3 groups; use wilcoxon");
  if (n < 2) throw std::invalid_argument("friedman needs at least 2 rows");

  std::vector<double> rank_sums(k, 0.0);
  double tie_term = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    const auto row = m.row(r);
    const auto ranks = average_ranks(row);
    for (std::size_t c = 0; c < k; ++c) rank_sums[c] += ranks[c];

    std::vector<double> sorted(row.begin(), row.end());
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < k;) {
      std::size_t j = i;
      while (j < k && sorted[j] == sorted[i]) ++j;
      const auto t = static_cast<double>(j - i);
      tie_term += t * t * t - t;
      i = j;
    }
  }

  const auto nd = static_cast<double>(n);
  const auto kd = static_cast<double>(k);
  double sum_sq = 0.0;
  for (double s : rank_sums) sum_sq += s * s;
  const double raw = 12.0 / (nd * kd * (kd + 1.0)) * sum_sq - 3.0 * nd * (kd + 1.0);
  const double correction = 1.0 - tie_term / (nd * (kd * kd * kd - kd));

  TestOutcome out;
  if (!(correction > 0.0)) {
    out.degenerate = true;
    return out;
  }
  out.statistic = std::max(0.0, raw / correction);
  out.p_value = std::clamp(boost::math::gamma_q((kd - 1.0) / 2.0, out.statistic / 2.0), 0.0, 1.0);
  return out;
}

WilcoxonOutcome wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b,
                                     Alternative alternative, WilcoxonMethod method) {
  const auto sr = signed_ranks(a, b);
  WilcoxonOutcome out;
  out.alternative = alternative;
  out.n_nonzero = sr.ranks.size();
  if (sr.ranks.empty()) {
    out.degenerate = true;
    return out;
  }
  for (std::size_t i = 0; i < sr.ranks.size(); ++i) {
    (sr.positive[i] ? out.w_plus : out.w_minus) += sr.ranks[i];
  }
  out.statistic = std::min(out.w_plus, out.w_minus);
  out.exact = method == WilcoxonMethod::Exact ||
              (method == WilcoxonMethod::Auto && sr.ranks.size() <= kWilcoxonExactLimit);
  out.p_value = out.exact ? exact_wilcoxon_p(sr, out.w_plus, alternative)
                          : normal_wilcoxon_p(sr, out.w_plus, alternative);
  out.p_value = std::clamp(out.p_value, 0.0, 1.0);
  return out;
}

RankBiserial rank_biserial(std::span<const double> a, std::span<const double> b) {
  const auto sr = signed_ranks(a, b);
  RankBiserial out;
  if (sr.ranks.empty()) {
    out.degenerate = true;
    return out;
  }
  double w_plus = 0.0;
  double w_minus = 0.0;
  for (std::size_t i = 0; i < sr.ranks.size(); ++i) {
    (sr.positive[i] ? w_plus : w_minus) += sr.ranks[i];
  }
  out.r = (w_plus - w_minus) / (w_plus + w_minus);
  out.magnitude = effect_magnitude(out.r);
  return out;
}

EffectMagnitude effect_magnitude(double r) {
  const double m = std::fabs(r);
  if (m < 0.1) return EffectMagnitude::Negligible;
  if (m < 0.3) return EffectMagnitude::Small;
  if (m < 0.5) return EffectMagnitude::Medium;
  return EffectMagnitude::Large;
}

std::string to_string(EffectMagnitude magnitude) {
  switch (magnitude) {
    case EffectMagnitude::Negligible: return "negligible";
    case EffectMagnitude::Small: return "small";
    case EffectMagnitude::Medium: return "medium";
    case EffectMagnitude::Large: return "large";
  }
  return "negligible";
}

std::string to_string(Alternative alternative) {
  switch (alternative) {
    case Alternative::TwoSided: return "two-sided";
    case Alternative::Greater: return "greater";
    case Alternative::Less: return "less";
  }
  return "two-sided";
}

Interval median_mad_interval(std::span<const double> x) {
  const double med = median(x);
  std::vector<double> dev;
  dev.reserve(x.size());
  for (double v : x) dev.push_back(std::fabs(v - med));
  const double mad = median(dev);
  return Interval{med - 2.0 * mad, med + 2.0 * mad};
}

std::vector<HolmDecision> holm_bonferroni(std::span<const double> p_values, double alpha) {
  const std::size_t m = p_values.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return p_values[a] < p_values[b]; });

  std::vector<HolmDecision> out(m);
  bool rejecting = true;
  double running = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double p = p_values[order[i]];
    const auto remaining = static_cast<double>(m - i);
    rejecting = rejecting && p <= alpha / remaining;
    running = std::max(running, std::min(1.0, remaining * p));
    out[order[i]] = HolmDecision{rejecting, running};
  }
  return out;
}

SpearmanOutcome spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("spearman vectors differ in length");
  if (x.size() < 3) throw std::invalid_argument("spearman needs at least 3 observations");
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);

  SpearmanOutcome out;
  const auto cx = centred_doubled(rx);
  const auto cy = centred_doubled(ry);
  const auto all_zero = [](const std::vector<long>& v) {
    return std::all_of(v.begin(), v.end(), [](long e) { return e == 0; });
  };
  if (all_zero(cx) || all_zero(cy)) return out;

  const double rho = pearson(rx, ry);
  out.rho = rho;
  const std::size_t n = x.size();

  if (n <= kSpearmanExactLimit) {
    const auto dot = [&](const std::vector<long>& perm) {
      long s = 0;
      for (std::size_t i = 0; i < n; ++i) s += cx[i] * perm[i];
      return s;
    };
    const long observed = std::labs(dot(cy));
    // Every index permutation, so tied ranks are counted with multiplicity.
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::uint64_t hits = 0;
    std::uint64_t total = 0;
    std::vector<long> arranged(n);
    do {
      for (std::size_t i = 0; i < n; ++i) arranged[i] = cy[idx[i]];
      if (std::labs(dot(arranged)) >= observed) ++hits;
      ++total;
    } while (std::next_permutation(idx.begin(), idx.end()));
    out.p_value = static_cast<double>(hits) / static_cast<double>(total);
    out.exact = true;
    return out;
  }

  if (std::fabs(rho) >= 1.0) {
    out.p_value = 0.0;
    return out;
  }
  const double df = static_cast<double>(n) - 2.0;
  const double t = rho * std::sqrt(df / (1.0 - rho * rho));
  const boost::math::students_t dist(df);
  out.p_value = std::clamp(2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(t))),
                           0.0, 1.0);
  return out;
}

DirectionalComparison directional_compare(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("paired vectors differ in length");
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  DirectionalComparison out;
  out.interval = median_mad_interval(d);
  if (out.interval.low > 0.0) {
    out.alternative = Alternative::Greater;
  } else if (out.interval.high < 0.0) {
    out.alternative = Alternative::Less;
  }
  out.test = wilcoxon_signed_rank(a, b, out.alternative);
  return out;
}

}  // namespace uqod::stats
