#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace uqod::stats {

enum class Alternative { TwoSided, Greater, Less };

enum class WilcoxonMethod {
  Auto,    ///< exact up to kWilcoxonExactLimit non-zero differences, normal beyond
  Exact,   ///< always enumerate the sign distribution
  Normal,  ///< normal approximation with continuity and tie correction
};

inline constexpr std::size_t kWilcoxonExactLimit = 25;
inline constexpr std::size_t kSpearmanExactLimit = 8;

/// Rows are matched observations (images), columns are groups (models).
class PairedSampleMatrix {
 public:
  PairedSampleMatrix(std::size_t rows, std::size_t cols);
  PairedSampleMatrix(std::size_t rows, std::size_t cols, std::vector<double> row_major);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double at(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }
  double& at(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }
  std::span<const double> row(std::size_t r) const {
    return std::span<const double>(values_).subspan(r * cols_, cols_);
  }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> values_;
};

struct TestOutcome {
  double statistic = 0.0;
  double p_value = 1.0;
  bool exact = false;
  bool degenerate = false;
};

struct WilcoxonOutcome {
  /// min(W+, W-)
  double statistic = 0.0;
  double w_plus = 0.0;
  double w_minus = 0.0;
  std::size_t n_nonzero = 0;
  double p_value = 1.0;
  bool exact = false;
  /// All differences were zero; p is 1.
  bool degenerate = false;
  Alternative alternative = Alternative::TwoSided;
};

enum class EffectMagnitude { Negligible, Small, Medium, Large };

struct RankBiserial {
  double r = 0.0;
  EffectMagnitude magnitude = EffectMagnitude::Negligible;
  bool degenerate = false;
};

struct Interval {
  double low = 0.0;
  double high = 0.0;
};

struct HolmDecision {
  bool reject = false;
  double adjusted_p = 1.0;
};

struct SpearmanOutcome {
  /// Absent when either vector has zero rank variance.
  std::optional<double> rho;
  double p_value = 1.0;
  bool exact = false;
};

struct DirectionalComparison {
  Interval interval;
  Alternative alternative = Alternative::TwoSided;
  WilcoxonOutcome test;
};

/// Ranks starting at 1, tied values share the average of their positions.
std::vector<double> average_ranks(std::span<const double> values);

double median(std::span<const double> values);

/// Friedman chi-square with tie correction; p from chi-square with k - 1
/// degrees of freedom. Throws std::invalid_argument for k < 3 ("use
/// wilcoxon") or fewer than two rows.
TestOutcome friedman(const PairedSampleMatrix& m);

/// Signed-rank test on a - b. Zero differences are dropped and tied |d|
/// get average ranks. Exact p values count sign assignments; the two-sided
/// p is min(1, 2 * smaller tail).
WilcoxonOutcome wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b,
                                     Alternative alternative = Alternative::TwoSided,
                                     WilcoxonMethod method = WilcoxonMethod::Auto);

/// (W+ - W-) / (W+ + W-) over non-zero differences of a - b.
RankBiserial rank_biserial(std::span<const double> a, std::span<const double> b);

EffectMagnitude effect_magnitude(double r);
std::string to_string(EffectMagnitude magnitude);
std::string to_string(Alternative alternative);

/// median +/- 2 * MAD. Throws std::invalid_argument on empty input.
Interval median_mad_interval(std::span<const double> x);

/// Holm step-down procedure; results follow the input order.
std::vector<HolmDecision> holm_bonferroni(std::span<const double> p_values, double alpha);

/// Rank correlation. Exact permutation p (two-sided) for n <= 8, Student t
/// with n - 2 degrees of freedom beyond. Throws std::invalid_argument when
/// n < 3 or the lengths differ.
SpearmanOutcome spearman(std::span<const double> x, std::span<const double> y);

/// Picks the one-sided alternative from the median +/- 2 MAD interval of
/// a - b (entirely above zero: greater, entirely below: less, otherwise
/// two-sided) and runs the signed-rank test with it.
DirectionalComparison directional_compare(std::span<const double> a, std::span<const double> b);

}  // namespace uqod::stats
