#include "uqod/robustness.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace uqod::robustness {

AvgDiff avg_and_diff(const PairedMetrics& p) {
  if (p.adversarial.empty()) {
    throw std::invalid_argument("pairing has no adversarial values");
  }
  const auto m = static_cast<double>(p.adversarial.size());
  double sum = p.original;
  double abs_diff = 0.0;
  for (double v : p.adversarial) {
    sum += v;
    abs_diff += std::fabs(p.original - v);
  }
  return AvgDiff{sum / (m + 1.0), abs_diff / m};
}

double rs_map(const PairedMetrics& p) {
  const auto ad = avg_and_diff(p);
  return ad.avg - ad.diff;
}

double rs_uqm(const PairedMetrics& p) {
  const auto ad = avg_and_diff(p);
  return 1.0 - (ad.avg + ad.diff);
}

double rs_uq(const UqmScores& scores) {
  std::string missing;
  double sum = 0.0;
  for (std::size_t i = 0; i < kUqmCount; ++i) {
    if (!scores[i]) {
      if (!missing.empty()) missing += ", ";
      missing += kUqmNames[i];
    } else {
      sum += *scores[i];
    }
  }
  if (!missing.empty()) {
    throw std::invalid_argument("missing robustness scores: " + missing);
  }
  return sum / static_cast<double>(kUqmCount);
}

std::vector<double> minmax_normalize(std::span<const double> values) {
  std::vector<double> out(values.size(), 0.0);
  if (values.empty()) return out;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  const double range = *hi - *lo;
  if (!(range > 0.0)) return out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    out[i] = std::clamp((values[i] - *lo) / range, 0.0, 1.0);
  }
  return out;
}

std::optional<double> mean_of_defined(std::span<const std::optional<double>> values) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& v : values) {
    if (v) {
      sum += *v;
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

}  // namespace uqod::robustness
