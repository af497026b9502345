#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace uqod::robustness {

/// Value of a metric on an original image and on each of its adversarial variants.
struct PairedMetrics {
  double original = 0.0;
  std::vector<double> adversarial;
};

struct AvgDiff {
  double avg = 0.0;
  double diff = 0.0;
};

enum class Uqm : std::size_t { VR = 0, SE, MI, TV, PS };
inline constexpr std::size_t kUqmCount = 5;
inline constexpr std::array<const char*, kUqmCount> kUqmNames{"VR", "SE", "MI", "TV", "PS"};

using UqmScores = std::array<std::optional<double>, kUqmCount>;

struct RobustnessReport {
  std::optional<double> rs_map;
  UqmScores rs_per_uqm{};
  std::optional<double> rs_uq;
};

/// avg = (v + sum adv) / (m + 1), diff = sum |v - adv| / m.
/// Throws std::invalid_argument when there are no adversarial values.
AvgDiff avg_and_diff(const PairedMetrics& p);

/// avg - diff. May be negative.
double rs_map(const PairedMetrics& p);

/// 1 - (avg + diff).
double rs_uqm(const PairedMetrics& p);

/// Mean of the five per-metric scores. Throws std::invalid_argument naming
/// the missing metrics when any is absent.
double rs_uq(const UqmScores& scores);

/// Min-max rescaling to [0, 1]; a constant input maps to all zeros.
std::vector<double> minmax_normalize(std::span<const double> values);

/// Unweighted mean of the defined entries; std::nullopt when none are.
std::optional<double> mean_of_defined(std::span<const std::optional<double>> values);

}  // namespace uqod::robustness
