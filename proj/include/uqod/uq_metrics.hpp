#pragma once

#include <optional>
#include <span>
#include <vector>

#include "uqod/clustering.hpp"

namespace uqod::uq {

/// Floor applied to probabilities inside logarithms; 0 * log 0 is taken as 0.
inline constexpr double kLogEpsilon = 1e-12;

struct ObjectUncertainty {
  double vr = 0.0;
  double se = 0.0;
  double mi = 0.0;
  double tv = 0.0;
  double ps = 0.0;
  /// W == 1: the sample variance is undefined and TV is reported as 0.
  bool single_member = false;
};

struct ImageUncertainty {
  double vr = 0.0;
  double se = 0.0;
  double mi = 0.0;
  double tv = 0.0;
  double ps = 0.0;
  std::size_t n_clusters = 0;
};

/// 1 - (modal label count) / W.
double variation_ratio(std::span<const SoftmaxScore> scores);

/// Natural-log entropy of the mean softmax.
double shannon_entropy(std::span<const SoftmaxScore> scores);

/// Entropy of the mean minus the mean of the per-pass entropies, kept in [0, SE].
double mutual_information(std::span<const SoftmaxScore> scores);

/// Sum over x1, y1, x2, y2 of the sample variance (denominator W - 1).
double total_variance(std::span<const BoundingBox> boxes);

/// Mean convex-hull area of the four corner-point clouds.
double predictive_surface(std::span<const BoundingBox> boxes);

double variation_ratio(const clustering::DetectionCluster& cluster);
double shannon_entropy(const clustering::DetectionCluster& cluster);
double mutual_information(const clustering::DetectionCluster& cluster);
double total_variance(const clustering::DetectionCluster& cluster);
double predictive_surface(const clustering::DetectionCluster& cluster);

ObjectUncertainty object_uncertainty(const clustering::DetectionCluster& cluster);

/// Unweighted mean over clusters; std::nullopt when there are none.
std::optional<ImageUncertainty> image_uncertainty(
    std::span<const clustering::DetectionCluster> clusters);

std::optional<ImageUncertainty> image_uncertainty(std::span<const ObjectUncertainty> objects);

}  // namespace uqod::uq
