#include "uqod/uq_metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "uqod/geometry.hpp"

namespace uqod::uq {

namespace {

// Mean anchored at the first value: identical inputs give that value back
// bit-for-bit, so zero-spread inputs produce exact zeros downstream.
template <typename Get>
double anchored_mean(std::size_t count, Get get) {
  const double anchor = get(0);
  double offset = 0.0;
  for (std::size_t k = 1; k < count; ++k) offset += get(k) - anchor;
  return anchor + offset / static_cast<double>(count);
}

double entropy_of(std::span<const double> p) {
  double h = 0.0;
  for (double v : p) {
    if (v > 0.0) h -= v * std::log(std::max(v, kLogEpsilon));
  }
  return h;
}

std::vector<double> mean_softmax(std::span<const SoftmaxScore> scores) {
  const std::size_t nc = scores.front().class_count();
  std::vector<double> mean(nc, 0.0);
  for (std::size_t c = 0; c < nc; ++c) {
    mean[c] = anchored_mean(scores.size(), [&](std::size_t k) { return scores[k].probabilities[c]; });
  }
  return mean;
}

double coordinate(const BoundingBox& b, int which) {
  switch (which) {
    case 0: return b.x1;
    case 1: return b.y1;
    case 2: return b.x2;
    default: return b.y2;
  }
}

}  // namespace

double variation_ratio(std::span<const SoftmaxScore> scores) {
  if (scores.empty()) return 0.0;
  std::vector<std::size_t> counts(scores.front().class_count(), 0);
  for (const auto& s : scores) {
    const auto label = static_cast<std::size_t>(predicted_label(s));
    if (label >= counts.size()) counts.resize(label + 1, 0);
    ++counts[label];
  }
  const std::size_t mode = *std::max_element(counts.begin(), counts.end());
  return 1.0 - static_cast<double>(mode) / static_cast<double>(scores.size());
}

double shannon_entropy(std::span<const SoftmaxScore> scores) {
  if (scores.empty()) return 0.0;
  const double max_entropy = std::log(static_cast<double>(scores.front().class_count()));
  return std::clamp(entropy_of(mean_softmax(scores)), 0.0, max_entropy);
}

double mutual_information(std::span<const SoftmaxScore> scores) {
  if (scores.empty()) return 0.0;
  const double se = shannon_entropy(scores);
  const double expected = anchored_mean(
      scores.size(), [&](std::size_t k) { return entropy_of(scores[k].probabilities); });
  return std::clamp(se - expected, 0.0, se);
}

double total_variance(std::span<const BoundingBox> boxes) {
  const std::size_t w = boxes.size();
  if (w < 2) return 0.0;
  double tv = 0.0;
  for (int v = 0; v < 4; ++v) {
    const double mu = anchored_mean(w, [&](std::size_t k) { return coordinate(boxes[k], v); });
    double ss = 0.0;
    for (const auto& b : boxes) {
      const double d = coordinate(b, v) - mu;
      ss += d * d;
    }
    tv += ss / static_cast<double>(w - 1);
  }
  return tv;
}

double predictive_surface(std::span<const BoundingBox> boxes) {
  if (boxes.empty()) return 0.0;
  using geometry::Point2D;
  std::array<std::vector<Point2D>, 4> corners;
  for (auto& c : corners) c.reserve(boxes.size());
  for (const auto& b : boxes) {
    corners[0].push_back({b.x1, b.y1});
    corners[1].push_back({b.x2, b.y2});
    corners[2].push_back({b.x2, b.y1});
    corners[3].push_back({b.x1, b.y2});
  }
  double sum = 0.0;
  for (const auto& cloud : corners) {
    sum += geometry::polygon_area(geometry::convex_hull(cloud));
  }
  return sum / static_cast<double>(corners.size());
}

double variation_ratio(const clustering::DetectionCluster& cluster) {
  return variation_ratio(cluster.softmaxes());
}
double shannon_entropy(const clustering::DetectionCluster& cluster) {
  return shannon_entropy(cluster.softmaxes());
}
double mutual_information(const clustering::DetectionCluster& cluster) {
  return mutual_information(cluster.softmaxes());
}
double total_variance(const clustering::DetectionCluster& cluster) {
  return total_variance(cluster.boxes());
}
double predictive_surface(const clustering::DetectionCluster& cluster) {
  return predictive_surface(cluster.boxes());
}

ObjectUncertainty object_uncertainty(const clustering::DetectionCluster& cluster) {
  const auto scores = cluster.softmaxes();
  const auto boxes = cluster.boxes();
  ObjectUncertainty out;
  out.vr = variation_ratio(scores);
  out.se = shannon_entropy(scores);
  out.mi = mutual_information(scores);
  out.tv = total_variance(boxes);
  out.ps = predictive_surface(boxes);
  out.single_member = cluster.size() == 1;
  return out;
}

std::optional<ImageUncertainty> image_uncertainty(std::span<const ObjectUncertainty> objects) {
  if (objects.empty()) return std::nullopt;
  ImageUncertainty img;
  for (const auto& o : objects) {
    img.vr += o.vr;
    img.se += o.se;
    img.mi += o.mi;
    img.tv += o.tv;
    img.ps += o.ps;
  }
  const auto n = static_cast<double>(objects.size());
  img.vr /= n;
  img.se /= n;
  img.mi /= n;
  img.tv /= n;
  img.ps /= n;
  img.n_clusters = objects.size();
  return img;
}

std::optional<ImageUncertainty> image_uncertainty(
    std::span<const clustering::DetectionCluster> clusters) {
  std::vector<ObjectUncertainty> objects;
  objects.reserve(clusters.size());
  for (const auto& c : clusters) objects.push_back(object_uncertainty(c));
  return image_uncertainty(objects);
}

}  // namespace uqod::uq
