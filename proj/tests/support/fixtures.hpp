#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "uqod/clustering.hpp"
#include "uqod/random.hpp"
#include "uqod/types.hpp"

namespace fixture {

inline uqod::BoundingBox box(double x1, double y1, double x2, double y2) {
  return uqod::BoundingBox{x1, y1, x2, y2};
}

inline uqod::SoftmaxScore onehot(int label, int nc = 3) {
  uqod::SoftmaxScore s;
  s.probabilities.assign(static_cast<std::size_t>(nc), 0.0);
  s.probabilities[static_cast<std::size_t>(label)] = 1.0;
  return s;
}

inline uqod::SoftmaxScore softmax(std::vector<double> p) { return uqod::SoftmaxScore{std::move(p)}; }

inline uqod::Detection detection(const uqod::BoundingBox& b, const uqod::SoftmaxScore& s,
                                 int pass = 0) {
  return uqod::Detection{b, s, pass};
}

inline uqod::clustering::DetectionCluster cluster_of(std::vector<uqod::Detection> members) {
  uqod::clustering::DetectionCluster c;
  for (std::size_t i = 0; i < members.size(); ++i) c.source_indices.push_back(i);
  c.members = std::move(members);
  return c;
}

inline uqod::SoftmaxScore random_softmax(uqod::Rng& rng, int nc = 3) {
  uqod::SoftmaxScore s;
  double total = 0.0;
  // Occasional exact one-hot and near-degenerate vectors.
  const double mode = rng.uniform();
  for (int c = 0; c < nc; ++c) {
    double v = rng.uniform();
    if (mode < 0.2) v = std::pow(v, 12.0);
    s.probabilities.push_back(v);
    total += v;
  }
  if (mode > 0.9 || total == 0.0) return onehot(static_cast<int>(rng.below(static_cast<std::uint64_t>(nc))), nc);
  for (auto& p : s.probabilities) p /= total;
  return s;
}

inline uqod::BoundingBox random_box(uqod::Rng& rng, double cx, double cy, double spread) {
  const double w = 20.0 + 100.0 * rng.uniform();
  const double h = 20.0 + 100.0 * rng.uniform();
  const double x = cx + spread * rng.normal();
  const double y = cy + spread * rng.normal();
  return box(x, y, x + w + spread * rng.normal() * 0.1, y + h + spread * rng.normal() * 0.1);
}

/// A cluster of W members around one object, with random scores and spread.
inline uqod::clustering::DetectionCluster random_cluster(uqod::Rng& rng, std::size_t w) {
  const double spread = std::pow(10.0, rng.uniform(-2.0, 1.5));
  const double cx = rng.uniform(0.0, 800.0);
  const double cy = rng.uniform(0.0, 600.0);
  std::vector<uqod::Detection> members;
  for (std::size_t k = 0; k < w; ++k) {
    auto b = random_box(rng, cx, cy, spread);
    if (b.x2 <= b.x1) std::swap(b.x1, b.x2);
    if (b.y2 <= b.y1) std::swap(b.y1, b.y2);
    if (b.x2 == b.x1) b.x2 += 1.0;
    if (b.y2 == b.y1) b.y2 += 1.0;
    members.push_back(detection(b, random_softmax(rng), static_cast<int>(k % 20)));
  }
  return cluster_of(std::move(members));
}

inline uqod::PredictionDump dump_of(std::string id, std::vector<uqod::Detection> dets, int passes = 20) {
  uqod::PredictionDump d;
  d.image_id = std::move(id);
  d.passes = passes;
  d.dropout_rate = 0.3;
  d.detections = std::move(dets);
  return d;
}

struct PlantedPartition {
  std::vector<uqod::clustering::Feature> points;
  std::vector<int> group;
};

/// `groups` tight groups (each coordinate within a cube of side `spread`)
/// whose centres lie on a grid with `separation` spacing; shuffled order.
inline PlantedPartition planted(uqod::Rng& rng, int groups, std::size_t min_size,
                                std::size_t max_size, double spread = 1.0,
                                double separation = 500.0) {
  PlantedPartition out;
  for (int g = 0; g < groups; ++g) {
    const double cx = separation * static_cast<double>(g % 4);
    const double cy = separation * static_cast<double>(g / 4);
    const auto size = min_size + rng.below(max_size - min_size + 1);
    for (std::size_t k = 0; k < size; ++k) {
      const double dx = spread * rng.uniform();
      const double dy = spread * rng.uniform();
      out.points.push_back({cx + dx, cy + dy, cx + 60.0 + spread * rng.uniform(),
                            cy + 40.0 + spread * rng.uniform()});
      out.group.push_back(g);
    }
  }
  for (std::size_t i = out.points.size(); i > 1; --i) {
    const auto j = rng.below(i);
    std::swap(out.points[i - 1], out.points[j]);
    std::swap(out.group[i - 1], out.group[j]);
  }
  return out;
}

/// Same partition up to renaming, with no noise.
inline bool same_partition(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] < 0 || b[i] < 0) return false;
    for (std::size_t j = 0; j < i; ++j) {
      if ((a[i] == a[j]) != (b[i] == b[j])) return false;
    }
  }
  return true;
}

/// Fresh empty directory under the system temp area.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("uqod_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace fixture
