#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "uqod/types.hpp"

namespace uqod::clustering {

struct ClusterParams {
  int min_samples = 3;
  int min_cluster_size = 3;
};

/// Box corners (x1, y1, x2, y2); clustering runs in this space.
using Feature = std::array<double, 4>;

/// One object recovered across passes.
struct DetectionCluster {
  std::vector<Detection> members;
  /// Positions of the members in the source dump.
  std::vector<std::size_t> source_indices;

  std::size_t size() const { return members.size(); }
  std::vector<SoftmaxScore> softmaxes() const;
  std::vector<BoundingBox> boxes() const;
};

struct ClusteringResult {
  std::vector<DetectionCluster> clusters;
  std::vector<Detection> noise;
  std::vector<std::size_t> noise_indices;
};

Feature feature_vector(const Detection& detection);

double euclidean(const Feature& a, const Feature& b);

/// Distance from p to its k-th nearest entry of `all`, counting p itself when
/// it is a member. Throws std::invalid_argument unless 1 <= k <= all.size().
double core_distance(const Feature& p, std::span<const Feature> all, int k);

/// max(core(a), core(b), |a - b|).
double mutual_reachability(const Feature& a, const Feature& b, std::span<const Feature> all, int k);

/// Core distance of every point, k-th neighbour counting the point itself.
std::vector<double> core_distances(std::span<const Feature> points, int k);

struct MstEdge {
  std::size_t a = 0;
  std::size_t b = 0;
  double weight = 0.0;
};

/// Prim's algorithm over the dense mutual-reachability graph. Ties pick the
/// lowest vertex index, so the edge list is deterministic.
std::vector<MstEdge> minimum_spanning_tree(std::span<const Feature> points,
                                           std::span<const double> core);

/// Entry of the condensed tree. Node ids below n_points are points; cluster
/// ids start at n_points (the root).
struct CondensedEdge {
  std::size_t parent = 0;
  std::size_t child = 0;
  double lambda = 0.0;
  std::size_t child_size = 0;
};

struct CondensedTree {
  std::size_t n_points = 0;
  std::vector<CondensedEdge> edges;

  std::size_t root() const { return n_points; }
};

/// Builds the single-linkage dendrogram from the MST and condenses it with
/// the given minimum cluster size. A merge at distance zero never spawns
/// child clusters: its points leave the current cluster at lambda = +inf.
CondensedTree condense_tree(std::span<const MstEdge> mst, std::size_t n_points,
                            int min_cluster_size);

/// Excess-of-mass stability per cluster id, indexed by (id - n_points).
std::vector<double> cluster_stabilities(const CondensedTree& tree);

/// Flat labels (-1 for noise) by excess-of-mass selection. The root is a
/// candidate, so a single dense group comes out as one cluster.
std::vector<int> extract_labels(const CondensedTree& tree);

/// Full HDBSCAN over feature vectors. Labels are numbered by the order of
/// each cluster's first member.
std::vector<int> hdbscan(std::span<const Feature> points, const ClusterParams& params);

/// Groups a dump's detections into per-object clusters plus noise.
ClusteringResult cluster_detections(const PredictionDump& dump, const ClusterParams& params = {});

}  // namespace uqod::clustering
