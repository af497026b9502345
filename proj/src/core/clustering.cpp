#include "uqod/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace uqod::clustering {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Merge {
  std::size_t left = 0;
  std::size_t right = 0;
  double distance = 0.0;
  std::size_t size = 0;
};

class DisjointSet {
 public:
  explicit DisjointSet(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void attach(std::size_t child, std::size_t root) { parent_[child] = root; }

 private:
  std::vector<std::size_t> parent_;
};

// scipy-style linkage: node n + i is created by merge i.
std::vector<Merge> single_linkage(std::span<const MstEdge> mst, std::size_t n) {
  std::vector<MstEdge> edges(mst.begin(), mst.end());
  std::stable_sort(edges.begin(), edges.end(), [](const MstEdge& l, const MstEdge& r) {
    if (l.weight != r.weight) return l.weight < r.weight;
    const auto lk = std::minmax(l.a, l.b);
    const auto rk = std::minmax(r.a, r.b);
    return lk < rk;
  });

  DisjointSet sets(2 * n);
  std::vector<std::size_t> sizes(2 * n, 1);
  std::vector<Merge> merges;
  merges.reserve(edges.size());
  std::size_t next = n;
  for (const auto& e : edges) {
    const std::size_t ra = sets.find(e.a);
    const std::size_t rb = sets.find(e.b);
    const std::size_t size = sizes[ra] + sizes[rb];
    merges.push_back(Merge{ra, rb, e.weight, size});
    sizes[next] = size;
    sets.attach(ra, next);
    sets.attach(rb, next);
    ++next;
  }
  return merges;
}

std::size_t node_size(const std::vector<Merge>& merges, std::size_t n, std::size_t node) {
  return node < n ? 1 : merges[node - n].size;
}

void collect_leaves(const std::vector<Merge>& merges, std::size_t n, std::size_t node,
                    std::vector<std::size_t>& out) {
  std::vector<std::size_t> stack{node};
  while (!stack.empty()) {
    const std::size_t cur = stack.back();
    stack.pop_back();
    if (cur < n) {
      out.push_back(cur);
    } else {
      stack.push_back(merges[cur - n].right);
      stack.push_back(merges[cur - n].left);
    }
  }
}

}  // namespace

std::vector<SoftmaxScore> DetectionCluster::softmaxes() const {
  std::vector<SoftmaxScore> out;
  out.reserve(members.size());
  for (const auto& m : members) out.push_back(m.score);
  return out;
}

std::vector<BoundingBox> DetectionCluster::boxes() const {
  std::vector<BoundingBox> out;
  out.reserve(members.size());
  for (const auto& m : members) out.push_back(m.box);
  return out;
}

Feature feature_vector(const Detection& detection) {
  return {detection.box.x1, detection.box.y1, detection.box.x2, detection.box.y2};
}

double euclidean(const Feature& a, const Feature& b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return std::sqrt(sum);
}

double core_distance(const Feature& p, std::span<const Feature> all, int k) {
  if (k < 1 || static_cast<std::size_t>(k) > all.size()) {
    throw std::invalid_argument("core distance needs 1 <= k <= number of points");
  }
  std::vector<double> dist;
  dist.reserve(all.size());
  for (const auto& q : all) dist.push_back(euclidean(p, q));
  auto kth = dist.begin() + (k - 1);
  std::nth_element(dist.begin(), kth, dist.end());
  return *kth;
}

double mutual_reachability(const Feature& a, const Feature& b, std::span<const Feature> all, int k) {
  return std::max({core_distance(a, all, k), core_distance(b, all, k), euclidean(a, b)});
}

std::vector<double> core_distances(std::span<const Feature> points, int k) {
  std::vector<double> core(points.size());
  std::vector<double> dist(points.size());
  if (points.empty()) return core;
  if (k < 1 || static_cast<std::size_t>(k) > points.size()) {
    throw std::invalid_argument("core distance needs 1 <= k <= number of points");
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = 0; j < points.size(); ++j) dist[j] = euclidean(points[i], points[j]);
    auto kth = dist.begin() + (k - 1);
    std::nth_element(dist.begin(), kth, dist.end());
    core[i] = *kth;
  }
  return core;
}

std::vector<MstEdge> minimum_spanning_tree(std::span<const Feature> points,
                                           std::span<const double> core) {
  const std::size_t n = points.size();
  std::vector<MstEdge> mst;
  if (n < 2) return mst;
  mst.reserve(n - 1);

  std::vector<bool> in_tree(n, false);
  std::vector<double> key(n, kInf);
  std::vector<std::size_t> link(n, 0);
  std::size_t current = 0;
  in_tree[0] = true;
  for (std::size_t step = 1; step < n; ++step) {
    std::size_t best = n;
    for (std::size_t v = 0; v < n; ++v) {
      if (in_tree[v]) continue;
      const double w =
          std::max({core[current], core[v], euclidean(points[current], points[v])});
      if (w < key[v]) {
        key[v] = w;
        link[v] = current;
      }
      if (best == n || key[v] < key[best]) best = v;
    }
    in_tree[best] = true;
    mst.push_back(MstEdge{link[best], best, key[best]});
    current = best;
  }
  return mst;
}

CondensedTree condense_tree(std::span<const MstEdge> mst, std::size_t n_points,
                            int min_cluster_size) {
  CondensedTree tree;
  tree.n_points = n_points;
  if (n_points < 2) return tree;

  const auto merges = single_linkage(mst, n_points);
  const std::size_t total_nodes = 2 * n_points - 1;
  const std::size_t root = total_nodes - 1;
  const auto mcs = static_cast<std::size_t>(std::max(min_cluster_size, 1));

  std::vector<std::size_t> relabel(total_nodes, 0);
  relabel[root] = n_points;
  std::size_t next_label = n_points + 1;

  std::vector<bool> ignored(total_nodes, false);
  std::deque<std::size_t> queue{root};
  std::vector<std::size_t> leaves;

  auto fall_out = [&](std::size_t parent_label, std::size_t node, double lambda) {
    leaves.clear();
    collect_leaves(merges, n_points, node, leaves);
    for (std::size_t leaf : leaves) {
      tree.edges.push_back(CondensedEdge{parent_label, leaf, lambda, 1});
    }
    // Mark the whole subtree handled.
    std::vector<std::size_t> stack{node};
    while (!stack.empty()) {
      const std::size_t cur = stack.back();
      stack.pop_back();
      ignored[cur] = true;
      if (cur >= n_points) {
        stack.push_back(merges[cur - n_points].left);
        stack.push_back(merges[cur - n_points].right);
      }
    }
  };

  while (!queue.empty()) {
    const std::size_t node = queue.front();
    queue.pop_front();
    if (node < n_points || ignored[node]) continue;

    const Merge& m = merges[node - n_points];
    const double lambda = m.distance > 0.0 ? 1.0 / m.distance : kInf;
    const std::size_t left_size = node_size(merges, n_points, m.left);
    const std::size_t right_size = node_size(merges, n_points, m.right);
    const std::size_t label = relabel[node];

    if (m.distance == 0.0) {
      fall_out(label, node, kInf);
    } else if (left_size >= mcs && right_size >= mcs) {
      relabel[m.left] = next_label++;
      tree.edges.push_back(CondensedEdge{label, relabel[m.left], lambda, left_size});
      relabel[m.right] = next_label++;
      tree.edges.push_back(CondensedEdge{label, relabel[m.right], lambda, right_size});
      queue.push_back(m.left);
      queue.push_back(m.right);
    } else if (left_size < mcs && right_size < mcs) {
      fall_out(label, m.left, lambda);
      fall_out(label, m.right, lambda);
    } else if (left_size < mcs) {
      relabel[m.right] = label;
      fall_out(label, m.left, lambda);
      queue.push_back(m.right);
    } else {
      relabel[m.left] = label;
      fall_out(label, m.right, lambda);
      queue.push_back(m.left);
    }
  }
  return tree;
}

std::vector<double> cluster_stabilities(const CondensedTree& tree) {
  const std::size_t n = tree.n_points;
  std::size_t max_id = n;
  for (const auto& e : tree.edges) max_id = std::max({max_id, e.parent, e.child});
  const std::size_t n_clusters = max_id - n + 1;

  std::vector<double> birth(n_clusters, 0.0);
  for (const auto& e : tree.edges) {
    if (e.child >= n) birth[e.child - n] = e.lambda;
  }
  std::vector<double> stability(n_clusters, 0.0);
  for (const auto& e : tree.edges) {
    stability[e.parent - n] +=
        (e.lambda - birth[e.parent - n]) * static_cast<double>(e.child_size);
  }
  return stability;
}

std::vector<int> extract_labels(const CondensedTree& tree) {
  const std::size_t n = tree.n_points;
  std::vector<int> labels(n, -1);
  if (tree.edges.empty()) return labels;

  auto stability = cluster_stabilities(tree);
  const std::size_t n_clusters = stability.size();

  std::vector<std::size_t> cluster_parent(n_clusters, 0);
  std::vector<std::vector<std::size_t>> children(n_clusters);
  std::vector<std::size_t> point_parent(n, 0);
  for (const auto& e : tree.edges) {
    if (e.child >= n) {
      cluster_parent[e.child - n] = e.parent - n;
      children[e.parent - n].push_back(e.child - n);
    } else {
      point_parent[e.child] = e.parent - n;
    }
  }

  // Child ids always exceed their parent's, so a descending sweep is bottom-up.
  std::vector<bool> selected(n_clusters, true);
  for (std::size_t c = n_clusters; c-- > 0;) {
    double subtree = 0.0;
    for (std::size_t child : children[c]) subtree += stability[child];
    if (!children[c].empty() && subtree > stability[c]) {
      selected[c] = false;
      stability[c] = subtree;
    } else {
      std::vector<std::size_t> stack(children[c].begin(), children[c].end());
      while (!stack.empty()) {
        const std::size_t d = stack.back();
        stack.pop_back();
        selected[d] = false;
        stack.insert(stack.end(), children[d].begin(), children[d].end());
      }
    }
  }

  std::vector<int> raw(n, -1);
  for (std::size_t p = 0; p < n; ++p) {
    std::size_t c = point_parent[p];
    while (true) {
      if (selected[c]) {
        raw[p] = static_cast<int>(c);
        break;
      }
      if (c == 0) break;
      c = cluster_parent[c];
    }
  }

  // Renumber by first appearance.
  std::vector<int> remap(n_clusters, -1);
  int next = 0;
  for (std::size_t p = 0; p < n; ++p) {
    if (raw[p] < 0) continue;
    auto& slot = remap[static_cast<std::size_t>(raw[p])];
    if (slot < 0) slot = next++;
    labels[p] = slot;
  }
  return labels;
}

std::vector<int> hdbscan(std::span<const Feature> points, const ClusterParams& params) {
  const std::size_t n = points.size();
  const auto mcs = static_cast<std::size_t>(std::max(params.min_cluster_size, 1));
  if (n == 0) return {};
  if (n < mcs || n < 2) return std::vector<int>(n, -1);

  const int k = std::min(std::max(params.min_samples, 1), static_cast<int>(n));
  const auto core = core_distances(points, k);
  const auto mst = minimum_spanning_tree(points, core);
  const auto tree = condense_tree(mst, n, params.min_cluster_size);
  return extract_labels(tree);
}

ClusteringResult cluster_detections(const PredictionDump& dump, const ClusterParams& params) {
  std::vector<Feature> features;
  features.reserve(dump.detections.size());
  for (const auto& d : dump.detections) features.push_back(feature_vector(d));

  const auto labels = hdbscan(features, params);
  ClusteringResult result;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0) {
      result.noise.push_back(dump.detections[i]);
      result.noise_indices.push_back(i);
      continue;
    }
    const auto slot = static_cast<std::size_t>(labels[i]);
    if (slot >= result.clusters.size()) result.clusters.resize(slot + 1);
    result.clusters[slot].members.push_back(dump.detections[i]);
    result.clusters[slot].source_indices.push_back(i);
  }
  return result;
}

}  // namespace uqod::clustering
