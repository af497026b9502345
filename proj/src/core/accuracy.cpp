#include "uqod/accuracy.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <stdexcept>

#include "uqod/geometry.hpp"

namespace uqod::accuracy {

namespace {

template <typename Get>
double anchored_mean(std::size_t count, Get get) {
  const double anchor = get(0);
  double offset = 0.0;
  for (std::size_t k = 1; k < count; ++k) offset += get(k) - anchor;
  return anchor + offset / static_cast<double>(count);
}

ConsensusDetection finish(BoundingBox box, std::vector<double> probs) {
  double sum = 0.0;
  for (double p : probs) sum += p;
  if (sum > 0.0 && sum != 1.0) {
    for (double& p : probs) p /= sum;
  }
  ConsensusDetection out;
  out.box = box;
  out.score.probabilities = std::move(probs);
  out.label = predicted_label(out.score);
  out.confidence = out.score.probabilities.empty()
                       ? 0.0
                       : out.score.probabilities[static_cast<std::size_t>(out.label)];
  return out;
}

std::vector<std::size_t> confidence_order(std::span<const ConsensusDetection> detections) {
  std::vector<std::size_t> order(detections.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return detections[a].confidence > detections[b].confidence;
  });
  return order;
}

struct ScoredDetection {
  double confidence = 0.0;
  bool true_positive = false;
};

}  // namespace

ConsensusDetection consensus(const clustering::DetectionCluster& cluster) {
  const auto& m = cluster.members;
  if (m.empty()) return {};
  BoundingBox box;
  box.x1 = anchored_mean(m.size(), [&](std::size_t k) { return m[k].box.x1; });
  box.y1 = anchored_mean(m.size(), [&](std::size_t k) { return m[k].box.y1; });
  box.x2 = anchored_mean(m.size(), [&](std::size_t k) { return m[k].box.x2; });
  box.y2 = anchored_mean(m.size(), [&](std::size_t k) { return m[k].box.y2; });

  const std::size_t nc = m.front().score.class_count();
  std::vector<double> probs(nc);
  for (std::size_t c = 0; c < nc; ++c) {
    probs[c] = anchored_mean(m.size(), [&](std::size_t k) { return m[k].score.probabilities[c]; });
  }
  return finish(box, std::move(probs));
}

ConsensusDetection as_prediction(const Detection& detection) {
  return finish(detection.box, detection.score.probabilities);
}

MatchResult match(std::span<const ConsensusDetection> detections,
                  const GroundTruthAnnotation& ground_truth, double t) {
  MatchResult result;
  std::vector<bool> taken(ground_truth.objects.size(), false);
  for (std::size_t d : confidence_order(detections)) {
    const auto& det = detections[d];
    std::size_t best = ground_truth.objects.size();
    double best_iou = -1.0;
    for (std::size_t g = 0; g < ground_truth.objects.size(); ++g) {
      const auto& gt = ground_truth.objects[g];
      if (taken[g] || gt.label != det.label) continue;
      const double v = geometry::iou(det.box, gt.box);
      if (v > best_iou) {
        best_iou = v;
        best = g;
      }
    }
    if (best < ground_truth.objects.size() && best_iou >= t) {
      taken[best] = true;
      result.pairs.push_back(MatchPair{d, best, best_iou});
    } else {
      result.unmatched_detections.push_back(d);
    }
  }
  std::sort(result.unmatched_detections.begin(), result.unmatched_detections.end());
  for (std::size_t g = 0; g < taken.size(); ++g) {
    if (!taken[g]) result.unmatched_ground_truth.push_back(g);
  }
  return result;
}

std::vector<PrecisionRecallPoint> precision_recall_curve(std::span<const ImageScope> scope,
                                                         int class_id, double t) {
  std::size_t gt_count = 0;
  std::vector<ScoredDetection> scored;
  for (const auto& image : scope) {
    GroundTruthAnnotation class_gt{image.annotation.image_id, {}};
    for (const auto& obj : image.annotation.objects) {
      if (obj.label == class_id) class_gt.objects.push_back(obj);
    }
    gt_count += class_gt.objects.size();

    std::vector<ConsensusDetection> class_dets;
    for (const auto& det : image.detections) {
      if (det.label == class_id) class_dets.push_back(det);
    }
    const auto matched = match(class_dets, class_gt, t);
    std::vector<bool> tp(class_dets.size(), false);
    for (const auto& p : matched.pairs) tp[p.detection] = true;
    for (std::size_t i = 0; i < class_dets.size(); ++i) {
      scored.push_back(ScoredDetection{class_dets[i].confidence, tp[i]});
    }
  }
  if (gt_count == 0) return {};

  std::stable_sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    return a.confidence > b.confidence;
  });

  std::vector<PrecisionRecallPoint> curve;
  std::size_t tp = 0;
  for (std::size_t i = 0; i < scored.size(); ++i) {
    if (scored[i].true_positive) ++tp;
    // Detections sharing a confidence enter together.
    if (i + 1 < scored.size() && scored[i + 1].confidence == scored[i].confidence) continue;
    const auto detected = static_cast<double>(i + 1);
    curve.push_back(PrecisionRecallPoint{scored[i].confidence, static_cast<double>(tp) / detected,
                                         static_cast<double>(tp) / static_cast<double>(gt_count)});
  }
  return curve;
}

std::optional<double> average_precision(std::span<const ImageScope> scope, int class_id,
                                        double t) {
  bool has_gt = false;
  for (const auto& image : scope) {
    for (const auto& obj : image.annotation.objects) has_gt = has_gt || obj.label == class_id;
  }
  if (!has_gt) return std::nullopt;

  const auto curve = precision_recall_curve(scope, class_id, t);
  std::vector<double> envelope(curve.size());
  double running = 0.0;
  for (std::size_t i = curve.size(); i-- > 0;) {
    running = std::max(running, curve[i].precision);
    envelope[i] = running;
  }
  double ap = 0.0;
  double prev_recall = 0.0;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    ap += (curve[i].recall - prev_recall) * envelope[i];
    prev_recall = curve[i].recall;
  }
  return std::clamp(ap, 0.0, 1.0);
}

double mean_average_precision(std::span<const ImageScope> scope, double t) {
  std::set<int> classes;
  for (const auto& image : scope) {
    for (const auto& obj : image.annotation.objects) classes.insert(obj.label);
  }
  if (classes.empty()) throw std::domain_error("empty ground truth");
  double sum = 0.0;
  for (int c : classes) sum += *average_precision(scope, c, t);
  return sum / static_cast<double>(classes.size());
}

std::vector<ConsensusDetection> predictions(const PredictionDump& dump,
                                            const clustering::ClusteringResult& clustering,
                                            MapSource source) {
  std::vector<ConsensusDetection> out;
  if (source == MapSource::Consensus) {
    out.reserve(clustering.clusters.size());
    for (const auto& c : clustering.clusters) out.push_back(consensus(c));
  } else {
    for (const auto& d : dump.detections) {
      if (d.pass_index == 0) out.push_back(as_prediction(d));
    }
  }
  return out;
}

}  // namespace uqod::accuracy
