#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "uqod/clustering.hpp"

namespace uqod::accuracy {

inline constexpr double kDefaultIouThreshold = 0.5;

/// One prediction collapsed from a cluster of stochastic detections.
struct ConsensusDetection {
  BoundingBox box;
  SoftmaxScore score;
  int label = 0;
  double confidence = 0.0;
};

struct MatchPair {
  std::size_t detection = 0;
  std::size_t ground_truth = 0;
  double iou = 0.0;
};

struct MatchResult {
  std::vector<MatchPair> pairs;
  std::vector<std::size_t> unmatched_detections;
  std::vector<std::size_t> unmatched_ground_truth;
};

/// Detections and annotation of one image.
struct ImageScope {
  std::vector<ConsensusDetection> detections;
  GroundTruthAnnotation annotation;
};

struct PrecisionRecallPoint {
  double threshold = 0.0;
  double precision = 0.0;
  double recall = 0.0;
};

/// Which predictions feed the accuracy metrics.
enum class MapSource {
  Consensus,  ///< one prediction per cluster
  FirstPass,  ///< the raw detections of pass 0
};

/// Coordinate-wise mean box, renormalized mean softmax, argmax label.
ConsensusDetection consensus(const clustering::DetectionCluster& cluster);

/// A single detection taken as its own prediction.
ConsensusDetection as_prediction(const Detection& detection);

/// Greedy matching in descending confidence (ties by index). Each detection
/// claims the unmatched ground truth of the same label with the highest
/// IoU, provided IoU >= t.
MatchResult match(std::span<const ConsensusDetection> detections,
                  const GroundTruthAnnotation& ground_truth, double t = kDefaultIouThreshold);

/// Precision and recall at each distinct confidence threshold, high to low.
/// Empty when the class has no ground truth in scope.
std::vector<PrecisionRecallPoint> precision_recall_curve(std::span<const ImageScope> scope,
                                                         int class_id,
                                                         double t = kDefaultIouThreshold);

/// All-point interpolated AP (area under the monotone precision envelope).
/// std::nullopt when the class has no ground truth in scope.
std::optional<double> average_precision(std::span<const ImageScope> scope, int class_id,
                                        double t = kDefaultIouThreshold);

/// Mean AP over the classes that have ground truth in scope.
/// Throws std::domain_error("empty ground truth") when no class does.
double mean_average_precision(std::span<const ImageScope> scope, double t = kDefaultIouThreshold);

/// Predictions of one image for the chosen source.
std::vector<ConsensusDetection> predictions(const PredictionDump& dump,
                                            const clustering::ClusteringResult& clustering,
                                            MapSource source);

}  // namespace uqod::accuracy
