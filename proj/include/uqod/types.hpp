#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace uqod {

/// Class ids of the reference configuration. Any nc is accepted; these are
/// just the names used by reports.
enum class ReferenceClass : int { Sticker = 0, Logo = 1, Background = 2 };

inline constexpr int kReferenceClassCount = 3;
inline constexpr int kReferencePassCount = 20;
inline constexpr std::size_t kDefaultAdversarialCount = 10;

/// Axis-aligned box in pixel coordinates, stored as given.
struct BoundingBox {
  double x1 = 0.0;
  double y1 = 0.0;
  double x2 = 0.0;
  double y2 = 0.0;

  double width() const { return x2 - x1; }
  double height() const { return y2 - y1; }
  double area() const { return width() * height(); }

  bool operator==(const BoundingBox&) const = default;
};

/// Per-class probabilities of one detection. Length is nc.
struct SoftmaxScore {
  std::vector<double> probabilities;

  std::size_t class_count() const { return probabilities.size(); }
  bool operator==(const SoftmaxScore&) const = default;
};

struct Detection {
  BoundingBox box;
  SoftmaxScore score;
  int pass_index = 0;

  bool operator==(const Detection&) const = default;
};

/// All T stochastic passes for one image.
struct PredictionDump {
  std::string image_id;
  int passes = kReferencePassCount;
  double dropout_rate = 0.5;
  std::vector<Detection> detections;

  bool operator==(const PredictionDump&) const = default;
};

struct GroundTruthObject {
  int label = 0;
  BoundingBox box;

  bool operator==(const GroundTruthObject&) const = default;
};

struct GroundTruthAnnotation {
  std::string image_id;
  std::vector<GroundTruthObject> objects;

  bool operator==(const GroundTruthAnnotation&) const = default;
};

struct ManifestEntry {
  std::string original;
  std::vector<std::string> adversarial;
  GroundTruthAnnotation annotation;

  bool operator==(const ManifestEntry&) const = default;
};

struct DatasetManifest {
  std::string name;
  std::vector<ManifestEntry> entries;

  bool operator==(const DatasetManifest&) const = default;
};

/// Metric row for one image. Absent values mean "undefined" (no ground truth
/// for mAP, no clusters for the uncertainty metrics).
struct ImageMetrics {
  std::optional<double> map;
  std::optional<double> vr;
  std::optional<double> se;
  std::optional<double> mi;
  std::optional<double> tv;
  std::optional<double> ps;

  bool operator==(const ImageMetrics&) const = default;
};

/// One (model, dataset, dropout-rate) cell.
struct EvaluationRun {
  std::string model_id;
  std::string dataset_id;
  double dropout_rate = 0.0;
  std::map<std::string, ImageMetrics> per_image;

  bool operator==(const EvaluationRun&) const = default;
};

enum class ViolationKind {
  BadPassCount,
  BadDropoutRate,
  BadPassIndex,
  SoftmaxLength,
  SoftmaxRange,
  SoftmaxSum,
  DegenerateBox,
  NonFiniteBox,
  BadLabel,
};

struct Violation {
  ViolationKind kind;
  /// Detection index, or -1 for dump-level violations.
  long detection = -1;
  std::string message;
};

struct ValidationResult {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
};

/// Checks every invariant of the dump; violations are reported, never thrown.
ValidationResult validate_dump(const PredictionDump& dump);

/// Violations of a ground-truth annotation (labels must lie in [0, nc)).
ValidationResult validate_annotation(const GroundTruthAnnotation& annotation,
                                     int class_count = kReferenceClassCount);

bool is_valid_box(const BoundingBox& box);

/// Index of the maximum probability; ties resolve to the lowest index.
int predicted_label(const SoftmaxScore& score);

std::string to_string(ViolationKind kind);

}  // namespace uqod
