#include "uqod/types.hpp"

#include <cmath>
#include <sstream>

namespace uqod {

namespace {

constexpr double kSoftmaxSumTolerance = 1e-6;

void add(ValidationResult& result, ViolationKind kind, long index, const std::string& message) {
  result.violations.push_back(Violation{kind, index, message});
}

void check_box(ValidationResult& result, const BoundingBox& box, long index) {
  if (!std::isfinite(box.x1) || !std::isfinite(box.y1) || !std::isfinite(box.x2) ||
      !std::isfinite(box.y2)) {
    add(result, ViolationKind::NonFiniteBox, index, "non-finite box coordinate");
  } else if (!(box.x1 < box.x2) || !(box.y1 < box.y2)) {
    add(result, ViolationKind::DegenerateBox, index, "degenerate box");
  }
}

}  // namespace

bool is_valid_box(const BoundingBox& box) {
  return std::isfinite(box.x1) && std::isfinite(box.y1) && std::isfinite(box.x2) &&
         std::isfinite(box.y2) && box.x1 < box.x2 && box.y1 < box.y2;
}

ValidationResult validate_dump(const PredictionDump& dump) {
  ValidationResult result;
  if (dump.passes < 1) {
    add(result, ViolationKind::BadPassCount, -1, "T must be >= 1");
  }
  if (!(dump.dropout_rate > 0.0 && dump.dropout_rate < 1.0)) {
    add(result, ViolationKind::BadDropoutRate, -1, "dropout_rate must lie in (0, 1)");
  }

  const std::size_t nc =
      dump.detections.empty() ? 0 : dump.detections.front().score.class_count();
  for (std::size_t i = 0; i < dump.detections.size(); ++i) {
    const auto& det = dump.detections[i];
    const long index = static_cast<long>(i);
    if (det.pass_index < 0 || det.pass_index >= dump.passes) {
      std::ostringstream msg;
      msg << "pass_index " << det.pass_index << " outside [0, " << dump.passes << ")";
      add(result, ViolationKind::BadPassIndex, index, msg.str());
    }
    check_box(result, det.box, index);

    const auto& probs = det.score.probabilities;
    if (probs.size() < 2 || probs.size() != nc) {
      add(result, ViolationKind::SoftmaxLength, index, "softmax length mismatch");
      continue;
    }
    double sum = 0.0;
    bool in_range = true;
    for (double p : probs) {
      if (!std::isfinite(p) || p < 0.0 || p > 1.0) in_range = false;
      sum += p;
    }
    if (!in_range) {
      add(result, ViolationKind::SoftmaxRange, index, "softmax entry outside [0, 1]");
    }
    if (!(std::fabs(sum - 1.0) <= kSoftmaxSumTolerance)) {
      add(result, ViolationKind::SoftmaxSum, index, "softmax sum != 1");
    }
  }
  return result;
}

ValidationResult validate_annotation(const GroundTruthAnnotation& annotation, int class_count) {
  ValidationResult result;
  for (std::size_t i = 0; i < annotation.objects.size(); ++i) {
    const auto& obj = annotation.objects[i];
    if (obj.label < 0 || obj.label >= class_count) {
      add(result, ViolationKind::BadLabel, static_cast<long>(i), "label outside class range");
    }
    check_box(result, obj.box, static_cast<long>(i));
  }
  return result;
}

int predicted_label(const SoftmaxScore& score) {
  int best = 0;
  for (std::size_t c = 1; c < score.probabilities.size(); ++c) {
    if (score.probabilities[c] > score.probabilities[static_cast<std::size_t>(best)]) {
      best = static_cast<int>(c);
    }
  }
  return best;
}

std::string to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::BadPassCount: return "bad_pass_count";
    case ViolationKind::BadDropoutRate: return "bad_dropout_rate";
    case ViolationKind::BadPassIndex: return "bad_pass_index";
    case ViolationKind::SoftmaxLength: return "softmax_length";
    case ViolationKind::SoftmaxRange: return "softmax_range";
    case ViolationKind::SoftmaxSum: return "softmax_sum";
    case ViolationKind::DegenerateBox: return "degenerate_box";
    case ViolationKind::NonFiniteBox: return "non_finite_box";
    case ViolationKind::BadLabel: return "bad_label";
  }
  return "unknown";
}

}  // namespace uqod
