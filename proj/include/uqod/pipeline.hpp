#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "uqod/accuracy.hpp"
#include "uqod/clustering.hpp"
#include "uqod/robustness.hpp"
#include "uqod/types.hpp"
#include "uqod/uq_metrics.hpp"

namespace uqod::pipeline {

enum class ExitCode : int { Ok = 0, Failure = 1, Schema = 2, Empty = 3, Mismatch = 4 };

class PipelineError : public std::runtime_error {
 public:
  PipelineError(ExitCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}
  ExitCode code() const { return code_; }

 private:
  ExitCode code_;
};

enum class UqmNormalization { None, MinMax };

struct RunConfig {
  std::filesystem::path manifest;
  std::filesystem::path dumps;
  std::filesystem::path out;
  double iou_threshold = accuracy::kDefaultIouThreshold;
  clustering::ClusterParams cluster;
  accuracy::MapSource map_source = accuracy::MapSource::Consensus;
  UqmNormalization normalize_uqm = UqmNormalization::None;
  double alpha = 0.05;
  /// Empty: the dumps directory name.
  std::string model_id;
  /// 0: UQOD_THREADS, or the hardware concurrency.
  unsigned threads = 0;
};

struct CompareConfig {
  std::vector<std::filesystem::path> runs;
  double alpha = 0.05;
  std::filesystem::path out;
};

/// Everything computed for one dump.
struct ImageEvaluation {
  std::string image_id;
  std::size_t n_clusters = 0;
  std::size_t n_noise = 0;
  ImageMetrics metrics;
};

struct EvaluationOptions {
  double iou_threshold = accuracy::kDefaultIouThreshold;
  clustering::ClusterParams cluster;
  accuracy::MapSource map_source = accuracy::MapSource::Consensus;
};

/// Clustering, uncertainty and per-image mAP for one dump. `predictions`
/// receives the accuracy inputs when non-null.
ImageEvaluation evaluate_image(const PredictionDump& dump, const GroundTruthAnnotation& truth,
                               const EvaluationOptions& options,
                               std::vector<accuracy::ConsensusDetection>* predictions = nullptr);

struct EvaluateResult {
  EvaluationRun run;
  std::vector<ImageEvaluation> images;
  /// mAP with every image pooled into one scope.
  std::optional<double> dataset_map;
};

/// Per-image robustness scores.
struct ImageRobustness {
  std::string image_id;
  std::size_t n_adversarial = 0;
  robustness::RobustnessReport report;
};

struct RobustnessResult {
  std::vector<ImageRobustness> images;
  robustness::RobustnessReport dataset;
  std::size_t skipped_no_adversarial = 0;
  std::size_t skipped_no_uq = 0;
  std::size_t skipped_no_map = 0;
};

/// Per-image metrics of an original and its adversarial variants.
struct PairedImageMetrics {
  std::string image_id;
  ImageMetrics original;
  std::vector<ImageMetrics> adversarial;
};

/// Robustness scores from already computed metrics; the normalization is
/// applied over every value of the dataset before scoring.
RobustnessResult score_robustness(std::vector<PairedImageMetrics> pairs,
                                  UqmNormalization normalization);

/// Writes per_image.csv, summary.json and run.json into config.out.
EvaluateResult run_evaluate(const RunConfig& config);

/// Writes robustness_per_image.csv and robustness_summary.json.
RobustnessResult run_robustness(const RunConfig& config);

/// Writes comparison.json, pairwise.csv and correlations.csv.
/// `runs` entries may name a run.json file or a directory holding one.
void run_compare(const CompareConfig& config);

/// Comparison of in-memory runs; returns the report as JSON text.
std::string compare_runs(const std::vector<EvaluationRun>& runs, double alpha);

/// Generates a synthetic dataset: manifest.json plus dumps/<id>.json.
void run_synth(const std::filesystem::path& config, const std::filesystem::path& out);

/// Number of worker threads honouring UQOD_THREADS.
unsigned worker_count(unsigned requested);

}  // namespace uqod::pipeline
