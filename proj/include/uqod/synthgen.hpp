#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "uqod/types.hpp"

namespace uqod::synth {

/// Extra noise applied to adversarial variants. Both zero means the
/// variants are exact copies of the original passes.
struct AdversarialDegradation {
  double extra_jitter = 0.0;
  double extra_flip = 0.0;
};

struct SynthConfig {
  std::string dataset_name = "synthetic";
  std::size_t n_images = 10;
  int min_objects = 1;
  int max_objects = 3;
  int passes = kReferencePassCount;
  /// Per-coordinate Gaussian sigma in pixels.
  double box_jitter_sigma = 0.0;
  double label_flip_prob = 0.0;
  /// 0 gives one-hot softmax vectors.
  double softmax_temperature = 0.0;
  /// Standard deviation of the per-pass logit perturbation.
  double logit_noise = 0.25;
  double detect_drop_prob = 0.0;
  AdversarialDegradation adversarial;
  std::size_t n_adversarial = kDefaultAdversarialCount;
  std::uint64_t rng_seed = 0;
  double dropout_rate = 0.3;
  int class_count = kReferenceClassCount;
  double image_width = 1024.0;
  double image_height = 768.0;
  double min_box_size = 40.0;
  double max_box_size = 160.0;
};

struct SynthOutput {
  DatasetManifest manifest;
  /// Originals first, then the adversarial variants, in manifest order.
  std::vector<PredictionDump> dumps;
};

/// Problems with the configuration; empty when it is usable.
std::vector<std::string> validate_config(const SynthConfig& config);

/// Deterministic for a given config. Each image draws from its own streams
/// derived from (rng_seed, image index, variant), so images are independent
/// of one another and of the generation order.
/// Throws std::invalid_argument when validate_config reports problems.
SynthOutput generate(const SynthConfig& config);

std::string original_id(std::size_t image);
std::string adversarial_id(std::size_t image, std::size_t variant);

}  // namespace uqod::synth
