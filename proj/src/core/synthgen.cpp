#include "uqod/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "uqod/random.hpp"

namespace uqod::synth {

namespace {

constexpr std::uint64_t kLayoutStream = 0xFFFFFFFFULL;
constexpr int kPlacementAttempts = 200;

struct NoiseLevel {
  double jitter = 0.0;
  double flip = 0.0;
};

bool overlaps_with_margin(const BoundingBox& a, const BoundingBox& b, double margin) {
  return a.x1 - margin < b.x2 && b.x1 - margin < a.x2 && a.y1 - margin < b.y2 &&
         b.y1 - margin < a.y2;
}

GroundTruthAnnotation place_objects(const SynthConfig& cfg, std::size_t image) {
  Rng rng(Rng::derive(cfg.rng_seed, image, kLayoutStream));
  GroundTruthAnnotation gt;
  gt.image_id = original_id(image);

  const auto span = static_cast<std::uint64_t>(cfg.max_objects - cfg.min_objects + 1);
  const int wanted = cfg.min_objects + static_cast<int>(rng.below(span));
  // The last class is background and never annotated.
  const auto labelled = static_cast<std::uint64_t>(std::max(cfg.class_count - 1, 1));
  const double margin = cfg.max_box_size / 4.0;

  for (int obj = 0; obj < wanted; ++obj) {
    for (int attempt = 0; attempt < kPlacementAttempts; ++attempt) {
      const double w = rng.uniform(cfg.min_box_size, cfg.max_box_size);
      const double h = rng.uniform(cfg.min_box_size, cfg.max_box_size);
      const double x = rng.uniform(0.0, std::max(cfg.image_width - w, 0.0));
      const double y = rng.uniform(0.0, std::max(cfg.image_height - h, 0.0));
      const BoundingBox box{x, y, x + w, y + h};
      const bool clash = std::any_of(gt.objects.begin(), gt.objects.end(), [&](const auto& o) {
        return overlaps_with_margin(o.box, box, margin);
      });
      if (clash) continue;
      gt.objects.push_back(GroundTruthObject{static_cast<int>(rng.below(labelled)), box});
      break;
    }
  }
  return gt;
}

SoftmaxScore make_softmax(const SynthConfig& cfg, int label, Rng& rng) {
  const auto nc = static_cast<std::size_t>(cfg.class_count);
  SoftmaxScore score;
  score.probabilities.assign(nc, 0.0);
  if (cfg.softmax_temperature <= 0.0) {
    score.probabilities[static_cast<std::size_t>(label)] = 1.0;
    return score;
  }
  std::vector<double> z(nc);
  for (std::size_t c = 0; c < nc; ++c) {
    z[c] = (static_cast<int>(c) == label ? 1.0 : 0.0) + cfg.logit_noise * rng.normal();
    z[c] /= cfg.softmax_temperature;
  }
  const double top = *std::max_element(z.begin(), z.end());
  double sum = 0.0;
  for (std::size_t c = 0; c < nc; ++c) {
    score.probabilities[c] = std::exp(z[c] - top);
    sum += score.probabilities[c];
  }
  for (double& p : score.probabilities) p /= sum;
  return score;
}

BoundingBox jitter_box(const BoundingBox& box, double sigma, Rng& rng) {
  if (sigma <= 0.0) return box;
  double x1 = box.x1 + sigma * rng.normal();
  double y1 = box.y1 + sigma * rng.normal();
  double x2 = box.x2 + sigma * rng.normal();
  double y2 = box.y2 + sigma * rng.normal();
  if (x1 > x2) std::swap(x1, x2);
  if (y1 > y2) std::swap(y1, y2);
  return BoundingBox{x1, y1, x2, y2};
}

PredictionDump sample_passes(const SynthConfig& cfg, const GroundTruthAnnotation& gt,
                             const std::string& id, NoiseLevel noise, std::uint64_t seed) {
  Rng rng(seed);
  PredictionDump dump;
  dump.image_id = id;
  dump.passes = cfg.passes;
  dump.dropout_rate = cfg.dropout_rate;
  for (int pass = 0; pass < cfg.passes; ++pass) {
    for (const auto& obj : gt.objects) {
      if (cfg.detect_drop_prob > 0.0 && rng.bernoulli(cfg.detect_drop_prob)) continue;
      int label = obj.label;
      if (noise.flip > 0.0 && cfg.class_count > 1 && rng.bernoulli(noise.flip)) {
        const int other = static_cast<int>(rng.below(static_cast<std::uint64_t>(cfg.class_count - 1)));
        label = other >= obj.label ? other + 1 : other;
      }
      Detection det;
      det.box = jitter_box(obj.box, noise.jitter, rng);
      // Coinciding jittered coordinates would leave a degenerate box.
      if (!(det.box.x1 < det.box.x2)) det.box.x2 = std::nextafter(det.box.x1, INFINITY);
      if (!(det.box.y1 < det.box.y2)) det.box.y2 = std::nextafter(det.box.y1, INFINITY);
      det.score = make_softmax(cfg, label, rng);
      det.pass_index = pass;
      dump.detections.push_back(std::move(det));
    }
  }
  return dump;
}

}  // namespace

std::string original_id(std::size_t image) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "img_%04zu", image);
  return buf;
}

std::string adversarial_id(std::size_t image, std::size_t variant) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "img_%04zu_adv%02zu", image, variant);
  return buf;
}

std::vector<std::string> validate_config(const SynthConfig& cfg) {
  std::vector<std::string> problems;
  const auto prob = [&](double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0)) problems.push_back(std::string(name) + " must lie in [0, 1]");
  };
  prob(cfg.label_flip_prob, "label_flip_prob");
  prob(cfg.detect_drop_prob, "detect_drop_prob");
  prob(cfg.adversarial.extra_flip, "adversarial.extra_flip");
  if (!(cfg.box_jitter_sigma >= 0.0)) problems.push_back("box_jitter_sigma must be >= 0");
  if (!(cfg.adversarial.extra_jitter >= 0.0)) problems.push_back("adversarial.extra_jitter must be >= 0");
  if (!(cfg.softmax_temperature >= 0.0)) problems.push_back("softmax_temperature must be >= 0");
  if (!(cfg.logit_noise >= 0.0)) problems.push_back("logit_noise must be >= 0");
  if (cfg.passes < 1) problems.push_back("T must be >= 1");
  if (cfg.min_objects < 0 || cfg.max_objects < cfg.min_objects) {
    problems.push_back("objects_per_image must be a non-empty range of non-negative counts");
  }
  if (cfg.class_count < 2) problems.push_back("class_count must be >= 2");
  if (!(cfg.dropout_rate > 0.0 && cfg.dropout_rate < 1.0)) {
    problems.push_back("dropout_rate must lie in (0, 1)");
  }
  if (!(cfg.min_box_size > 0.0 && cfg.max_box_size >= cfg.min_box_size)) {
    problems.push_back("box size range is invalid");
  }
  if (!(cfg.image_width >= cfg.max_box_size && cfg.image_height >= cfg.max_box_size)) {
    problems.push_back("image must be at least as large as the biggest box");
  }
  return problems;
}

SynthOutput generate(const SynthConfig& cfg) {
  const auto problems = validate_config(cfg);
  if (!problems.empty()) throw std::invalid_argument("invalid synth config: " + problems.front());

  const bool mirror = cfg.adversarial.extra_jitter == 0.0 && cfg.adversarial.extra_flip == 0.0;
  const NoiseLevel base{cfg.box_jitter_sigma, cfg.label_flip_prob};
  const NoiseLevel degraded{cfg.box_jitter_sigma + cfg.adversarial.extra_jitter,
                            std::min(1.0, cfg.label_flip_prob + cfg.adversarial.extra_flip)};

  SynthOutput out;
  out.manifest.name = cfg.dataset_name;
  std::vector<PredictionDump> adversarial;
  for (std::size_t i = 0; i < cfg.n_images; ++i) {
    ManifestEntry entry;
    entry.original = original_id(i);
    entry.annotation = place_objects(cfg, i);

    auto original =
        sample_passes(cfg, entry.annotation, entry.original, base, Rng::derive(cfg.rng_seed, i, 0));
    for (std::size_t v = 0; v < cfg.n_adversarial; ++v) {
      const auto id = adversarial_id(i, v);
      entry.adversarial.push_back(id);
      if (mirror) {
        auto copy = original;
        copy.image_id = id;
        adversarial.push_back(std::move(copy));
      } else {
        adversarial.push_back(sample_passes(cfg, entry.annotation, id, degraded,
                                            Rng::derive(cfg.rng_seed, i, v + 1)));
      }
    }
    out.dumps.push_back(std::move(original));
    out.manifest.entries.push_back(std::move(entry));
  }
  out.dumps.insert(out.dumps.end(), std::make_move_iterator(adversarial.begin()),
                   std::make_move_iterator(adversarial.end()));
  return out;
}

}  // namespace uqod::synth
