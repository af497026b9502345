#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "uqod/accuracy.hpp"

using namespace uqod;
using namespace uqod::accuracy;
using fixture::box;

namespace {

ConsensusDetection pred(const BoundingBox& b, int label, double confidence) {
  ConsensusDetection d;
  d.box = b;
  d.label = label;
  d.confidence = confidence;
  d.score.probabilities.assign(3, (1.0 - confidence) / 2.0);
  d.score.probabilities[static_cast<std::size_t>(label)] = confidence;
  return d;
}

GroundTruthAnnotation truth(std::vector<GroundTruthObject> objects) {
  return GroundTruthAnnotation{"img", std::move(objects)};
}

/// A box against (0, 0, 10, 10) with exactly the requested IoU, by width.
BoundingBox box_with_iou(double target) { return box(0, 0, 10.0 * target, 10); }

}  // namespace

TEST_CASE("consensus of identical members is the member") {
  const auto m = fixture::detection(box(1, 2, 3, 4), fixture::softmax({0.2, 0.7, 0.1}));
  const auto c = consensus(fixture::cluster_of({m, m, m}));
  CHECK(c.box.x1 == 1.0);
  CHECK(c.box.y2 == 4.0);
  CHECK(c.label == 1);
  CHECK(c.confidence == doctest::Approx(0.7));
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(c.score.probabilities[k] == doctest::Approx(m.score.probabilities[k]).epsilon(1e-15));
  }
  const auto hot = fixture::detection(box(1, 2, 3, 4), fixture::onehot(2));
  CHECK(consensus(fixture::cluster_of({hot, hot})).score.probabilities == hot.score.probabilities);
}

TEST_CASE("consensus box is the coordinate mean") {
  const auto c = consensus(fixture::cluster_of({fixture::detection(box(0, 0, 2, 2), fixture::onehot(0)),
                                                fixture::detection(box(2, 2, 4, 4), fixture::onehot(0))}));
  CHECK(c.box.x1 == 1.0);
  CHECK(c.box.y1 == 1.0);
  CHECK(c.box.x2 == 3.0);
  CHECK(c.box.y2 == 3.0);
}

TEST_CASE("consensus label is the argmax of the mean softmax") {
  const auto c = consensus(fixture::cluster_of(
      {fixture::detection(box(0, 0, 1, 1), fixture::softmax({0.8, 0.2, 0.0})),
       fixture::detection(box(0, 0, 1, 1), fixture::softmax({0.6, 0.4, 0.0}))}));
  CHECK(c.label == 0);
  CHECK(c.confidence == doctest::Approx(0.7));
  double total = 0.0;
  for (double p : c.score.probabilities) total += p;
  CHECK(total == doctest::Approx(1.0));
}

TEST_CASE("match: perfect overlap") {
  const std::vector<ConsensusDetection> d{pred(box(0, 0, 10, 10), 0, 0.9)};
  const auto r = match(d, truth({{0, box(0, 0, 10, 10)}}));
  REQUIRE(r.pairs.size() == 1);
  CHECK(r.pairs[0].iou == 1.0);
  CHECK(r.unmatched_detections.empty());
  CHECK(r.unmatched_ground_truth.empty());
}

TEST_CASE("match: wrong label never matches") {
  const std::vector<ConsensusDetection> d{pred(box(0, 0, 10, 10), 1, 0.9)};
  const auto r = match(d, truth({{0, box(0, 0, 10, 10)}}));
  CHECK(r.pairs.empty());
  CHECK(r.unmatched_detections.size() == 1);
  CHECK(r.unmatched_ground_truth.size() == 1);
}

TEST_CASE("match: the more confident detection claims the ground truth") {
  const std::vector<ConsensusDetection> d{pred(box_with_iou(0.7), 0, 0.8), pred(box_with_iou(0.6), 0, 0.9)};
  const auto r = match(d, truth({{0, box(0, 0, 10, 10)}}));
  REQUIRE(r.pairs.size() == 1);
  CHECK(r.pairs[0].detection == 1);
  CHECK(r.pairs[0].iou == doctest::Approx(0.6));
  CHECK(r.unmatched_detections == std::vector<std::size_t>{0});
}

TEST_CASE("match: threshold is inclusive") {
  const std::vector<ConsensusDetection> d{pred(box(0, 0, 5, 10), 0, 0.9)};
  CHECK(match(d, truth({{0, box(0, 0, 10, 10)}}), 0.5).pairs.size() == 1);
  CHECK(match(d, truth({{0, box(0, 0, 10, 10)}}), 0.51).pairs.empty());
}

TEST_CASE("match: each ground truth at most once; picks the highest IoU") {
  const std::vector<ConsensusDetection> d{pred(box(0, 0, 10, 10), 0, 0.9), pred(box(0, 0, 10, 10), 0, 0.8)};
  const auto r = match(d, truth({{0, box(0, 0, 9, 10)}, {0, box(0, 0, 10, 10)}}));
  REQUIRE(r.pairs.size() == 2);
  CHECK(r.pairs[0].detection == 0);
  CHECK(r.pairs[0].ground_truth == 1);
  CHECK(r.pairs[1].ground_truth == 0);
}

TEST_CASE("average precision examples") {
  const auto gt = truth({{0, box(0, 0, 10, 10)}});
  std::vector<ImageScope> scope{{{pred(box(0, 0, 10, 10), 0, 0.9)}, gt}};
  CHECK(average_precision(scope, 0) == 1.0);

  scope[0].detections = {pred(box(0, 0, 3, 10), 0, 0.9)};
  CHECK(average_precision(scope, 0) == 0.0);

  const auto gt2 = truth({{0, box(0, 0, 10, 10)}, {0, box(100, 100, 110, 110)}});
  std::vector<ImageScope> tpfptp{{{pred(box(0, 0, 10, 10), 0, 0.9), pred(box(300, 300, 310, 310), 0, 0.8),
                                   pred(box(100, 100, 110, 110), 0, 0.7)},
                                  gt2}};
  CHECK(*average_precision(tpfptp, 0) == doctest::Approx(0.5 + (2.0 / 3.0) * 0.5));
  CHECK_FALSE(average_precision(tpfptp, 1).has_value());
}

TEST_CASE("precision recall curve groups tied confidences") {
  const auto gt = truth({{0, box(0, 0, 10, 10)}, {0, box(100, 100, 110, 110)}});
  std::vector<ImageScope> scope{{{pred(box(0, 0, 10, 10), 0, 0.8), pred(box(300, 300, 310, 310), 0, 0.8)}, gt}};
  const auto curve = precision_recall_curve(scope, 0);
  REQUIRE(curve.size() == 1);
  CHECK(curve[0].threshold == 0.8);
  CHECK(curve[0].precision == 0.5);
  CHECK(curve[0].recall == 0.5);
  CHECK(precision_recall_curve(scope, 2).empty());
}

TEST_CASE("mean average precision examples") {
  std::vector<ImageScope> scope{{{pred(box(0, 0, 10, 10), 0, 0.9), pred(box(50, 50, 60, 60), 1, 0.9)},
                                 truth({{0, box(0, 0, 10, 10)}, {1, box(50, 50, 60, 60)}})}};
  CHECK(mean_average_precision(scope) == 1.0);
  scope[0].detections[1] = pred(box(500, 500, 510, 510), 1, 0.9);
  CHECK(mean_average_precision(scope) == 0.5);

  std::vector<ImageScope> empty{{{pred(box(0, 0, 10, 10), 0, 0.9)}, truth({})}};
  CHECK_THROWS_WITH_AS(mean_average_precision(empty), "empty ground truth", std::domain_error);
}

TEST_CASE("duplicate detection of a matched object is a false positive") {
  const auto gt = truth({{0, box(0, 0, 10, 10)}});
  std::vector<ImageScope> scope{{{pred(box(0, 0, 10, 10), 0, 0.9), pred(box(0, 0, 10, 10), 0, 0.95)}, gt}};
  const auto curve = precision_recall_curve(scope, 0);
  CHECK(curve.back().precision == 0.5);
  CHECK(*average_precision(scope, 0) == 1.0);
  scope[0].detections[0].confidence = 0.99;
  CHECK(*average_precision(scope, 0) == 1.0);
}

namespace {

ImageScope random_scene(Rng& rng) {
  ImageScope img;
  const auto n_gt = rng.below(6);
  for (std::size_t g = 0; g < n_gt; ++g) {
    const double x = rng.uniform(0, 200);
    const double y = rng.uniform(0, 200);
    img.annotation.objects.push_back({static_cast<int>(rng.below(2)), box(x, y, x + rng.uniform(10, 40), y + rng.uniform(10, 40))});
  }
  const auto n_det = rng.below(11);
  for (std::size_t d = 0; d < n_det; ++d) {
    BoundingBox b;
    if (!img.annotation.objects.empty() && rng.bernoulli(0.7)) {
      b = img.annotation.objects[rng.below(img.annotation.objects.size())].box;
      const double s = rng.uniform(0, 8);
      b = box(b.x1 + s * rng.normal(), b.y1 + s * rng.normal(), b.x2 + s * rng.normal(), b.y2 + s * rng.normal());
      if (b.x2 <= b.x1) std::swap(b.x1, b.x2);
      if (b.y2 <= b.y1) std::swap(b.y1, b.y2);
      b.x2 += 0.5;
      b.y2 += 0.5;
    } else {
      const double x = rng.uniform(0, 200);
      const double y = rng.uniform(0, 200);
      b = box(x, y, x + 20, y + 20);
    }
    // Coarse confidences make ties common.
    const double conf = 0.4 + 0.1 * static_cast<double>(rng.below(6));
    img.detections.push_back(pred(b, static_cast<int>(rng.below(2)), conf));
  }
  return img;
}

}  // namespace

TEST_CASE("average precision equals the brute-force threshold sweep") {
  Rng rng(31);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<ImageScope> scope;
    const auto images = 1 + rng.below(3);
    for (std::size_t i = 0; i < images; ++i) scope.push_back(random_scene(rng));
    for (int c = 0; c < 2; ++c) {
      const auto ap = average_precision(scope, c);
      bool has_gt = false;
      for (const auto& img : scope) {
        for (const auto& o : img.annotation.objects) has_gt = has_gt || o.label == c;
      }
      REQUIRE(ap.has_value() == has_gt);
      if (ap) {
        REQUIRE(std::fabs(*ap - oracle::brute_average_precision(scope, c, 0.5)) <= 1e-12);
        REQUIRE(*ap >= 0.0);
        REQUIRE(*ap <= 1.0);
      }
    }
  }
}

TEST_CASE("a low-confidence false positive never increases AP") {
  Rng rng(32);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<ImageScope> scope{random_scene(rng)};
    const auto before = average_precision(scope, 0);
    if (!before) continue;
    scope[0].detections.push_back(pred(box(900, 900, 920, 920), 0, 0.01));
    REQUIRE(*average_precision(scope, 0) <= *before);
  }
}

TEST_CASE("mAP is invariant to image order") {
  Rng rng(33);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<ImageScope> scope;
    for (int i = 0; i < 4; ++i) scope.push_back(random_scene(rng));
    scope[0].annotation.objects.push_back({0, box(0, 0, 5, 5)});
    const double forward = mean_average_precision(scope);
    std::reverse(scope.begin(), scope.end());
    REQUIRE(mean_average_precision(scope) == doctest::Approx(forward).epsilon(1e-14));
  }
}

TEST_CASE("prediction sources") {
  std::vector<Detection> dets;
  for (int p = 0; p < 5; ++p) {
    dets.push_back(fixture::detection(box(0, 0, 10, 10), fixture::onehot(0), p));
    dets.push_back(fixture::detection(box(100, 0, 110, 10), fixture::onehot(1), p));
  }
  const auto dump = fixture::dump_of("src", dets, 5);
  const auto clusters = clustering::cluster_detections(dump);
  CHECK(predictions(dump, clusters, MapSource::Consensus).size() == 2);
  const auto first = predictions(dump, clusters, MapSource::FirstPass);
  REQUIRE(first.size() == 2);
  CHECK(first[0].label == 0);
  CHECK(first[1].label == 1);
  const auto single = as_prediction(dets[1]);
  CHECK(single.label == 1);
  CHECK(single.confidence == 1.0);
}
