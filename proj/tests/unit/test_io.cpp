#include <filesystem>
#include <limits>

#include "doctest.h"
#include "fixtures.hpp"
#include "uqod/io.hpp"
#include "uqod/synthgen.hpp"

using namespace uqod;
using namespace uqod::io;

TEST_CASE("dump round trip") {
  synth::SynthConfig c;
  c.n_images = 5;
  c.box_jitter_sigma = 3.3;
  c.softmax_temperature = 0.9;
  c.label_flip_prob = 0.1;
  c.rng_seed = 70;
  const auto out = synth::generate(c);
  for (const auto& d : out.dumps) {
    const auto text = to_json(d);
    const auto back = parse_dump(text);
    CHECK(validate_dump(back).ok());
    REQUIRE(back.detections.size() == d.detections.size());
    CHECK(back.image_id == d.image_id);
    CHECK(back.passes == d.passes);
    CHECK(back.dropout_rate == d.dropout_rate);
    for (std::size_t i = 0; i < d.detections.size(); ++i) {
      CHECK(back.detections[i].box.x1 == d.detections[i].box.x1);
      CHECK(back.detections[i].box.y2 == d.detections[i].box.y2);
      CHECK(back.detections[i].pass_index == d.detections[i].pass_index);
      CHECK(back.detections[i].score.probabilities == d.detections[i].score.probabilities);
    }
    CHECK(to_json(back) == text);
  }
  const auto m = parse_manifest(to_json(out.manifest));
  CHECK(to_json(m) == to_json(out.manifest));
}

TEST_CASE("dump wire format") {
  const auto d = parse_dump(R"({"image_id": "a", "T": 2, "dropout_rate": 0.25,
    "detections": [{"pass": 1, "box": [1, 2, 3.5, 4], "softmax": [0.1, 0.2, 0.7]}]})");
  CHECK(d.image_id == "a");
  CHECK(d.passes == 2);
  CHECK(d.dropout_rate == 0.25);
  REQUIRE(d.detections.size() == 1);
  CHECK(d.detections[0].pass_index == 1);
  CHECK(d.detections[0].box.x2 == 3.5);
  CHECK(d.detections[0].score.probabilities[2] == 0.7);
}

TEST_CASE("malformed dumps raise schema errors naming the field") {
  CHECK_THROWS_AS(parse_dump("{"), SchemaError);
  CHECK_THROWS_WITH_AS(parse_dump(R"({"T": 2, "dropout_rate": 0.3, "detections": []})"),
                       doctest::Contains("image_id"), SchemaError);
  CHECK_THROWS_WITH_AS(parse_dump(R"({"image_id": "a", "T": 2.5, "dropout_rate": 0.3, "detections": []})"),
                       doctest::Contains("dump.T"), SchemaError);
  CHECK_THROWS_WITH_AS(parse_dump(R"({"image_id": "a", "T": 2, "dropout_rate": 0.3,
    "detections": [{"pass": 0, "box": [1, 2, 3], "softmax": [1, 0, 0]}]})"),
                       doctest::Contains("detections[0].box"), SchemaError);
  CHECK_THROWS_AS(parse_dump(R"({"image_id": "a", "T": 2, "dropout_rate": 0.3,
    "detections": [{"pass": 0, "box": [1, 2, 3, 4], "softmax": ["x", 0, 0]}]})"),
                  SchemaError);
  CHECK_THROWS_AS(parse_dump("[]"), SchemaError);
}

TEST_CASE("annotation and manifest") {
  const auto a = parse_annotation(R"({"image_id": "i", "objects": [{"label": 1, "box": [0, 0, 5, 5]}]})");
  CHECK(a.objects.size() == 1);
  CHECK(a.objects[0].label == 1);
  CHECK(parse_annotation(to_json(a)).objects[0].box.x2 == 5.0);

  const auto m = parse_manifest(R"({"name": "n", "entries": [
    {"original": "o", "annotation": {"image_id": "o", "objects": []}},
    {"original": "p", "adversarial": ["p1", "p2"], "annotation": {"image_id": "p", "objects": []}}]})");
  CHECK(m.name == "n");
  REQUIRE(m.entries.size() == 2);
  CHECK(m.entries[0].adversarial.empty());
  CHECK(m.entries[1].adversarial == std::vector<std::string>{"p1", "p2"});
  CHECK_THROWS_AS(parse_manifest(R"({"name": "n"})"), SchemaError);
}

TEST_CASE("evaluation run round trip keeps absent values") {
  EvaluationRun run;
  run.model_id = "m";
  run.dataset_id = "d";
  run.dropout_rate = 0.2;
  ImageMetrics full;
  full.map = 0.5;
  full.vr = 0.1;
  full.se = 0.2;
  full.mi = 0.05;
  full.tv = 3.0;
  full.ps = 4.0;
  run.per_image["a"] = full;
  run.per_image["b"] = ImageMetrics{};
  const auto back = parse_run(to_json(run));
  CHECK(back.model_id == "m");
  CHECK(back.per_image.at("a").tv == 3.0);
  CHECK(back.per_image.at("a").map == 0.5);
  CHECK_FALSE(back.per_image.at("b").map.has_value());
  CHECK_FALSE(back.per_image.at("b").ps.has_value());
  CHECK(to_json(back) == to_json(run));
}

TEST_CASE("synth config parsing") {
  const auto c = parse_synth_config(R"({"n_images": 4, "objects_per_image": [2, 5], "T": 10,
    "box_jitter_sigma": 1.5, "label_flip_prob": 0.1, "softmax_temperature": 0.5,
    "detect_drop_prob": 0.05, "adversarial_degradation": {"extra_jitter": 3, "extra_flip": 0.2},
    "rng_seed": 42, "n_adversarial": 4, "box_size": [20, 60]})");
  CHECK(c.n_images == 4);
  CHECK(c.min_objects == 2);
  CHECK(c.max_objects == 5);
  CHECK(c.passes == 10);
  CHECK(c.box_jitter_sigma == 1.5);
  CHECK(c.adversarial.extra_jitter == 3.0);
  CHECK(c.adversarial.extra_flip == 0.2);
  CHECK(c.rng_seed == 42);
  CHECK(c.n_adversarial == 4);
  CHECK(c.min_box_size == 20.0);
  CHECK(c.max_box_size == 60.0);
  CHECK(parse_synth_config("{}").passes == 20);
  CHECK_THROWS_WITH_AS(parse_synth_config(R"({"n_imagez": 3})"), doctest::Contains("n_imagez"), SchemaError);
}

TEST_CASE("number formatting") {
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(0.333333333) == "0.333333");
  CHECK(format_double(-0.0) == "0");
  CHECK(format_double(1234567.0) == "1.23457e+06");
  CHECK(format_double(std::numeric_limits<double>::quiet_NaN()) == "nan");
  CHECK(format_double(-std::numeric_limits<double>::infinity()) == "-inf");
  CHECK(format_double(0.5, 3) == "0.5");
}

TEST_CASE("files") {
  const auto dir = fixture::scratch_dir("io");
  write_file(dir / "nested" / "x.txt", "hello");
  CHECK(read_file(dir / "nested" / "x.txt") == "hello");
  CHECK_THROWS(read_file(dir / "missing.txt"));
  const auto d = fixture::dump_of("f", {fixture::detection(fixture::box(0, 0, 1, 1), fixture::onehot(0))});
  write_file(dir / "f.json", to_json(d));
  CHECK(load_dump(dir / "f.json").image_id == "f");
  std::filesystem::remove_all(dir);
}
