#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "uqod/uqod.h"

namespace fs = std::filesystem;

namespace {

std::string two_cluster_dump() {
  std::string dets;
  for (int p = 0; p < 5; ++p) {
    const double o = 0.1 * p;
    if (!dets.empty()) dets += ",";
    dets += "{\"pass\":" + std::to_string(p) + ",\"box\":[" + std::to_string(10 + o) + ",10,50,50],\"softmax\":[0.8,0.1,0.1]},";
    dets += "{\"pass\":" + std::to_string(p) + ",\"box\":[500,500," + std::to_string(560 + o) + ",560],\"softmax\":[0.1,0.1,0.8]}";
  }
  return "{\"image_id\":\"capi\",\"T\":5,\"dropout_rate\":0.3,\"detections\":[" + dets + "]}";
}

fs::path temp_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("uqod_capi_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("version and errors") {
  CHECK(std::string(uqod_version()) == "1.0.0");
  uqod_dump* d = nullptr;
  CHECK(uqod_dump_parse("{", &d) == UQOD_ERR_SCHEMA);
  CHECK(d == nullptr);
  CHECK(std::string(uqod_last_error()).size() > 0);
  CHECK(uqod_dump_parse(nullptr, &d) == UQOD_ERR_INVALID_ARGUMENT);
  CHECK(uqod_dump_load("/nonexistent/dump.json", &d) != UQOD_OK);
}

TEST_CASE("clustering through the C interface") {
  uqod_dump* d = nullptr;
  REQUIRE(uqod_dump_parse(two_cluster_dump().c_str(), &d) == UQOD_OK);
  CHECK(uqod_dump_detection_count(d) == 10);
  size_t violations = 99;
  CHECK(uqod_dump_validate(d, &violations) == UQOD_OK);
  CHECK(violations == 0);

  uqod_clustering* c = nullptr;
  REQUIRE(uqod_cluster(d, 2, 2, &c) == UQOD_OK);
  CHECK(uqod_clustering_count(c) == 2);
  CHECK(uqod_clustering_noise_count(c) == 0);
  CHECK(uqod_clustering_size(c, 0) == 5);
  double u[5];
  REQUIRE(uqod_cluster_uncertainty(c, 0, u) == UQOD_OK);
  CHECK(u[0] == doctest::Approx(0.0));
  CHECK(u[3] > 0.0);
  CHECK(uqod_cluster_uncertainty(c, 7, u) == UQOD_ERR_INVALID_ARGUMENT);
  REQUIRE(uqod_image_uncertainty(c, u) == UQOD_OK);
  CHECK(u[1] >= 0.0);
  CHECK(u[1] <= std::log(3.0));
  uqod_clustering_free(c);
  CHECK(uqod_cluster(d, 0, 2, &c) == UQOD_ERR_INVALID_ARGUMENT);
  uqod_dump_free(d);
}

TEST_CASE("validation reports violations") {
  uqod_dump* d = nullptr;
  REQUIRE(uqod_dump_parse(R"({"image_id":"v","T":2,"dropout_rate":0.3,"detections":[
    {"pass":5,"box":[0,0,1,1],"softmax":[0.5,0.5,0.5]}]})", &d) == UQOD_OK);
  size_t count = 0;
  CHECK(uqod_dump_validate(d, &count) == UQOD_ERR_SCHEMA);
  CHECK(count == 2);
  CHECK(std::string(uqod_dump_violation(d, 0)).find("detection 0") != std::string::npos);
  CHECK(uqod_dump_violation(d, 5) == nullptr);
  uqod_dump_free(d);
}

TEST_CASE("statistics through the C interface") {
  const double a[] = {1, 2, 3, 4, 5, 6};
  const double b[] = {2, 3, 4, 5, 6, 7};
  double stat = 0;
  double p = 0;
  REQUIRE(uqod_wilcoxon(a, b, 6, UQOD_TWO_SIDED, &stat, &p) == UQOD_OK);
  CHECK(p == doctest::Approx(2.0 / 64.0));
  REQUIRE(uqod_wilcoxon(a, b, 6, UQOD_LESS, &stat, &p) == UQOD_OK);
  CHECK(p == doctest::Approx(1.0 / 64.0));

  double rho = 0;
  REQUIRE(uqod_spearman(a, b, 6, &rho, &p) == UQOD_OK);
  CHECK(rho == 1.0);
  CHECK(p == doctest::Approx(2.0 / 720.0));
  const double flat[] = {1, 1, 1, 1, 1, 1};
  REQUIRE(uqod_spearman(a, flat, 6, &rho, &p) == UQOD_OK);
  CHECK(std::isnan(rho));

  const double rows[] = {1, 2, 3, 1, 2, 3, 1, 2, 3, 1, 2, 3};
  REQUIRE(uqod_friedman(rows, 4, 3, &stat, &p) == UQOD_OK);
  CHECK(stat == doctest::Approx(8.0));
  CHECK(uqod_friedman(rows, 4, 1, &stat, &p) == UQOD_ERR_INVALID_ARGUMENT);

  const double ps[] = {0.04, 0.001, 0.03, 0.5};
  int reject[4];
  double adjusted[4];
  REQUIRE(uqod_holm(ps, 4, 0.05, reject, adjusted) == UQOD_OK);
  CHECK(reject[1] == 1);
  CHECK(reject[0] == 0);
  CHECK(adjusted[0] == doctest::Approx(0.09));

  double r = 0;
  REQUIRE(uqod_rank_biserial(a, b, 6, &r) == UQOD_OK);
  CHECK(r == -1.0);

  const double adv[] = {0.6, 1.0};
  REQUIRE(uqod_rs_map(0.8, adv, 2, &r) == UQOD_OK);
  CHECK(r == doctest::Approx(0.6));
  REQUIRE(uqod_rs_uqm(0.0, flat, 6, &r) == UQOD_OK);
  CHECK(r == doctest::Approx(1.0 - (6.0 / 7.0 + 1.0)));
  CHECK(uqod_rs_map(0.8, adv, 0, &r) == UQOD_ERR_INVALID_ARGUMENT);
}

TEST_CASE("pipeline through the C interface") {
  const auto dir = temp_dir("pipeline");
  {
    std::ofstream(dir / "synth.json") << R"({"n_images": 4, "n_adversarial": 2, "rng_seed": 5,
      "box_jitter_sigma": 2.0, "softmax_temperature": 1.0})";
  }
  REQUIRE(uqod_run_synth((dir / "synth.json").c_str(), (dir / "data").c_str()) == UQOD_OK);

  uqod_run_config* cfg = uqod_run_config_new();
  uqod_run_config_set_manifest(cfg, (dir / "data" / "manifest.json").c_str());
  uqod_run_config_set_dumps(cfg, (dir / "data" / "dumps").c_str());
  uqod_run_config_set_out(cfg, (dir / "a").c_str());
  uqod_run_config_set_model_id(cfg, "a");
  uqod_run_config_set_threads(cfg, 2);
  REQUIRE(uqod_run_evaluate(cfg) == UQOD_OK);
  CHECK(fs::exists(dir / "a" / "run.json"));
  uqod_run_config_set_normalize_minmax(cfg, 1);
  REQUIRE(uqod_run_robustness(cfg) == UQOD_OK);
  CHECK(fs::exists(dir / "a" / "robustness_summary.json"));

  uqod_run_config_set_out(cfg, (dir / "b").c_str());
  uqod_run_config_set_model_id(cfg, "b");
  uqod_run_config_set_map_source(cfg, UQOD_MAP_FIRST_PASS);
  REQUIRE(uqod_run_evaluate(cfg) == UQOD_OK);

  uqod_run_config_set_iou_threshold(cfg, 2.0);
  CHECK(uqod_run_evaluate(cfg) == UQOD_ERR_INVALID_ARGUMENT);
  uqod_run_config_free(cfg);

  uqod_run_config* cmp = uqod_run_config_new();
  uqod_run_config_add_run(cmp, (dir / "a").c_str());
  uqod_run_config_add_run(cmp, (dir / "b" / "run.json").c_str());
  uqod_run_config_set_out(cmp, (dir / "cmp").c_str());
  CHECK(uqod_run_compare(cmp) == UQOD_OK);
  CHECK(fs::exists(dir / "cmp" / "comparison.json"));
  uqod_run_config_free(cmp);

  uqod_run_config* empty = uqod_run_config_new();
  std::ofstream(dir / "empty.json") << R"({"name": "e", "entries": []})";
  uqod_run_config_set_manifest(empty, (dir / "empty.json").c_str());
  uqod_run_config_set_dumps(empty, dir.c_str());
  uqod_run_config_set_out(empty, (dir / "e").c_str());
  CHECK(uqod_run_evaluate(empty) == UQOD_ERR_EMPTY);
  uqod_run_config_free(empty);
  fs::remove_all(dir);
}
