#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "uqod/uqod.h"

namespace {

struct PipelineOptions {
  std::string manifest;
  std::string dumps;
  std::string out;
  std::string model_id;
  double iou_threshold = 0.5;
  int min_samples = 3;
  int min_cluster_size = 3;
  std::string map_source = "consensus";
  std::string normalize = "none";
};

void add_pipeline_options(CLI::App* cmd, PipelineOptions& o) {
  cmd->add_option("--manifest", o.manifest, "dataset manifest (JSON)")->required();
  cmd->add_option("--dumps", o.dumps, "directory of <image_id>.json prediction dumps")->required();
  cmd->add_option("--out", o.out, "output directory")->required();
  cmd->add_option("--iou-threshold", o.iou_threshold, "IoU needed for a true positive")
      ->capture_default_str();
  cmd->add_option("--min-samples", o.min_samples, "HDBSCAN min_samples")->capture_default_str();
  cmd->add_option("--min-cluster-size", o.min_cluster_size, "HDBSCAN min_cluster_size")
      ->capture_default_str();
  cmd->add_option("--map-source", o.map_source, "predictions scored for mAP")
      ->check(CLI::IsMember({"consensus", "pass0"}))
      ->capture_default_str();
  cmd->add_option("--model-id", o.model_id, "model name recorded in the run (default: dumps dir)");
}

uqod_run_config* make_config(const PipelineOptions& o) {
  uqod_run_config* c = uqod_run_config_new();
  uqod_run_config_set_manifest(c, o.manifest.c_str());
  uqod_run_config_set_dumps(c, o.dumps.c_str());
  uqod_run_config_set_out(c, o.out.c_str());
  uqod_run_config_set_iou_threshold(c, o.iou_threshold);
  uqod_run_config_set_min_samples(c, o.min_samples);
  uqod_run_config_set_min_cluster_size(c, o.min_cluster_size);
  uqod_run_config_set_map_source(c, o.map_source == "pass0" ? UQOD_MAP_FIRST_PASS : UQOD_MAP_CONSENSUS);
  uqod_run_config_set_normalize_minmax(c, o.normalize == "minmax" ? 1 : 0);
  if (!o.model_id.empty()) uqod_run_config_set_model_id(c, o.model_id.c_str());
  return c;
}

int report(uqod_status status) {
  if (status != UQOD_OK) {
    std::cerr << "error: " << uqod_last_error();
    const std::string text = uqod_last_error();
    if (text.empty() || text.back() != '\n') std::cerr << '\n';
  }
  switch (status) {
    case UQOD_OK: return 0;
    case UQOD_ERR_SCHEMA: return 2;
    case UQOD_ERR_EMPTY: return 3;
    case UQOD_ERR_MISMATCH: return 4;
    default: return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Uncertainty and robustness evaluation for MC-dropout object detectors"};
  app.set_version_flag("--version", std::string(uqod_version()));
  app.require_subcommand(1);

  PipelineOptions eval;
  auto* evaluate = app.add_subcommand("evaluate", "per-image mAP and uncertainty metrics");
  add_pipeline_options(evaluate, eval);

  PipelineOptions robust;
  auto* robustness = app.add_subcommand("robustness", "robustness scores over adversarial variants");
  add_pipeline_options(robustness, robust);
  robustness->add_option("--normalize-uqm", robust.normalize, "rescale uncertainty metrics")
      ->check(CLI::IsMember({"none", "minmax"}))
      ->capture_default_str();

  std::vector<std::string> runs;
  double alpha = 0.05;
  std::string compare_out;
  auto* compare = app.add_subcommand("compare", "statistical comparison of evaluation runs");
  compare->add_option("--runs", runs, "run.json files or evaluate output directories")
      ->required()
      ->expected(2, -1);
  compare->add_option("--alpha", alpha, "family-wise significance level")->capture_default_str();
  compare->add_option("--out", compare_out, "output directory")->required();

  std::string synth_config;
  std::string synth_out;
  auto* synth = app.add_subcommand("synth", "generate a seeded synthetic dataset");
  synth->add_option("--config", synth_config, "generator configuration (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  synth->add_option("--out", synth_out, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (*evaluate) {
    uqod_run_config* c = make_config(eval);
    const int code = report(uqod_run_evaluate(c));
    uqod_run_config_free(c);
    return code;
  }
  if (*robustness) {
    uqod_run_config* c = make_config(robust);
    const int code = report(uqod_run_robustness(c));
    uqod_run_config_free(c);
    return code;
  }
  if (*compare) {
    uqod_run_config* c = uqod_run_config_new();
    for (const auto& r : runs) uqod_run_config_add_run(c, r.c_str());
    uqod_run_config_set_alpha(c, alpha);
    uqod_run_config_set_out(c, compare_out.c_str());
    const int code = report(uqod_run_compare(c));
    uqod_run_config_free(c);
    return code;
  }
  return report(uqod_run_synth(synth_config.c_str(), synth_out.c_str()));
}
