#include "uqod/uqod.h"

#include <cmath>
#include <filesystem>
#include <limits>
#include <memory>
#include <new>
#include <span>
#include <string>
#include <vector>

#include "uqod/clustering.hpp"
#include "uqod/io.hpp"
#include "uqod/pipeline.hpp"
#include "uqod/robustness.hpp"
#include "uqod/stats.hpp"
#include "uqod/uq_metrics.hpp"

struct uqod_dump {
  uqod::PredictionDump dump;
  mutable std::vector<std::string> violations;
};

struct uqod_clustering {
  uqod::clustering::ClusteringResult result;
};

struct uqod_run_config {
  uqod::pipeline::RunConfig run;
  std::vector<std::filesystem::path> runs;
};

namespace {

thread_local std::string last_error;

uqod_status fail(uqod_status status, std::string message) {
  last_error = std::move(message);
  return status;
}

uqod_status from_exit_code(uqod::pipeline::ExitCode code) {
  using uqod::pipeline::ExitCode;
  switch (code) {
    case ExitCode::Ok: return UQOD_OK;
    case ExitCode::Schema: return UQOD_ERR_SCHEMA;
    case ExitCode::Empty: return UQOD_ERR_EMPTY;
    case ExitCode::Mismatch: return UQOD_ERR_MISMATCH;
    case ExitCode::Failure: break;
  }
  return UQOD_ERR_INVALID_ARGUMENT;
}

template <typename Fn>
uqod_status guarded(Fn&& fn) {
  try {
    last_error.clear();
    return fn();
  } catch (const uqod::pipeline::PipelineError& e) {
    return fail(from_exit_code(e.code()), e.what());
  } catch (const uqod::io::SchemaError& e) {
    return fail(UQOD_ERR_SCHEMA, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(UQOD_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::domain_error& e) {
    return fail(UQOD_ERR_EMPTY, e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return fail(UQOD_ERR_IO, e.what());
  } catch (const std::bad_alloc&) {
    return fail(UQOD_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(UQOD_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(UQOD_ERR_INTERNAL, "unknown error");
  }
}

std::span<const double> view(const double* p, std::size_t n) { return {p, n}; }

uqod::stats::Alternative to_alternative(uqod_alternative a) {
  switch (a) {
    case UQOD_GREATER: return uqod::stats::Alternative::Greater;
    case UQOD_LESS: return uqod::stats::Alternative::Less;
    default: return uqod::stats::Alternative::TwoSided;
  }
}

void write_uncertainty(double out[5], double vr, double se, double mi, double tv, double ps) {
  out[UQOD_VR] = vr;
  out[UQOD_SE] = se;
  out[UQOD_MI] = mi;
  out[UQOD_TV] = tv;
  out[UQOD_PS] = ps;
}

}  // namespace

extern "C" {

const char* uqod_last_error(void) { return last_error.c_str(); }

const char* uqod_version(void) { return "1.0.0"; }

uqod_status uqod_dump_parse(const char* json, uqod_dump** out) {
  if (!json || !out) return fail(UQOD_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    auto handle = std::make_unique<uqod_dump>();
    handle->dump = uqod::io::parse_dump(json);
    *out = handle.release();
    return UQOD_OK;
  });
}

uqod_status uqod_dump_load(const char* path, uqod_dump** out) {
  if (!path || !out) return fail(UQOD_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    std::string text;
    try {
      text = uqod::io::read_file(path);
    } catch (const std::exception& e) {
      return fail(UQOD_ERR_IO, e.what());
    }
    auto handle = std::make_unique<uqod_dump>();
    handle->dump = uqod::io::parse_dump(text);
    *out = handle.release();
    return UQOD_OK;
  });
}

void uqod_dump_free(uqod_dump* dump) { delete dump; }

size_t uqod_dump_detection_count(const uqod_dump* dump) {
  return dump ? dump->dump.detections.size() : 0;
}

uqod_status uqod_dump_validate(const uqod_dump* dump, size_t* violation_count) {
  if (!dump) return fail(UQOD_ERR_INVALID_ARGUMENT, "null dump");
  return guarded([&] {
    dump->violations.clear();
    for (const auto& v : uqod::validate_dump(dump->dump).violations) {
      std::string text = uqod::to_string(v.kind);
      if (v.detection >= 0) text += " (detection " + std::to_string(v.detection) + ")";
      text += ": " + v.message;
      dump->violations.push_back(std::move(text));
    }
    if (violation_count) *violation_count = dump->violations.size();
    if (dump->violations.empty()) return UQOD_OK;
    return fail(UQOD_ERR_SCHEMA, dump->violations.front());
  });
}

const char* uqod_dump_violation(const uqod_dump* dump, size_t index) {
  if (!dump || index >= dump->violations.size()) return nullptr;
  return dump->violations[index].c_str();
}

uqod_status uqod_cluster(const uqod_dump* dump, int min_samples, int min_cluster_size,
                         uqod_clustering** out) {
  if (!dump || !out) return fail(UQOD_ERR_INVALID_ARGUMENT, "null argument");
  if (min_samples < 1 || min_cluster_size < 2) {
    return fail(UQOD_ERR_INVALID_ARGUMENT, "min_samples must be >= 1 and min_cluster_size >= 2");
  }
  return guarded([&] {
    auto handle = std::make_unique<uqod_clustering>();
    handle->result = uqod::clustering::cluster_detections(dump->dump, {min_samples, min_cluster_size});
    *out = handle.release();
    return UQOD_OK;
  });
}

void uqod_clustering_free(uqod_clustering* clustering) { delete clustering; }

size_t uqod_clustering_count(const uqod_clustering* clustering) {
  return clustering ? clustering->result.clusters.size() : 0;
}

size_t uqod_clustering_noise_count(const uqod_clustering* clustering) {
  return clustering ? clustering->result.noise.size() : 0;
}

size_t uqod_clustering_size(const uqod_clustering* clustering, size_t cluster) {
  if (!clustering || cluster >= clustering->result.clusters.size()) return 0;
  return clustering->result.clusters[cluster].size();
}

uqod_status uqod_cluster_uncertainty(const uqod_clustering* clustering, size_t cluster,
                                     double values[5]) {
  if (!clustering || !values) return fail(UQOD_ERR_INVALID_ARGUMENT, "null argument");
  if (cluster >= clustering->result.clusters.size()) {
    return fail(UQOD_ERR_INVALID_ARGUMENT, "cluster index out of range");
  }
  return guarded([&] {
    const auto u = uqod::uq::object_uncertainty(clustering->result.clusters[cluster]);
    write_uncertainty(values, u.vr, u.se, u.mi, u.tv, u.ps);
    return UQOD_OK;
  });
}

uqod_status uqod_image_uncertainty(const uqod_clustering* clustering, double values[5]) {
  if (!clustering || !values) return fail(UQOD_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const auto u = uqod::uq::image_uncertainty(std::span(clustering->result.clusters));
    if (!u) return fail(UQOD_ERR_EMPTY, "image has no clusters");
    write_uncertainty(values, u->vr, u->se, u->mi, u->tv, u->ps);
    return UQOD_OK;
  });
}

uqod_status uqod_wilcoxon(const double* a, const double* b, size_t n, uqod_alternative alternative,
                          double* statistic, double* p_value) {
  if (!a || !b || !p_value) return fail(UQOD_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const auto r = uqod::stats::wilcoxon_signed_rank(view(a, n), view(b, n), to_alternative(alternative));
    if (statistic) *statistic = r.statistic;
    *p_value = r.p_value;
    return UQOD_OK;
  });
}

uqod_status uqod_friedman(const double* values, size_t n_rows, size_t n_groups, double* statistic,
                          double* p_value) {
  if (!values || !p_value) return fail(UQOD_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const uqod::stats::PairedSampleMatrix m(n_rows, n_groups,
                                            std::vector<double>(values, values + n_rows * n_groups));
    const auto r = uqod::stats::friedman(m);
    if (statistic) *statistic = r.statistic;
    *p_value = r.p_value;
    return UQOD_OK;
  });
}

uqod_status uqod_spearman(const double* x, const double* y, size_t n, double* rho, double* p_value) {
  if (!x || !y || !rho || !p_value) return fail(UQOD_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const auto r = uqod::stats::spearman(view(x, n), view(y, n));
    *rho = r.rho.value_or(std::numeric_limits<double>::quiet_NaN());
    *p_value = r.p_value;
    return UQOD_OK;
  });
}

uqod_status uqod_holm(const double* p_values, size_t n, double alpha, int* reject,
                      double* adjusted) {
  if ((!p_values && n > 0) || !reject || !adjusted) {
    return fail(UQOD_ERR_INVALID_ARGUMENT, "null argument");
  }
  return guarded([&] {
    const auto decisions = uqod::stats::holm_bonferroni(view(p_values, n), alpha);
    for (std::size_t i = 0; i < n; ++i) {
      reject[i] = decisions[i].reject ? 1 : 0;
      adjusted[i] = decisions[i].adjusted_p;
    }
    return UQOD_OK;
  });
}

uqod_status uqod_rank_biserial(const double* a, const double* b, size_t n, double* r) {
  if (!a || !b || !r) return fail(UQOD_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *r = uqod::stats::rank_biserial(view(a, n), view(b, n)).r;
    return UQOD_OK;
  });
}

uqod_status uqod_rs_map(double original, const double* adversarial, size_t m, double* score) {
  if (!adversarial || !score) return fail(UQOD_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *score = uqod::robustness::rs_map({original, std::vector<double>(adversarial, adversarial + m)});
    return UQOD_OK;
  });
}

uqod_status uqod_rs_uqm(double original, const double* adversarial, size_t m, double* score) {
  if (!adversarial || !score) return fail(UQOD_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *score = uqod::robustness::rs_uqm({original, std::vector<double>(adversarial, adversarial + m)});
    return UQOD_OK;
  });
}

uqod_run_config* uqod_run_config_new(void) { return new (std::nothrow) uqod_run_config(); }

void uqod_run_config_free(uqod_run_config* config) { delete config; }

void uqod_run_config_set_manifest(uqod_run_config* config, const char* path) {
  if (config && path) config->run.manifest = path;
}

void uqod_run_config_set_dumps(uqod_run_config* config, const char* path) {
  if (config && path) config->run.dumps = path;
}

void uqod_run_config_set_out(uqod_run_config* config, const char* path) {
  if (config && path) config->run.out = path;
}

void uqod_run_config_set_model_id(uqod_run_config* config, const char* model_id) {
  if (config && model_id) config->run.model_id = model_id;
}

void uqod_run_config_set_iou_threshold(uqod_run_config* config, double threshold) {
  if (config) config->run.iou_threshold = threshold;
}

void uqod_run_config_set_min_samples(uqod_run_config* config, int min_samples) {
  if (config) config->run.cluster.min_samples = min_samples;
}

void uqod_run_config_set_min_cluster_size(uqod_run_config* config, int size) {
  if (config) config->run.cluster.min_cluster_size = size;
}

void uqod_run_config_set_map_source(uqod_run_config* config, uqod_map_source source) {
  if (config) {
    config->run.map_source = source == UQOD_MAP_FIRST_PASS ? uqod::accuracy::MapSource::FirstPass
                                                           : uqod::accuracy::MapSource::Consensus;
  }
}

void uqod_run_config_set_normalize_minmax(uqod_run_config* config, int enabled) {
  if (config) {
    config->run.normalize_uqm =
        enabled ? uqod::pipeline::UqmNormalization::MinMax : uqod::pipeline::UqmNormalization::None;
  }
}

void uqod_run_config_set_alpha(uqod_run_config* config, double alpha) {
  if (config) config->run.alpha = alpha;
}

void uqod_run_config_set_threads(uqod_run_config* config, unsigned threads) {
  if (config) config->run.threads = threads;
}

void uqod_run_config_add_run(uqod_run_config* config, const char* path) {
  if (config && path) config->runs.emplace_back(path);
}

uqod_status uqod_run_evaluate(const uqod_run_config* config) {
  if (!config) return fail(UQOD_ERR_INVALID_ARGUMENT, "null config");
  return guarded([&] {
    uqod::pipeline::run_evaluate(config->run);
    return UQOD_OK;
  });
}

uqod_status uqod_run_robustness(const uqod_run_config* config) {
  if (!config) return fail(UQOD_ERR_INVALID_ARGUMENT, "null config");
  return guarded([&] {
    uqod::pipeline::run_robustness(config->run);
    return UQOD_OK;
  });
}

uqod_status uqod_run_compare(const uqod_run_config* config) {
  if (!config) return fail(UQOD_ERR_INVALID_ARGUMENT, "null config");
  return guarded([&] {
    uqod::pipeline::run_compare({config->runs, config->run.alpha, config->run.out});
    return UQOD_OK;
  });
}

uqod_status uqod_run_synth(const char* config_path, const char* out_dir) {
  if (!config_path || !out_dir) return fail(UQOD_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    uqod::pipeline::run_synth(config_path, out_dir);
    return UQOD_OK;
  });
}

}  // extern "C"
