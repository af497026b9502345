#include "uqod/pipeline.hpp"

#include <algorithm>
#include <array>
#include <cstdlib>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"
#include "parallel.hpp"
#include "uqod/io.hpp"
#include "uqod/random.hpp"
#include "uqod/stats.hpp"
#include "uqod/synthgen.hpp"

namespace uqod::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::size_t kBootstrapResamples = 1000;
constexpr std::uint64_t kBootstrapSeed = 0x5EEDB007ULL;

constexpr std::array<const char*, 6> kMetricNames{"mAP", "VR", "SE", "MI", "TV", "PS"};

std::optional<double> metric(const ImageMetrics& m, std::size_t index) {
  switch (index) {
    case 0: return m.map;
    case 1: return m.vr;
    case 2: return m.se;
    case 3: return m.mi;
    case 4: return m.tv;
    default: return m.ps;
  }
}

std::optional<double>& metric_ref(ImageMetrics& m, std::size_t index) {
  switch (index) {
    case 0: return m.map;
    case 1: return m.vr;
    case 2: return m.se;
    case 3: return m.mi;
    case 4: return m.tv;
    default: return m.ps;
  }
}

std::string cell(const std::optional<double>& v) { return v ? io::format_double(*v) : "NA"; }

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::string map_source_name(accuracy::MapSource s) {
  return s == accuracy::MapSource::Consensus ? "consensus" : "pass0";
}

DatasetManifest load_manifest_checked(const fs::path& path) {
  DatasetManifest manifest;
  try {
    manifest = io::load_manifest(path);
  } catch (const io::SchemaError& e) {
    throw PipelineError(ExitCode::Schema, path.string() + ": " + e.what());
  } catch (const std::exception& e) {
    throw PipelineError(ExitCode::Schema, e.what());
  }
  if (manifest.entries.empty()) {
    throw PipelineError(ExitCode::Empty, "manifest " + path.string() + " has no entries");
  }
  std::ostringstream problems;
  for (const auto& entry : manifest.entries) {
    for (const auto& v : validate_annotation(entry.annotation).violations) {
      problems << "annotation " << entry.original << " object " << v.detection << ": " << v.message
               << "\n";
    }
  }
  if (!problems.str().empty()) throw PipelineError(ExitCode::Schema, problems.str());
  return manifest;
}

// Loads every listed dump; all problems are collected before failing.
std::vector<PredictionDump> load_dumps(const fs::path& dir, const std::vector<std::string>& ids,
                                       unsigned threads) {
  std::vector<PredictionDump> dumps(ids.size());
  std::vector<std::string> errors(ids.size());
  detail::parallel_for(ids.size(), threads, [&](std::size_t i) {
    const fs::path path = dir / (ids[i] + ".json");
    std::ostringstream err;
    if (!fs::exists(path)) {
      err << "image_id " << ids[i] << ": missing dump file " << path.string() << "\n";
    } else {
      try {
        dumps[i] = io::load_dump(path);
        if (dumps[i].image_id != ids[i]) {
          err << "image_id " << ids[i] << ": dump declares image_id \"" << dumps[i].image_id
              << "\"\n";
        }
        for (const auto& v : validate_dump(dumps[i]).violations) {
          err << "image_id " << ids[i] << " (" << path.string() << ")";
          if (v.detection >= 0) err << " detection " << v.detection;
          err << ": " << v.message << "\n";
        }
      } catch (const std::exception& e) {
        err << "image_id " << ids[i] << " (" << path.string() << "): " << e.what() << "\n";
      }
    }
    errors[i] = err.str();
  });
  std::string all;
  for (const auto& e : errors) all += e;
  if (!all.empty()) throw PipelineError(ExitCode::Schema, all);
  return dumps;
}

// Percentile with linear interpolation between order statistics.
double quantile(std::vector<double> sorted, double q) {
  std::sort(sorted.begin(), sorted.end());
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

json bootstrap_summary(const std::vector<double>& values, std::uint64_t stream) {
  if (values.empty()) return {{"n", 0}, {"mean", nullptr}, {"ci95", nullptr}};
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / static_cast<double>(values.size());

  Rng rng(Rng::derive(kBootstrapSeed, stream));
  std::vector<double> means(kBootstrapResamples);
  for (auto& m : means) {
    double s = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) s += values[rng.below(values.size())];
    m = s / static_cast<double>(values.size());
  }
  return {{"n", values.size()},
          {"mean", mean},
          {"ci95", json::array({quantile(means, 0.025), quantile(means, 0.975)})}};
}

EvaluationOptions options_from(const RunConfig& c) {
  return EvaluationOptions{c.iou_threshold, c.cluster, c.map_source};
}

void check_run_config(const RunConfig& c) {
  if (!(c.iou_threshold > 0.0 && c.iou_threshold < 1.0)) {
    throw PipelineError(ExitCode::Failure, "iou threshold must lie in (0, 1)");
  }
  if (c.cluster.min_samples < 1 || c.cluster.min_cluster_size < 2) {
    throw PipelineError(ExitCode::Failure, "min_samples must be >= 1 and min_cluster_size >= 2");
  }
  if (!(c.alpha > 0.0 && c.alpha < 1.0)) {
    throw PipelineError(ExitCode::Failure, "alpha must lie in (0, 1)");
  }
}

std::string model_name(const RunConfig& c) {
  if (!c.model_id.empty()) return c.model_id;
  const auto trimmed = c.dumps.lexically_normal();
  auto name = trimmed.filename().string();
  if (name.empty()) name = trimmed.parent_path().filename().string();
  return name.empty() ? "model" : name;
}

// ---- comparison ----

struct PairwiseRow {
  std::string metric;
  std::size_t a = 0;
  std::size_t b = 0;
  stats::DirectionalComparison test;
  stats::RankBiserial effect;
  stats::HolmDecision holm;
};

struct MetricComparison {
  std::string name;
  bool higher_is_better = false;
  std::size_t n_rows = 0;
  std::optional<stats::TestOutcome> friedman;
  bool gate_passed = false;
  std::string note;
  std::vector<PairwiseRow> pairwise;
  std::vector<std::size_t> best;
};

struct CorrelationRow {
  std::size_t model = 0;
  std::string uqm;
  std::size_t n = 0;
  std::optional<stats::SpearmanOutcome> outcome;
  stats::HolmDecision holm;
};

struct Comparison {
  double alpha = 0.05;
  std::vector<std::string> models;
  std::size_t n_images = 0;
  std::vector<MetricComparison> metrics;
  std::vector<CorrelationRow> correlations;
};

Comparison build_comparison(const std::vector<EvaluationRun>& runs, double alpha) {
  if (runs.size() < 2) throw PipelineError(ExitCode::Failure, "compare needs at least two runs");
  if (!(alpha > 0.0 && alpha < 1.0)) throw PipelineError(ExitCode::Failure, "alpha must lie in (0, 1)");

  std::vector<std::string> images;
  for (const auto& [id, m] : runs.front().per_image) images.push_back(id);
  for (std::size_t r = 1; r < runs.size(); ++r) {
    std::vector<std::string> other;
    for (const auto& [id, m] : runs[r].per_image) other.push_back(id);
    if (other != images) {
      throw PipelineError(ExitCode::Mismatch, "run " + runs[r].model_id +
                                                  " covers a different image set than " +
                                                  runs.front().model_id);
    }
  }

  Comparison cmp;
  cmp.alpha = alpha;
  cmp.n_images = images.size();
  std::map<std::string, int> seen;
  for (const auto& run : runs) {
    const int count = seen[run.model_id]++;
    cmp.models.push_back(count == 0 ? run.model_id : run.model_id + "#" + std::to_string(count + 1));
  }
  const std::size_t k = runs.size();

  for (std::size_t mi = 0; mi < kMetricNames.size(); ++mi) {
    MetricComparison mc;
    mc.name = kMetricNames[mi];
    mc.higher_is_better = mi == 0;

    std::vector<std::vector<double>> columns(k);
    for (const auto& id : images) {
      bool complete = true;
      for (const auto& run : runs) complete = complete && metric(run.per_image.at(id), mi).has_value();
      if (!complete) continue;
      for (std::size_t r = 0; r < k; ++r) columns[r].push_back(*metric(runs[r].per_image.at(id), mi));
    }
    mc.n_rows = columns.front().size();

    if (mc.n_rows < 2) {
      mc.note = "insufficient paired rows";
    } else if (k >= 3) {
      stats::PairedSampleMatrix matrix(mc.n_rows, k);
      for (std::size_t row = 0; row < mc.n_rows; ++row) {
        for (std::size_t r = 0; r < k; ++r) matrix.at(row, r) = columns[r][row];
      }
      mc.friedman = stats::friedman(matrix);
      mc.gate_passed = mc.friedman->p_value < alpha;
      if (!mc.gate_passed) mc.note = "friedman not significant";
    } else {
      mc.gate_passed = true;
      mc.note = "two groups: no omnibus test";
    }

    std::vector<bool> beaten(k, false);
    if (mc.gate_passed) {
      std::vector<double> ps;
      for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t b = a + 1; b < k; ++b) {
          PairwiseRow row;
          row.metric = mc.name;
          row.a = a;
          row.b = b;
          row.test = stats::directional_compare(columns[a], columns[b]);
          row.effect = stats::rank_biserial(columns[a], columns[b]);
          ps.push_back(row.test.test.p_value);
          mc.pairwise.push_back(row);
        }
      }
      const auto holm = stats::holm_bonferroni(ps, alpha);
      for (std::size_t i = 0; i < mc.pairwise.size(); ++i) {
        auto& row = mc.pairwise[i];
        row.holm = holm[i];
        const bool meaningful = row.effect.magnitude == stats::EffectMagnitude::Medium ||
                                row.effect.magnitude == stats::EffectMagnitude::Large;
        if (!row.holm.reject || !meaningful || row.effect.r == 0.0) continue;
        const bool a_larger = row.effect.r > 0.0;
        const bool a_wins = a_larger == mc.higher_is_better;
        beaten[a_wins ? row.b : row.a] = true;
      }
    }
    for (std::size_t r = 0; r < k; ++r) {
      if (!beaten[r]) mc.best.push_back(r);
    }
    cmp.metrics.push_back(std::move(mc));
  }

  std::vector<double> ps;
  std::vector<std::size_t> tested;
  for (std::size_t r = 0; r < k; ++r) {
    for (std::size_t mi = 1; mi < kMetricNames.size(); ++mi) {
      CorrelationRow row;
      row.model = r;
      row.uqm = kMetricNames[mi];
      std::vector<double> x;
      std::vector<double> y;
      for (const auto& id : images) {
        const auto& m = runs[r].per_image.at(id);
        const auto u = metric(m, mi);
        if (m.map && u) {
          x.push_back(*m.map);
          y.push_back(*u);
        }
      }
      row.n = x.size();
      if (row.n >= 3) {
        row.outcome = stats::spearman(x, y);
        if (row.outcome->rho) {
          tested.push_back(cmp.correlations.size());
          ps.push_back(row.outcome->p_value);
        }
      }
      cmp.correlations.push_back(row);
    }
  }
  const auto holm = stats::holm_bonferroni(ps, alpha);
  for (std::size_t i = 0; i < tested.size(); ++i) cmp.correlations[tested[i]].holm = holm[i];
  return cmp;
}

json comparison_json(const Comparison& cmp) {
  json metrics = json::object();
  for (const auto& mc : cmp.metrics) {
    json pairs = json::array();
    for (const auto& row : mc.pairwise) {
      pairs.push_back({{"a", cmp.models[row.a]},
                       {"b", cmp.models[row.b]},
                       {"alternative", stats::to_string(row.test.alternative)},
                       {"interval", json::array({row.test.interval.low, row.test.interval.high})},
                       {"w_plus", row.test.test.w_plus},
                       {"w_minus", row.test.test.w_minus},
                       {"exact", row.test.test.exact},
                       {"p_value", row.test.test.p_value},
                       {"adjusted_p", row.holm.adjusted_p},
                       {"reject", row.holm.reject},
                       {"rank_biserial", row.effect.r},
                       {"magnitude", stats::to_string(row.effect.magnitude)}});
    }
    json best = json::array();
    for (std::size_t r : mc.best) best.push_back(cmp.models[r]);
    json friedman = nullptr;
    if (mc.friedman) {
      friedman = {{"statistic", mc.friedman->statistic}, {"p_value", mc.friedman->p_value}};
    }
    metrics[mc.name] = {{"better", mc.higher_is_better ? "higher" : "lower"},
                        {"n_rows", mc.n_rows},
                        {"friedman", friedman},
                        {"gate_passed", mc.gate_passed},
                        {"note", mc.note},
                        {"pairwise", pairs},
                        {"best", best}};
  }
  json correlations = json::array();
  for (const auto& row : cmp.correlations) {
    json entry{{"model", cmp.models[row.model]}, {"uqm", row.uqm}, {"n", row.n}};
    if (row.outcome && row.outcome->rho) {
      entry["rho"] = *row.outcome->rho;
      entry["p_value"] = row.outcome->p_value;
      entry["exact"] = row.outcome->exact;
      entry["adjusted_p"] = row.holm.adjusted_p;
      entry["significant"] = row.holm.reject;
    } else {
      entry["rho"] = nullptr;
      entry["note"] = row.outcome ? "undefined rho (constant ranks)" : "fewer than 3 paired images";
    }
    correlations.push_back(entry);
  }
  return {{"alpha", cmp.alpha},
          {"models", cmp.models},
          {"n_images", cmp.n_images},
          {"metrics", metrics},
          {"correlations", correlations}};
}

EvaluationRun load_run_argument(const fs::path& p) {
  const fs::path file = fs::is_directory(p) ? p / "run.json" : p;
  try {
    return io::load_run(file);
  } catch (const std::exception& e) {
    throw PipelineError(ExitCode::Schema, file.string() + ": " + e.what());
  }
}

}  // namespace

unsigned worker_count(unsigned requested) {
  unsigned n = requested != 0 ? requested : std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("UQOD_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && cap > 0) n = std::min(n, static_cast<unsigned>(cap));
  }
  return std::max(n, 1u);
}

ImageEvaluation evaluate_image(const PredictionDump& dump, const GroundTruthAnnotation& truth,
                               const EvaluationOptions& options,
                               std::vector<accuracy::ConsensusDetection>* predictions) {
  ImageEvaluation out;
  out.image_id = dump.image_id;
  const auto clusters = clustering::cluster_detections(dump, options.cluster);
  out.n_clusters = clusters.clusters.size();
  out.n_noise = clusters.noise.size();

  if (const auto uq = uq::image_uncertainty(std::span(clusters.clusters))) {
    out.metrics.vr = uq->vr;
    out.metrics.se = uq->se;
    out.metrics.mi = uq->mi;
    out.metrics.tv = uq->tv;
    out.metrics.ps = uq->ps;
  }

  auto preds = accuracy::predictions(dump, clusters, options.map_source);
  if (!truth.objects.empty()) {
    const accuracy::ImageScope scope{preds, truth};
    out.metrics.map = accuracy::mean_average_precision(std::span(&scope, 1), options.iou_threshold);
  }
  if (predictions) *predictions = std::move(preds);
  return out;
}

EvaluateResult run_evaluate(const RunConfig& config) {
  check_run_config(config);
  const auto manifest = load_manifest_checked(config.manifest);
  const unsigned threads = worker_count(config.threads);

  std::vector<std::string> ids;
  for (const auto& e : manifest.entries) ids.push_back(e.original);
  const auto dumps = load_dumps(config.dumps, ids, threads);

  const auto options = options_from(config);
  std::vector<ImageEvaluation> images(dumps.size());
  std::vector<accuracy::ImageScope> scopes(dumps.size());
  detail::parallel_for(dumps.size(), threads, [&](std::size_t i) {
    scopes[i].annotation = manifest.entries[i].annotation;
    images[i] = evaluate_image(dumps[i], scopes[i].annotation, options, &scopes[i].detections);
  });

  EvaluateResult result;
  result.run.model_id = model_name(config);
  result.run.dataset_id = manifest.name;
  result.run.dropout_rate = dumps.front().dropout_rate;
  for (const auto& img : images) {
    if (!result.run.per_image.emplace(img.image_id, img.metrics).second) {
      throw PipelineError(ExitCode::Schema, "manifest lists image " + img.image_id + " twice");
    }
  }
  try {
    result.dataset_map = accuracy::mean_average_precision(scopes, config.iou_threshold);
  } catch (const std::domain_error&) {
    result.dataset_map = std::nullopt;
  }

  std::vector<std::size_t> order(images.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return images[a].image_id < images[b].image_id; });

  std::ostringstream csv;
  csv << "image_id,n_clusters,n_noise,mAP,VR,SE,MI,TV,PS\n";
  std::size_t no_detections = 0;
  for (std::size_t i : order) {
    const auto& img = images[i];
    if (img.n_clusters == 0) ++no_detections;
    csv << img.image_id << ',' << img.n_clusters << ',' << img.n_noise;
    for (std::size_t m = 0; m < kMetricNames.size(); ++m) csv << ',' << cell(metric(img.metrics, m));
    csv << '\n';
  }

  json metrics = json::object();
  for (std::size_t m = 0; m < kMetricNames.size(); ++m) {
    std::vector<double> values;
    for (std::size_t i : order) {
      if (const auto v = metric(images[i].metrics, m)) values.push_back(*v);
    }
    metrics[kMetricNames[m]] = bootstrap_summary(values, m);
  }
  const json summary{{"model_id", result.run.model_id},
                     {"dataset_id", result.run.dataset_id},
                     {"dropout_rate", result.run.dropout_rate},
                     {"n_images", images.size()},
                     {"n_images_no_detections", no_detections},
                     {"iou_threshold", config.iou_threshold},
                     {"map_source", map_source_name(config.map_source)},
                     {"min_samples", config.cluster.min_samples},
                     {"min_cluster_size", config.cluster.min_cluster_size},
                     {"dataset_mAP", optional_json(result.dataset_map)},
                     {"bootstrap_resamples", kBootstrapResamples},
                     {"metrics", metrics}};

  io::write_file(config.out / "per_image.csv", csv.str());
  io::write_file(config.out / "summary.json", summary.dump(2) + "\n");
  io::write_file(config.out / "run.json", io::to_json(result.run));
  result.images = std::move(images);
  return result;
}

RobustnessResult score_robustness(std::vector<PairedImageMetrics> pairs,
                                  UqmNormalization normalization) {
  if (normalization == UqmNormalization::MinMax) {
    for (std::size_t m = 1; m < kMetricNames.size(); ++m) {
      std::vector<double> values;
      for (auto& p : pairs) {
        if (const auto v = metric(p.original, m)) values.push_back(*v);
        for (auto& a : p.adversarial) {
          if (const auto v = metric(a, m)) values.push_back(*v);
        }
      }
      const auto scaled = robustness::minmax_normalize(values);
      std::size_t next = 0;
      for (auto& p : pairs) {
        if (auto& v = metric_ref(p.original, m)) v = scaled[next++];
        for (auto& a : p.adversarial) {
          if (auto& v = metric_ref(a, m)) v = scaled[next++];
        }
      }
    }
  }

  RobustnessResult result;
  for (const auto& p : pairs) {
    if (p.adversarial.empty()) {
      ++result.skipped_no_adversarial;
      continue;
    }
    ImageRobustness img;
    img.image_id = p.image_id;
    img.n_adversarial = p.adversarial.size();

    const bool map_defined =
        p.original.map && std::all_of(p.adversarial.begin(), p.adversarial.end(),
                                      [](const ImageMetrics& a) { return a.map.has_value(); });
    if (map_defined) {
      robustness::PairedMetrics pm{*p.original.map, {}};
      for (const auto& a : p.adversarial) pm.adversarial.push_back(*a.map);
      img.report.rs_map = robustness::rs_map(pm);
    } else {
      ++result.skipped_no_map;
    }

    for (std::size_t u = 0; u < robustness::kUqmCount; ++u) {
      const auto orig = metric(p.original, u + 1);
      if (!orig) continue;
      robustness::PairedMetrics pm{*orig, {}};
      for (const auto& a : p.adversarial) {
        if (const auto v = metric(a, u + 1)) pm.adversarial.push_back(*v);
      }
      if (!pm.adversarial.empty()) img.report.rs_per_uqm[u] = robustness::rs_uqm(pm);
    }
    const bool uq_complete = std::all_of(img.report.rs_per_uqm.begin(), img.report.rs_per_uqm.end(),
                                         [](const auto& v) { return v.has_value(); });
    if (uq_complete) {
      img.report.rs_uq = robustness::rs_uq(img.report.rs_per_uqm);
    } else {
      ++result.skipped_no_uq;
    }
    result.images.push_back(std::move(img));
  }

  std::sort(result.images.begin(), result.images.end(),
            [](const auto& a, const auto& b) { return a.image_id < b.image_id; });

  std::vector<std::optional<double>> column;
  const auto dataset_mean = [&](auto get) {
    column.clear();
    for (const auto& img : result.images) column.push_back(get(img.report));
    return robustness::mean_of_defined(column);
  };
  result.dataset.rs_map = dataset_mean([](const auto& r) { return r.rs_map; });
  result.dataset.rs_uq = dataset_mean([](const auto& r) { return r.rs_uq; });
  for (std::size_t u = 0; u < robustness::kUqmCount; ++u) {
    result.dataset.rs_per_uqm[u] = dataset_mean([u](const auto& r) { return r.rs_per_uqm[u]; });
  }
  return result;
}

RobustnessResult run_robustness(const RunConfig& config) {
  check_run_config(config);
  const auto manifest = load_manifest_checked(config.manifest);
  const unsigned threads = worker_count(config.threads);

  std::vector<std::string> ids;
  std::vector<std::size_t> owner;
  for (std::size_t e = 0; e < manifest.entries.size(); ++e) {
    const auto& entry = manifest.entries[e];
    if (entry.adversarial.empty()) continue;
    ids.push_back(entry.original);
    owner.push_back(e);
    for (const auto& adv : entry.adversarial) {
      ids.push_back(adv);
      owner.push_back(e);
    }
  }
  const auto dumps = load_dumps(config.dumps, ids, threads);
  const auto options = options_from(config);
  std::vector<ImageEvaluation> evals(dumps.size());
  detail::parallel_for(dumps.size(), threads, [&](std::size_t i) {
    evals[i] = evaluate_image(dumps[i], manifest.entries[owner[i]].annotation, options);
  });

  std::vector<PairedImageMetrics> pairs;
  std::size_t next = 0;
  std::size_t without_adversarial = 0;
  for (const auto& entry : manifest.entries) {
    if (entry.adversarial.empty()) {
      ++without_adversarial;
      continue;
    }
    PairedImageMetrics p;
    p.image_id = entry.original;
    p.original = evals[next++].metrics;
    for (std::size_t a = 0; a < entry.adversarial.size(); ++a) {
      p.adversarial.push_back(evals[next++].metrics);
    }
    pairs.push_back(std::move(p));
  }
  if (without_adversarial > 0) {
    std::cerr << "warning: skipped " << without_adversarial
              << " manifest entries without adversarial images\n";
  }

  auto result = score_robustness(std::move(pairs), config.normalize_uqm);
  result.skipped_no_adversarial += without_adversarial;

  std::ostringstream csv;
  csv << "image_id,n_adversarial,RS_mAP";
  for (const char* name : robustness::kUqmNames) csv << ",RS_" << name;
  csv << ",RS_uq\n";
  for (const auto& img : result.images) {
    csv << img.image_id << ',' << img.n_adversarial << ',' << cell(img.report.rs_map);
    for (const auto& v : img.report.rs_per_uqm) csv << ',' << cell(v);
    csv << ',' << cell(img.report.rs_uq) << '\n';
  }

  json per_uqm = json::object();
  for (std::size_t u = 0; u < robustness::kUqmCount; ++u) {
    per_uqm[robustness::kUqmNames[u]] = optional_json(result.dataset.rs_per_uqm[u]);
  }
  const json summary{
      {"model_id", model_name(config)},
      {"dataset_id", manifest.name},
      {"normalize_uqm", config.normalize_uqm == UqmNormalization::MinMax ? "minmax" : "none"},
      {"map_source", map_source_name(config.map_source)},
      {"iou_threshold", config.iou_threshold},
      {"n_images_scored", result.images.size()},
      {"skipped_no_adversarial", result.skipped_no_adversarial},
      {"skipped_no_uq", result.skipped_no_uq},
      {"skipped_no_map", result.skipped_no_map},
      {"RS_mAP", optional_json(result.dataset.rs_map)},
      {"RS_uqm", per_uqm},
      {"RS_uq", optional_json(result.dataset.rs_uq)}};

  io::write_file(config.out / "robustness_per_image.csv", csv.str());
  io::write_file(config.out / "robustness_summary.json", summary.dump(2) + "\n");
  return result;
}

std::string compare_runs(const std::vector<EvaluationRun>& runs, double alpha) {
  return comparison_json(build_comparison(runs, alpha)).dump(2) + "\n";
}

void run_compare(const CompareConfig& config) {
  std::vector<EvaluationRun> runs;
  for (const auto& p : config.runs) runs.push_back(load_run_argument(p));
  const auto cmp = build_comparison(runs, config.alpha);

  std::ostringstream pairwise;
  pairwise << "metric,a,b,alternative,w_plus,w_minus,p_value,adjusted_p,reject,rank_biserial,"
              "magnitude\n";
  for (const auto& mc : cmp.metrics) {
    for (const auto& row : mc.pairwise) {
      pairwise << mc.name << ',' << cmp.models[row.a] << ',' << cmp.models[row.b] << ','
               << stats::to_string(row.test.alternative) << ','
               << io::format_double(row.test.test.w_plus) << ','
               << io::format_double(row.test.test.w_minus) << ','
               << io::format_double(row.test.test.p_value) << ','
               << io::format_double(row.holm.adjusted_p) << ',' << (row.holm.reject ? 1 : 0)
               << ',' << io::format_double(row.effect.r) << ','
               << stats::to_string(row.effect.magnitude) << '\n';
    }
  }
  std::ostringstream corr;
  corr << "model,uqm,n,rho,p_value,adjusted_p,significant\n";
  for (const auto& row : cmp.correlations) {
    corr << cmp.models[row.model] << ',' << row.uqm << ',' << row.n << ',';
    if (row.outcome && row.outcome->rho) {
      corr << io::format_double(*row.outcome->rho) << ',' << io::format_double(row.outcome->p_value)
           << ',' << io::format_double(row.holm.adjusted_p) << ',' << (row.holm.reject ? 1 : 0);
    } else {
      corr << "NA,NA,NA,0";
    }
    corr << '\n';
  }

  io::write_file(config.out / "comparison.json", comparison_json(cmp).dump(2) + "\n");
  io::write_file(config.out / "pairwise.csv", pairwise.str());
  io::write_file(config.out / "correlations.csv", corr.str());
}

void run_synth(const fs::path& config, const fs::path& out) {
  synth::SynthConfig cfg;
  try {
    cfg = io::parse_synth_config(io::read_file(config));
  } catch (const std::exception& e) {
    throw PipelineError(ExitCode::Schema, config.string() + ": " + e.what());
  }
  const auto problems = synth::validate_config(cfg);
  if (!problems.empty()) {
    std::string all;
    for (const auto& p : problems) all += config.string() + ": " + p + "\n";
    throw PipelineError(ExitCode::Schema, all);
  }
  const auto generated = synth::generate(cfg);
  io::write_file(out / "manifest.json", io::to_json(generated.manifest));
  for (const auto& dump : generated.dumps) {
    io::write_file(out / "dumps" / (dump.image_id + ".json"), io::to_json(dump));
  }
}

}  // namespace uqod::pipeline
