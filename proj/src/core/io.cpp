#include "uqod/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace uqod::io {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw SchemaError(where + ": " + what);
}

json parse_text(std::string_view text, const char* what) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string(what) + ": malformed JSON (" + e.what() + ")");
  }
}

const json& field(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) fail(where, "expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) fail(where, std::string("missing \"") + key + "\"");
  return *it;
}

double number(const json& v, const std::string& where) {
  if (!v.is_number()) fail(where, "expected a number");
  return v.get<double>();
}

long integer(const json& v, const std::string& where) {
  if (!v.is_number_integer()) fail(where, "expected an integer");
  return v.get<long>();
}

std::string text(const json& v, const std::string& where) {
  if (!v.is_string()) fail(where, "expected a string");
  return v.get<std::string>();
}

const json& array(const json& v, const std::string& where) {
  if (!v.is_array()) fail(where, "expected an array");
  return v;
}

BoundingBox box_from(const json& v, const std::string& where) {
  const auto& arr = array(v, where);
  if (arr.size() != 4) fail(where, "box needs exactly 4 numbers [x1, y1, x2, y2]");
  return BoundingBox{number(arr[0], where), number(arr[1], where), number(arr[2], where),
                     number(arr[3], where)};
}

json box_to(const BoundingBox& b) { return json::array({b.x1, b.y1, b.x2, b.y2}); }

GroundTruthAnnotation annotation_from(const json& j, const std::string& where) {
  GroundTruthAnnotation out;
  out.image_id = text(field(j, "image_id", where), where + ".image_id");
  const auto& objects = array(field(j, "objects", where), where + ".objects");
  for (std::size_t i = 0; i < objects.size(); ++i) {
    const std::string at = where + ".objects[" + std::to_string(i) + "]";
    GroundTruthObject obj;
    obj.label = static_cast<int>(integer(field(objects[i], "label", at), at + ".label"));
    obj.box = box_from(field(objects[i], "box", at), at + ".box");
    out.objects.push_back(obj);
  }
  return out;
}

json annotation_to(const GroundTruthAnnotation& a) {
  json objects = json::array();
  for (const auto& o : a.objects) objects.push_back({{"label", o.label}, {"box", box_to(o.box)}});
  return {{"image_id", a.image_id}, {"objects", objects}};
}

json optional_number(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

std::optional<double> optional_from(const json& obj, const char* key, const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  return number(*it, where + "." + key);
}

}  // namespace

PredictionDump parse_dump(std::string_view raw) {
  const json j = parse_text(raw, "dump");
  const std::string where = "dump";
  PredictionDump out;
  out.image_id = text(field(j, "image_id", where), "dump.image_id");
  out.passes = static_cast<int>(integer(field(j, "T", where), "dump.T"));
  out.dropout_rate = number(field(j, "dropout_rate", where), "dump.dropout_rate");
  const auto& dets = array(field(j, "detections", where), "dump.detections");
  out.detections.reserve(dets.size());
  for (std::size_t i = 0; i < dets.size(); ++i) {
    const std::string at = "dump.detections[" + std::to_string(i) + "]";
    Detection d;
    d.pass_index = static_cast<int>(integer(field(dets[i], "pass", at), at + ".pass"));
    d.box = box_from(field(dets[i], "box", at), at + ".box");
    const auto& sm = array(field(dets[i], "softmax", at), at + ".softmax");
    for (const auto& p : sm) d.score.probabilities.push_back(number(p, at + ".softmax"));
    out.detections.push_back(std::move(d));
  }
  return out;
}

GroundTruthAnnotation parse_annotation(std::string_view raw) {
  return annotation_from(parse_text(raw, "annotation"), "annotation");
}

DatasetManifest parse_manifest(std::string_view raw) {
  const json j = parse_text(raw, "manifest");
  DatasetManifest out;
  out.name = text(field(j, "name", "manifest"), "manifest.name");
  const auto& entries = array(field(j, "entries", "manifest"), "manifest.entries");
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const std::string at = "manifest.entries[" + std::to_string(i) + "]";
    ManifestEntry e;
    e.original = text(field(entries[i], "original", at), at + ".original");
    const auto adv = entries[i].find("adversarial");
    if (adv != entries[i].end()) {
      for (const auto& ref : array(*adv, at + ".adversarial")) {
        e.adversarial.push_back(text(ref, at + ".adversarial"));
      }
    }
    e.annotation = annotation_from(field(entries[i], "annotation", at), at + ".annotation");
    out.entries.push_back(std::move(e));
  }
  return out;
}

EvaluationRun parse_run(std::string_view raw) {
  const json j = parse_text(raw, "run");
  EvaluationRun out;
  out.model_id = text(field(j, "model_id", "run"), "run.model_id");
  out.dataset_id = text(field(j, "dataset_id", "run"), "run.dataset_id");
  out.dropout_rate = number(field(j, "dropout_rate", "run"), "run.dropout_rate");
  const auto& per_image = field(j, "per_image", "run");
  if (!per_image.is_object()) fail("run.per_image", "expected an object");
  for (const auto& [id, row] : per_image.items()) {
    const std::string at = "run.per_image." + id;
    if (!row.is_object()) fail(at, "expected an object");
    ImageMetrics m;
    m.map = optional_from(row, "mAP", at);
    m.vr = optional_from(row, "VR", at);
    m.se = optional_from(row, "SE", at);
    m.mi = optional_from(row, "MI", at);
    m.tv = optional_from(row, "TV", at);
    m.ps = optional_from(row, "PS", at);
    out.per_image.emplace(id, m);
  }
  return out;
}

synth::SynthConfig parse_synth_config(std::string_view raw) {
  const json j = parse_text(raw, "synth config");
  if (!j.is_object()) fail("synth config", "expected an object");
  static const std::set<std::string> known{
      "dataset_name", "n_images",           "objects_per_image", "T",
      "box_jitter_sigma", "label_flip_prob", "softmax_temperature", "logit_noise",
      "detect_drop_prob", "adversarial_degradation", "n_adversarial", "rng_seed",
      "dropout_rate", "class_count", "image_width", "image_height", "box_size"};
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) fail("synth config", "unknown key \"" + key + "\"");
  }

  synth::SynthConfig c;
  const auto num = [&](const char* key, double& target) {
    if (j.contains(key)) target = number(j.at(key), std::string("synth.") + key);
  };
  const auto count = [&](const char* key, auto& target) {
    if (!j.contains(key)) return;
    const long v = integer(j.at(key), std::string("synth.") + key);
    if (v < 0) fail(std::string("synth.") + key, "must be non-negative");
    target = static_cast<std::remove_reference_t<decltype(target)>>(v);
  };
  if (j.contains("dataset_name")) c.dataset_name = text(j.at("dataset_name"), "synth.dataset_name");
  count("n_images", c.n_images);
  count("T", c.passes);
  count("n_adversarial", c.n_adversarial);
  count("class_count", c.class_count);
  if (j.contains("rng_seed")) {
    const auto& s = j.at("rng_seed");
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0)) {
      fail("synth.rng_seed", "expected a non-negative integer");
    }
    c.rng_seed = s.get<std::uint64_t>();
  }
  num("box_jitter_sigma", c.box_jitter_sigma);
  num("label_flip_prob", c.label_flip_prob);
  num("softmax_temperature", c.softmax_temperature);
  num("logit_noise", c.logit_noise);
  num("detect_drop_prob", c.detect_drop_prob);
  num("dropout_rate", c.dropout_rate);
  num("image_width", c.image_width);
  num("image_height", c.image_height);
  if (j.contains("objects_per_image")) {
    const auto& r = array(j.at("objects_per_image"), "synth.objects_per_image");
    if (r.size() != 2) fail("synth.objects_per_image", "expected [min, max]");
    c.min_objects = static_cast<int>(integer(r[0], "synth.objects_per_image"));
    c.max_objects = static_cast<int>(integer(r[1], "synth.objects_per_image"));
  }
  if (j.contains("box_size")) {
    const auto& r = array(j.at("box_size"), "synth.box_size");
    if (r.size() != 2) fail("synth.box_size", "expected [min, max]");
    c.min_box_size = number(r[0], "synth.box_size");
    c.max_box_size = number(r[1], "synth.box_size");
  }
  if (j.contains("adversarial_degradation")) {
    const auto& a = j.at("adversarial_degradation");
    if (!a.is_object()) fail("synth.adversarial_degradation", "expected an object");
    if (a.contains("extra_jitter")) {
      c.adversarial.extra_jitter = number(a.at("extra_jitter"), "synth.adversarial_degradation");
    }
    if (a.contains("extra_flip")) {
      c.adversarial.extra_flip = number(a.at("extra_flip"), "synth.adversarial_degradation");
    }
  }
  return c;
}

std::string to_json(const PredictionDump& dump) {
  json dets = json::array();
  for (const auto& d : dump.detections) {
    dets.push_back({{"pass", d.pass_index}, {"box", box_to(d.box)}, {"softmax", d.score.probabilities}});
  }
  const json j{{"image_id", dump.image_id},
               {"T", dump.passes},
               {"dropout_rate", dump.dropout_rate},
               {"detections", dets}};
  return j.dump() + "\n";
}

std::string to_json(const GroundTruthAnnotation& annotation) {
  return annotation_to(annotation).dump() + "\n";
}

std::string to_json(const DatasetManifest& manifest) {
  json entries = json::array();
  for (const auto& e : manifest.entries) {
    entries.push_back({{"original", e.original},
                       {"adversarial", e.adversarial},
                       {"annotation", annotation_to(e.annotation)}});
  }
  return json{{"name", manifest.name}, {"entries", entries}}.dump(2) + "\n";
}

std::string to_json(const EvaluationRun& run) {
  json per_image = json::object();
  for (const auto& [id, m] : run.per_image) {
    per_image[id] = {{"mAP", optional_number(m.map)}, {"VR", optional_number(m.vr)},
                     {"SE", optional_number(m.se)},   {"MI", optional_number(m.mi)},
                     {"TV", optional_number(m.tv)},   {"PS", optional_number(m.ps)}};
  }
  return json{{"model_id", run.model_id},
              {"dataset_id", run.dataset_id},
              {"dropout_rate", run.dropout_rate},
              {"per_image", per_image}}
             .dump(2) +
         "\n";
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw std::runtime_error("short write to " + path.string());
}

PredictionDump load_dump(const std::filesystem::path& path) { return parse_dump(read_file(path)); }

DatasetManifest load_manifest(const std::filesystem::path& path) {
  return parse_manifest(read_file(path));
}

EvaluationRun load_run(const std::filesystem::path& path) { return parse_run(read_file(path)); }

std::string format_double(double value, int digits) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (value == 0.0) value = 0.0;  // drop the sign of -0
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, digits);
  return std::string(buf, res.ptr);
}

}  // namespace uqod::io
