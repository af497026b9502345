#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "uqod/synthgen.hpp"
#include "uqod/types.hpp"

namespace uqod::io {

/// Input that does not follow the wire format.
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

PredictionDump parse_dump(std::string_view json);
GroundTruthAnnotation parse_annotation(std::string_view json);
DatasetManifest parse_manifest(std::string_view json);
EvaluationRun parse_run(std::string_view json);
synth::SynthConfig parse_synth_config(std::string_view json);

std::string to_json(const PredictionDump& dump);
std::string to_json(const GroundTruthAnnotation& annotation);
std::string to_json(const DatasetManifest& manifest);
std::string to_json(const EvaluationRun& run);

/// Whole file as a string. Throws std::runtime_error when unreadable.
std::string read_file(const std::filesystem::path& path);

/// Writes atomically enough for reports: truncate, write, close.
void write_file(const std::filesystem::path& path, std::string_view contents);

PredictionDump load_dump(const std::filesystem::path& path);
DatasetManifest load_manifest(const std::filesystem::path& path);
EvaluationRun load_run(const std::filesystem::path& path);

/// Locale-independent shortest form with at most `digits` significant digits.
std::string format_double(double value, int digits = 6);

}  // namespace uqod::io
