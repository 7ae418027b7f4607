#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "faceness/core.hpp"
#include "faceness/eval.hpp"
#include "faceness/pipeline.hpp"
#include "faceness/regress.hpp"
#include "faceness/synth.hpp"

namespace faceness::io {

// FPM map file, little-endian:
//   "FPM1" | u32 width | u32 height | u32 channels (= 5)
//   | channels x height x width f32, channel-major then row-major.
std::vector<std::uint8_t> encode_fpm(const MapSet& maps);
/// Throws BadMagic, Truncated, MalformedInput.
MapSet decode_fpm(const std::vector<std::uint8_t>& bytes);

void write_fpm(const std::filesystem::path& path, const MapSet& maps);
MapSet read_fpm(const std::filesystem::path& path);

std::string annotation_to_json(const SceneGroundTruth& truth);
SceneGroundTruth annotation_from_json(const std::string& text);
void write_annotation(const std::filesystem::path& path, const SceneGroundTruth& truth);
SceneGroundTruth read_annotation(const std::filesystem::path& path);

struct CandidateFile {
  std::vector<Window> windows;
  std::vector<double> scores;  // empty or parallel to windows
};

std::string candidates_to_json(const CandidateFile& c);
CandidateFile candidates_from_json(const std::string& text);
CandidateFile read_candidates(const std::filesystem::path& path);

/// Config file: pipeline settings plus the learning and batch defaults.
struct ConfigFile {
  PipelineConfig pipeline = PipelineConfig::defaults();
  /// Band search resolution of learn-lambda.
  double grid_step = 0.02;
  /// Positive IoU for proposal/ground-truth assignment.
  double assign_iou = 0.5;
  BatchPolicy batch;
};

std::string config_to_json(const ConfigFile& cfg);
/// Missing keys keep their defaults; the result is validated.
ConfigFile config_from_json(const std::string& text);
void write_config(const std::filesystem::path& path, const ConfigFile& cfg);
ConfigFile read_config(const std::filesystem::path& path);

std::string proposals_to_json(const std::vector<Proposal>& props);
std::vector<Proposal> proposals_from_json(const std::string& text);
void write_proposals(const std::filesystem::path& path, const std::vector<Proposal>& props);
std::vector<Proposal> read_proposals(const std::filesystem::path& path);

std::string scene_spec_to_json(const SceneSpec& spec);
SceneSpec scene_spec_from_json(const std::string& text);

struct TargetRecord {
  Assignment assignment;
  RegressionTarget target;
  /// "positive", "negative" or "out_of_range".
  std::string status;
};

std::string targets_to_json(const std::vector<TargetRecord>& records);

std::string dr_csv(const std::vector<DrPoint>& points);
std::string pr_csv(const PrCurve& curve);

std::string read_text(const std::filesystem::path& path);
/// Writes to a sibling temporary file, then renames it over `path`.
void write_text_atomic(const std::filesystem::path& path, const std::string& text);
void write_bytes_atomic(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes);

}  // namespace faceness::io
