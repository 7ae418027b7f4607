#pragma once

#include <map>
#include <span>
#include <vector>

#include "faceness/core.hpp"
#include "faceness/pipeline.hpp"
#include "faceness/templates.hpp"

namespace faceness {

/// Grid of template parameters; every combination is one candidate.
struct TemplateSearchSpace {
  std::vector<double> anchor_x;
  std::vector<double> anchor_y;
  std::vector<double> threshold;
  std::vector<std::size_t> max_locations;

  std::size_t size() const { return anchor_x.size() * anchor_y.size() * threshold.size() * max_locations.size(); }
};

struct TrainingScene {
  MapSet maps;
  SceneGroundTruth truth;
};

struct TemplateScore {
  TemplateSpec spec;
  double recall = 0.0;
  double mean_proposals = 0.0;
};

/// Mean per-scene recall@n (IoU 0.5) of proposals driven by a single part's
/// map and templates.
TemplateScore evaluate_template(std::span<const TrainingScene> scenes, const TemplateSpec& spec,
                                const PipelineConfig& base, std::size_t n);

/// Per part, the grid point with the highest mean recall@n; ties go to fewer
/// mean proposals, then lexicographic (anchor_x, anchor_y, threshold,
/// max_locations). Scales and aspect come from `base.templates`.
/// Throws EmptySearchSpace, InvalidArgument for missing training faces.
std::map<PartId, TemplateSpec> tune_templates(std::span<const TrainingScene> scenes,
                                              const TemplateSearchSpace& space, std::size_t n,
                                              const PipelineConfig& base = PipelineConfig::defaults());

}  // namespace faceness
