#include "faceness/tuning.hpp"

#include <algorithm>

#include "faceness/eval.hpp"

namespace faceness {

TemplateScore evaluate_template(std::span<const TrainingScene> scenes, const TemplateSpec& spec,
                                const PipelineConfig& base, std::size_t n) {
  PipelineConfig cfg = base;
  cfg.templates = {{spec.part, spec}};
  cfg.top_n = n;

  TemplateScore score{spec, 0.0, 0.0};
  std::size_t counted = 0;
  for (const auto& scene : scenes) {
    auto it = scene.maps.find(spec.part);
    if (it == scene.maps.end() || scene.truth.faces.empty()) continue;
    const MapSet single{{spec.part, it->second}};
    const std::vector<std::vector<Proposal>> props{propose(single, cfg)};
    const SceneGroundTruth truth[] = {scene.truth};
    score.recall += detection_rate(props, truth, n, 0.5);
    score.mean_proposals += static_cast<double>(props.front().size());
    ++counted;
  }
  if (counted > 0) {
    score.recall /= static_cast<double>(counted);
    score.mean_proposals /= static_cast<double>(counted);
  }
  return score;
}

std::map<PartId, TemplateSpec> tune_templates(std::span<const TrainingScene> scenes,
                                              const TemplateSearchSpace& grid, std::size_t n,
                                              const PipelineConfig& base) {
  TemplateSearchSpace space = grid;
  std::sort(space.anchor_x.begin(), space.anchor_x.end());
  std::sort(space.anchor_y.begin(), space.anchor_y.end());
  std::sort(space.threshold.begin(), space.threshold.end());
  std::sort(space.max_locations.begin(), space.max_locations.end());
  if (space.size() == 0) throw Error(ErrorKind::EmptySearchSpace, "template search space has no points");
  bool any_face = false;
  for (const auto& s : scenes) any_face = any_face || !s.truth.faces.empty();
  if (!any_face) throw Error(ErrorKind::InvalidArgument, "tuning needs at least one training face");

  std::map<PartId, TemplateSpec> tuned;
  for (const auto& [part, base_spec] : base.templates) {
    bool has_map = false;
    for (const auto& s : scenes) has_map = has_map || s.maps.contains(part);
    if (!has_map) {
      tuned[part] = base_spec;
      continue;
    }
    bool found = false;
    TemplateScore best;
    // Nested ascending loops visit points in lexicographic order; only strict
    // improvements replace the incumbent.
    for (double ax : space.anchor_x) {
      for (double ay : space.anchor_y) {
        for (double t : space.threshold) {
          for (std::size_t m : space.max_locations) {
            TemplateSpec spec = base_spec;
            spec.anchor_x = ax;
            spec.anchor_y = ay;
            spec.threshold = t;
            spec.max_locations = m;
            spec.validate();
            const TemplateScore s = evaluate_template(scenes, spec, base, n);
            const bool better = !found || s.recall > best.recall ||
                                (s.recall == best.recall && s.mean_proposals < best.mean_proposals);
            if (better) {
              best = s;
              found = true;
            }
          }
        }
      }
    }
    tuned[part] = best.spec;
  }
  return tuned;
}

}  // namespace faceness
