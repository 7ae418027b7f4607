#pragma once

#include <map>
#include <span>
#include <vector>

#include "faceness/core.hpp"
#include "faceness/integral.hpp"
#include "faceness/scoring.hpp"
#include "faceness/templates.hpp"

namespace faceness {

struct NmsSettings {
  /// Per-part score smoothing.
  double smooth_iou = 0.5;
  /// Final suppression on combined faceness.
  double final_iou = 0.7;
  /// Deduplication of pooled template + external candidates.
  double dedup_iou = 0.95;
};

/// Everything `propose` needs besides the maps; mirrors the config file.
struct PipelineConfig {
  FacenessParams faceness = FacenessParams::defaults();
  std::map<PartId, TemplateSpec> templates;
  NmsSettings nms;
  std::size_t top_n = 200;
  /// Image pixels per map pixel.
  double stride = 1.0;
  /// Score external and template candidates together instead of external only.
  bool pool_candidates = false;

  static PipelineConfig defaults();
  void validate() const;
};

/// Maps plus their summed-area tables, sharing one image frame.
class SceneMaps {
 public:
  /// Throws NoMaps for an empty set, InvalidArgument for mismatched sizes.
  SceneMaps(MapSet maps, double stride);

  const MapSet& maps() const { return maps_; }
  const std::map<PartId, IntegralMap>& integrals() const { return integrals_; }
  double stride() const { return stride_; }
  double image_width() const { return image_width_; }
  double image_height() const { return image_height_; }

 private:
  MapSet maps_;
  std::map<PartId, IntegralMap> integrals_;
  double stride_;
  double image_width_;
  double image_height_;
};

/// Template windows from every part map that has a spec, in part order.
std::vector<Proposal> template_proposals(const SceneMaps& scene, const std::map<PartId, TemplateSpec>& specs);

/// External windows clipped to the image; windows outside it are skipped.
std::vector<Proposal> external_proposals(const SceneMaps& scene, std::span<const Window> windows,
                                         std::span<const double> scores = {});

/// Fills part_scores for every available map and the combined faceness.
void score_proposals(const SceneMaps& scene, const FacenessParams& params, std::vector<Proposal>& props);

/// Per-part smoothing, averaging, final NMS and truncation on scored candidates.
/// The result is the union of windows kept by any part's smoothing round.
std::vector<Proposal> rerank(std::vector<Proposal> scored, const PipelineConfig& cfg, std::size_t top_n);

/// End-to-end first stage. External windows replace template candidates
/// unless `cfg.pool_candidates` is set. Throws NoMaps.
std::vector<Proposal> propose(const MapSet& maps, const PipelineConfig& cfg, std::span<const Window> external = {},
                              std::span<const double> external_scores = {});

/// Candidates ranked by their seed response alone (no faceness re-scoring).
std::vector<Proposal> rank_by_seed(std::vector<Proposal> candidates);

}  // namespace faceness
