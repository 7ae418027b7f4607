#pragma once

#include <span>
#include <vector>

#include "faceness/core.hpp"

namespace faceness {

/// Fraction of ground-truth faces matched by the top-`n` proposals at IoU >= `iou_thresh`.
/// Proposals are taken in rank order; each claims the best unclaimed face it
/// overlaps enough, so every face and every proposal is matched at most once.
/// Throws NoGroundTruth when no scene has a face.
double detection_rate(std::span<const std::vector<Proposal>> props_per_scene, std::span<const SceneGroundTruth> gts,
                      std::size_t n, double iou_thresh = 0.5);

struct DrPoint {
  std::size_t n = 0;
  double detection_rate = 0.0;
};

/// Detection rate for every n in `ns`.
std::vector<DrPoint> dr_curve(std::span<const std::vector<Proposal>> props_per_scene,
                              std::span<const SceneGroundTruth> gts, std::span<const std::size_t> ns,
                              double iou_thresh = 0.5);

struct ScoredDetection {
  Window window;
  double score = 0.0;
  std::size_t scene = 0;
};

struct PrPoint {
  double recall = 0.0;
  double precision = 0.0;
};

struct PrCurve {
  /// One point per detection in descending score order.
  std::vector<PrPoint> points;
  /// All-points interpolated average precision.
  double ap = 0.0;
};

PrCurve pr_curve(std::span<const ScoredDetection> dets, std::span<const SceneGroundTruth> gts,
                 double iou_thresh = 0.5);

/// Running maximum of precision from the right: the interpolated envelope.
std::vector<PrPoint> precision_envelope(std::span<const PrPoint> points);

}  // namespace faceness
