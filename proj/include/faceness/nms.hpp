#pragma once

#include <optional>
#include <span>
#include <vector>

#include "faceness/core.hpp"

namespace faceness {

double iou(const Window& a, const Window& b);

/// Which score field of a Proposal drives suppression.
struct ScoreField {
  std::optional<PartId> part;  // empty selects the combined faceness

  static ScoreField faceness() { return {}; }
  static ScoreField of_part(PartId p) { return {p}; }

  /// Throws MissingScore when a part score is requested but absent.
  double read(const Proposal& p) const;
};

/// Result of greedy suppression over index positions of the input.
struct NmsResult {
  /// Kept input indices in output order.
  std::vector<std::size_t> kept;
  /// cluster[k] lists the input indices suppressed by kept[k] (excluding itself).
  std::vector<std::vector<std::size_t>> clusters;
};

/// Greedy NMS over parallel window/score arrays. Order is score descending,
/// ties by (y1, x1, y2, x2) ascending, then input position. A window is
/// suppressed when its IoU with an already kept window exceeds `iou_thresh`.
NmsResult greedy_nms_indices(std::span<const Window> windows, std::span<const double> scores, double iou_thresh);

std::vector<Proposal> greedy_nms(std::span<const Proposal> props, double iou_thresh,
                                 ScoreField score = ScoreField::faceness());

/// Per-part smoothing: greedy NMS on the part score where every kept window
/// takes the maximum part score over its cluster.
std::vector<Proposal> smooth_scores(std::span<const Proposal> props, PartId part, double iou_thresh);

}  // namespace faceness
