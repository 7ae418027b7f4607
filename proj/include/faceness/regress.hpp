#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "faceness/core.hpp"

namespace faceness {

/// Corner displacements normalized by the proposal's larger side.
struct RegressionTarget {
  std::array<double, 4> t{-1.0, -1.0, -1.0, -1.0};
  bool valid = false;

  /// Non-face marker; learners ignore its components.
  static RegressionTarget sentinel() { return {}; }
};

struct Assignment {
  std::size_t proposal = 0;
  std::optional<std::size_t> gt;
  bool positive = false;
  double iou = 0.0;
};

/// Assigns each proposal to the ground truth with the nearest center (ties to
/// the lower index); positive iff IoU with it exceeds `iou_pos`.
std::vector<Assignment> assign(std::span<const Window> props, std::span<const Window> gts, double iou_pos = 0.5);

/// Throws OutOfRange when any component leaves [-1, 1].
RegressionTarget encode(const Window& gt, const Window& prop);

/// Inverse of `encode`. Throws InvalidTarget on the sentinel.
Window decode(const Window& prop, const RegressionTarget& t);

struct TrainingSample {
  Window window;
  int label = 0;
  /// Ranking score used by the negative pre-filter NMS.
  double score = 0.0;
  /// True for positives cropped from ground truth.
  bool synthetic = false;
};

struct BatchPolicy {
  double min_positive_fraction = 0.2;
  double negative_nms_iou = 0.7;
  /// Per-coordinate jitter bound as a fraction of the ground-truth side.
  double jitter = 0.1;
  /// Minimum IoU between a jittered crop and its source box.
  double min_crop_iou = 0.5;
};

/// Mini-batch with at least `min_positive_fraction` positives. Negatives are
/// NMS-filtered first; missing positives are filled with jittered ground
/// truth crops. Deterministic in `rng_seed`.
/// Throws NoGroundTruth when crops are needed but `gts` is empty.
std::vector<TrainingSample> compose_batch(std::span<const TrainingSample> samples, std::span<const Window> gts,
                                          std::size_t batch, std::uint64_t rng_seed, const BatchPolicy& policy = {});

}  // namespace faceness
