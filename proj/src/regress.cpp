#include "faceness/regress.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "faceness/nms.hpp"

namespace faceness {

std::vector<Assignment> assign(std::span<const Window> props, std::span<const Window> gts, double iou_pos) {
  if (!(iou_pos > 0.0 && iou_pos < 1.0)) throw Error(ErrorKind::InvalidArgument, "iou_pos must lie in (0, 1)");
  std::vector<Assignment> out;
  out.reserve(props.size());
  for (std::size_t i = 0; i < props.size(); ++i) {
    Assignment a;
    a.proposal = i;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t g = 0; g < gts.size(); ++g) {
      const double dx = props[i].center_x() - gts[g].center_x();
      const double dy = props[i].center_y() - gts[g].center_y();
      const double d2 = dx * dx + dy * dy;
      if (d2 < best) {
        best = d2;
        a.gt = g;
      }
    }
    if (a.gt) {
      a.iou = iou(props[i], gts[*a.gt]);
      a.positive = a.iou > iou_pos;
    }
    out.push_back(a);
  }
  return out;
}

RegressionTarget encode(const Window& gt, const Window& prop) {
  if (!prop.valid()) throw Error(ErrorKind::EmptyWindow, "proposal must have positive area");
  const double zeta = std::max(prop.width(), prop.height());
  RegressionTarget r;
  r.t = {(gt.x1 - prop.x1) / zeta, (gt.y1 - prop.y1) / zeta, (gt.x2 - prop.x2) / zeta, (gt.y2 - prop.y2) / zeta};
  for (double v : r.t) {
    if (!(v >= -1.0 && v <= 1.0)) throw Error(ErrorKind::OutOfRange, "regression target leaves [-1, 1]");
  }
  r.valid = true;
  return r;
}

Window decode(const Window& prop, const RegressionTarget& t) {
  if (!t.valid) throw Error(ErrorKind::InvalidTarget, "cannot decode the non-face sentinel");
  const double zeta = std::max(prop.width(), prop.height());
  return {prop.x1 + t.t[0] * zeta, prop.y1 + t.t[1] * zeta, prop.x2 + t.t[2] * zeta, prop.y2 + t.t[3] * zeta};
}

namespace {

Window jittered_crop(const Window& gt, std::mt19937_64& rng, const BatchPolicy& policy) {
  std::uniform_real_distribution<double> u(-policy.jitter, policy.jitter);
  constexpr int kAttempts = 100;
  for (int attempt = 0; attempt < kAttempts; ++attempt) {
    const double w = gt.width();
    const double h = gt.height();
    const Window c{gt.x1 + u(rng) * w, gt.y1 + u(rng) * h, gt.x2 + u(rng) * w, gt.y2 + u(rng) * h};
    if (c.valid() && iou(c, gt) >= policy.min_crop_iou) return c;
  }
  return gt;
}

}  // namespace

std::vector<TrainingSample> compose_batch(std::span<const TrainingSample> samples, std::span<const Window> gts,
                                          std::size_t batch, std::uint64_t rng_seed, const BatchPolicy& policy) {
  if (batch < 5) throw Error(ErrorKind::InvalidArgument, "batch must hold at least 5 samples");
  std::mt19937_64 rng(rng_seed);

  std::vector<TrainingSample> positives;
  std::vector<Window> neg_windows;
  std::vector<double> neg_scores;
  std::vector<const TrainingSample*> neg_src;
  for (const auto& s : samples) {
    if (s.label != 0) {
      positives.push_back(s);
    } else {
      neg_windows.push_back(s.window);
      neg_scores.push_back(s.score);
      neg_src.push_back(&s);
    }
  }
  std::vector<TrainingSample> negatives;
  for (std::size_t i : greedy_nms_indices(neg_windows, neg_scores, policy.negative_nms_iou).kept)
    negatives.push_back(*neg_src[i]);

  std::shuffle(positives.begin(), positives.end(), rng);
  std::shuffle(negatives.begin(), negatives.end(), rng);

  const auto min_pos = static_cast<std::size_t>(std::ceil(policy.min_positive_fraction * static_cast<double>(batch) - 1e-9));
  const std::size_t available = positives.size() + negatives.size();
  const double ratio = available > 0 ? static_cast<double>(positives.size()) / static_cast<double>(available) : 0.0;

  std::size_t n_pos = 0;
  std::size_t n_crops = 0;
  if (available > 0 && ratio >= policy.min_positive_fraction) {
    const auto proportional = static_cast<std::size_t>(std::lround(ratio * static_cast<double>(batch)));
    n_pos = std::min(positives.size(), std::max(min_pos, proportional));
  } else {
    n_pos = min_pos;
    n_crops = n_pos - std::min(n_pos, positives.size());
  }
  const std::size_t n_real = n_pos - n_crops;
  const std::size_t n_neg = std::min(negatives.size(), batch - n_pos);
  if (n_crops > 0 && gts.empty())
    throw Error(ErrorKind::NoGroundTruth, "positive crops are required but no ground truth is available");

  std::vector<TrainingSample> out(positives.begin(), positives.begin() + static_cast<long>(n_real));
  std::uniform_int_distribution<std::size_t> pick(0, gts.empty() ? 0 : gts.size() - 1);
  for (std::size_t i = 0; i < n_crops; ++i) {
    const Window& src = gts[pick(rng)];
    out.push_back({jittered_crop(src, rng, policy), 1, 0.0, true});
  }
  out.insert(out.end(), negatives.begin(), negatives.begin() + static_cast<long>(n_neg));
  std::shuffle(out.begin(), out.end(), rng);
  return out;
}

}  // namespace faceness
