#include "faceness/eval.hpp"

#include <algorithm>
#include <numeric>

#include "faceness/nms.hpp"

namespace faceness {

namespace {

// Best unclaimed face with IoU >= thresh; ties go to the lower index.
std::ptrdiff_t match_best(const Window& w, std::span<const FaceAnnotation> faces, const std::vector<char>& claimed,
                          double iou_thresh) {
  std::ptrdiff_t best = -1;
  double best_iou = 0.0;
  for (std::size_t g = 0; g < faces.size(); ++g) {
    if (claimed[g]) continue;
    const double v = iou(w, faces[g].face_box);
    if (v >= iou_thresh && (best < 0 || v > best_iou)) {
      best = static_cast<std::ptrdiff_t>(g);
      best_iou = v;
    }
  }
  return best;
}

std::size_t total_faces(std::span<const SceneGroundTruth> gts) {
  std::size_t n = 0;
  for (const auto& g : gts) n += g.faces.size();
  return n;
}

}  // namespace

double detection_rate(std::span<const std::vector<Proposal>> props_per_scene, std::span<const SceneGroundTruth> gts,
                      std::size_t n, double iou_thresh) {
  if (props_per_scene.size() != gts.size())
    throw Error(ErrorKind::InvalidArgument, "proposal and ground-truth scene counts differ");
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "n must be >= 1");
  const std::size_t faces = total_faces(gts);
  if (faces == 0) throw Error(ErrorKind::NoGroundTruth, "no ground-truth faces");

  std::size_t matched = 0;
  for (std::size_t s = 0; s < gts.size(); ++s) {
    const auto& scene_faces = gts[s].faces;
    std::vector<char> claimed(scene_faces.size(), 0);
    const std::size_t limit = std::min(n, props_per_scene[s].size());
    for (std::size_t r = 0; r < limit; ++r) {
      const auto g = match_best(props_per_scene[s][r].window, scene_faces, claimed, iou_thresh);
      if (g >= 0) {
        claimed[static_cast<std::size_t>(g)] = 1;
        ++matched;
      }
    }
  }
  return static_cast<double>(matched) / static_cast<double>(faces);
}

std::vector<DrPoint> dr_curve(std::span<const std::vector<Proposal>> props_per_scene,
                              std::span<const SceneGroundTruth> gts, std::span<const std::size_t> ns,
                              double iou_thresh) {
  std::vector<DrPoint> out;
  out.reserve(ns.size());
  for (std::size_t n : ns) out.push_back({n, detection_rate(props_per_scene, gts, n, iou_thresh)});
  return out;
}

PrCurve pr_curve(std::span<const ScoredDetection> dets, std::span<const SceneGroundTruth> gts, double iou_thresh) {
  std::vector<std::size_t> order(dets.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return dets[a].score > dets[b].score; });

  std::vector<std::vector<char>> claimed;
  claimed.reserve(gts.size());
  for (const auto& g : gts) claimed.emplace_back(g.faces.size(), 0);
  const std::size_t faces = total_faces(gts);

  PrCurve curve;
  curve.points.reserve(dets.size());
  std::size_t tp = 0;
  std::size_t fp = 0;
  for (std::size_t i : order) {
    const auto& d = dets[i];
    if (d.scene >= gts.size()) throw Error(ErrorKind::InvalidArgument, "detection refers to an unknown scene");
    const auto g = match_best(d.window, gts[d.scene].faces, claimed[d.scene], iou_thresh);
    if (g >= 0) {
      claimed[d.scene][static_cast<std::size_t>(g)] = 1;
      ++tp;
    } else {
      ++fp;
    }
    const double recall = faces > 0 ? static_cast<double>(tp) / static_cast<double>(faces) : 0.0;
    curve.points.push_back({recall, static_cast<double>(tp) / static_cast<double>(tp + fp)});
  }

  const auto env = precision_envelope(curve.points);
  double prev_recall = 0.0;
  for (const auto& p : env) {
    curve.ap += (p.recall - prev_recall) * p.precision;
    prev_recall = p.recall;
  }
  return curve;
}

std::vector<PrPoint> precision_envelope(std::span<const PrPoint> points) {
  std::vector<PrPoint> env(points.begin(), points.end());
  for (std::size_t i = env.size(); i-- > 1;) env[i - 1].precision = std::max(env[i - 1].precision, env[i].precision);
  return env;
}

}  // namespace faceness
