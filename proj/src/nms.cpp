#include "faceness/nms.hpp"

#include <algorithm>
#include <numeric>

namespace faceness {

double iou(const Window& a, const Window& b) {
  const double inter = intersection_area(a, b);
  if (inter <= 0.0) return 0.0;
  const double uni = a.area() + b.area() - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

double ScoreField::read(const Proposal& p) const {
  if (!part) return p.faceness;
  const auto& s = p.part_scores[part_index(*part)];
  if (!s) throw Error(ErrorKind::MissingScore, "proposal lacks a " + std::string(part_name(*part)) + " score");
  return *s;
}

NmsResult greedy_nms_indices(std::span<const Window> windows, std::span<const double> scores, double iou_thresh) {
  if (windows.size() != scores.size()) throw Error(ErrorKind::InvalidArgument, "windows and scores differ in length");
  if (!(iou_thresh > 0.0 && iou_thresh <= 1.0)) throw Error(ErrorKind::InvalidArgument, "iou_thresh must lie in (0, 1]");

  std::vector<std::size_t> order(windows.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return window_order_less(windows[a], windows[b]);
  });

  NmsResult result;
  std::vector<char> suppressed(windows.size(), 0);
  for (std::size_t oi = 0; oi < order.size(); ++oi) {
    const std::size_t i = order[oi];
    if (suppressed[i]) continue;
    result.kept.push_back(i);
    auto& cluster = result.clusters.emplace_back();
    const Window& wi = windows[i];
    const double area_i = wi.area();
    for (std::size_t oj = oi + 1; oj < order.size(); ++oj) {
      const std::size_t j = order[oj];
      if (suppressed[j]) continue;
      const Window& wj = windows[j];
      const double inter = intersection_area(wi, wj);
      if (inter <= 0.0) continue;
      if (inter / (area_i + wj.area() - inter) > iou_thresh) {
        suppressed[j] = 1;
        cluster.push_back(j);
      }
    }
  }
  return result;
}

namespace {

void split(std::span<const Proposal> props, const ScoreField& field, std::vector<Window>& windows,
           std::vector<double>& scores) {
  windows.reserve(props.size());
  scores.reserve(props.size());
  for (const auto& p : props) {
    windows.push_back(p.window);
    scores.push_back(field.read(p));
  }
}

}  // namespace

std::vector<Proposal> greedy_nms(std::span<const Proposal> props, double iou_thresh, ScoreField score) {
  std::vector<Window> windows;
  std::vector<double> scores;
  split(props, score, windows, scores);
  const NmsResult r = greedy_nms_indices(windows, scores, iou_thresh);
  std::vector<Proposal> out;
  out.reserve(r.kept.size());
  for (std::size_t i : r.kept) out.push_back(props[i]);
  return out;
}

std::vector<Proposal> smooth_scores(std::span<const Proposal> props, PartId part, double iou_thresh) {
  const ScoreField field = ScoreField::of_part(part);
  std::vector<Window> windows;
  std::vector<double> scores;
  split(props, field, windows, scores);
  const NmsResult r = greedy_nms_indices(windows, scores, iou_thresh);
  std::vector<Proposal> out;
  out.reserve(r.kept.size());
  for (std::size_t k = 0; k < r.kept.size(); ++k) {
    Proposal p = props[r.kept[k]];
    double best = scores[r.kept[k]];
    for (std::size_t j : r.clusters[k]) best = std::max(best, scores[j]);
    p.part_scores[part_index(part)] = best;
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace faceness
