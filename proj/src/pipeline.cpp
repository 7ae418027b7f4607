#include "faceness/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "faceness/nms.hpp"

namespace faceness {

PipelineConfig PipelineConfig::defaults() {
  PipelineConfig cfg;
  for (PartId p : kAllParts) cfg.templates[p] = default_template_spec(p);
  return cfg;
}

void PipelineConfig::validate() const {
  faceness.validate();
  for (const auto& [part, spec] : templates) {
    if (spec.part != part) throw Error(ErrorKind::PartMismatch, "template spec keyed under the wrong part");
    spec.validate();
  }
  auto check_iou = [](double v, const char* name) {
    if (!(v > 0.0 && v <= 1.0)) throw Error(ErrorKind::InvalidArgument, std::string(name) + " must lie in (0, 1]");
  };
  check_iou(nms.smooth_iou, "smooth_iou");
  check_iou(nms.final_iou, "final_iou");
  check_iou(nms.dedup_iou, "dedup_iou");
  if (top_n < 1) throw Error(ErrorKind::InvalidArgument, "top_n must be >= 1");
  if (!(stride > 0.0)) throw Error(ErrorKind::InvalidArgument, "stride must be positive");
}

SceneMaps::SceneMaps(MapSet maps, double stride) : maps_(std::move(maps)), stride_(stride) {
  if (maps_.empty()) throw Error(ErrorKind::NoMaps, "no partness maps supplied");
  if (!(stride > 0.0)) throw Error(ErrorKind::InvalidArgument, "stride must be positive");
  const auto& first = maps_.begin()->second;
  for (const auto& [part, m] : maps_) {
    if (m.part() != part) throw Error(ErrorKind::PartMismatch, "map keyed under the wrong part");
    if (m.width() != first.width() || m.height() != first.height())
      throw Error(ErrorKind::InvalidArgument, "partness maps differ in size");
    integrals_.emplace(part, build_integral(m));
  }
  image_width_ = static_cast<double>(first.width()) * stride;
  image_height_ = static_cast<double>(first.height()) * stride;
}

std::vector<Proposal> template_proposals(const SceneMaps& scene, const std::map<PartId, TemplateSpec>& specs) {
  std::vector<Proposal> out;
  for (const auto& [part, m] : scene.maps()) {
    auto it = specs.find(part);
    if (it == specs.end()) continue;
    const TemplateSpec& spec = it->second;
    std::vector<Peak> peaks = select_peaks(m, spec.threshold, spec.max_locations);
    for (auto& pk : peaks) pk = peak_to_image(pk, scene.stride());
    for (const auto& c : template_candidates(peaks, spec, scene.image_width(), scene.image_height())) {
      Proposal p;
      p.window = c.window;
      p.source = ProposalSource::Template;
      p.seed_response = c.seed_response;
      out.push_back(p);
    }
  }
  return out;
}

std::vector<Proposal> external_proposals(const SceneMaps& scene, std::span<const Window> windows,
                                         std::span<const double> scores) {
  if (!scores.empty() && scores.size() != windows.size())
    throw Error(ErrorKind::InvalidArgument, "external scores must parallel the windows");
  std::vector<Proposal> out;
  for (std::size_t i = 0; i < windows.size(); ++i) {
    const Window& w = windows[i];
    if (!w.valid()) continue;
    const Window c{std::max(w.x1, 0.0), std::max(w.y1, 0.0), std::min(w.x2, scene.image_width()),
                   std::min(w.y2, scene.image_height())};
    if (!c.valid()) continue;
    Proposal p;
    p.window = c;
    p.source = ProposalSource::External;
    p.seed_response = scores.empty() ? 0.0 : scores[i];
    out.push_back(p);
  }
  return out;
}

void score_proposals(const SceneMaps& scene, const FacenessParams& params, std::vector<Proposal>& props) {
  const double inv = 1.0 / scene.stride();
  for (auto& p : props) {
    const Window mw{p.window.x1 * inv, p.window.y1 * inv, p.window.x2 * inv, p.window.y2 * inv};
    const double eps = params.guard_for(mw);
    p.part_scores = {};
    for (const auto& [part, im] : scene.integrals()) {
      p.part_scores[part_index(part)] = part_score(im, params.configs.at(part), mw, eps);
    }
    p.faceness = combined_faceness(p.part_scores);
  }
}

std::vector<Proposal> rerank(std::vector<Proposal> scored, const PipelineConfig& cfg, std::size_t top_n) {
  if (scored.empty()) return {};
  std::vector<Window> windows;
  windows.reserve(scored.size());
  for (const auto& p : scored) windows.push_back(p.window);

  std::vector<char> survives(scored.size(), 0);
  std::vector<double> scores(scored.size());
  for (PartId part : kAllParts) {
    const std::size_t pi = part_index(part);
    if (!scored.front().part_scores[pi]) continue;
    for (std::size_t i = 0; i < scored.size(); ++i) scores[i] = ScoreField::of_part(part).read(scored[i]);
    const NmsResult r = greedy_nms_indices(windows, scores, cfg.nms.smooth_iou);
    for (std::size_t k = 0; k < r.kept.size(); ++k) {
      const std::size_t i = r.kept[k];
      double best = scores[i];
      for (std::size_t j : r.clusters[k]) best = std::max(best, scores[j]);
      scored[i].part_scores[pi] = best;
      survives[i] = 1;
    }
  }

  std::vector<Proposal> pool;
  for (std::size_t i = 0; i < scored.size(); ++i) {
    if (!survives[i]) continue;
    scored[i].faceness = combined_faceness(scored[i].part_scores);
    pool.push_back(std::move(scored[i]));
  }
  std::vector<Proposal> out = greedy_nms(pool, cfg.nms.final_iou, ScoreField::faceness());
  if (out.size() > top_n) out.resize(top_n);
  return out;
}

std::vector<Proposal> propose(const MapSet& maps, const PipelineConfig& cfg, std::span<const Window> external,
                              std::span<const double> external_scores) {
  if (maps.empty()) throw Error(ErrorKind::NoMaps, "no partness maps supplied");
  if (cfg.top_n < 1) throw Error(ErrorKind::InvalidArgument, "top_n must be >= 1");
  const SceneMaps scene(maps, cfg.stride);

  std::vector<Proposal> candidates;
  const bool use_external = !external.empty();
  if (!use_external || cfg.pool_candidates) candidates = template_proposals(scene, cfg.templates);
  if (use_external) {
    auto ext = external_proposals(scene, external, external_scores);
    candidates.insert(candidates.end(), ext.begin(), ext.end());
  }
  score_proposals(scene, cfg.faceness, candidates);
  if (use_external && cfg.pool_candidates) candidates = greedy_nms(candidates, cfg.nms.dedup_iou);
  return rerank(std::move(candidates), cfg, cfg.top_n);
}

std::vector<Proposal> rank_by_seed(std::vector<Proposal> candidates) {
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Proposal& a, const Proposal& b) { return a.seed_response > b.seed_response; });
  return candidates;
}

}  // namespace faceness
