#include "faceness/templates.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

namespace faceness {

std::vector<double> default_template_scales() {
  std::vector<double> scales;
  for (double side : {25.0, 50.0, 75.0, 100.0, 135.0, 170.0, 200.0, 240.0, 300.0, 350.0})
    scales.push_back(side * side);
  return scales;
}

void TemplateSpec::validate() const {
  if (scales.empty()) throw Error(ErrorKind::InvalidArgument, "template spec needs at least one scale");
  for (std::size_t i = 0; i < scales.size(); ++i) {
    if (!(scales[i] > 0.0)) throw Error(ErrorKind::InvalidArgument, "template scales must be positive");
    if (i > 0 && !(scales[i] > scales[i - 1]))
      throw Error(ErrorKind::InvalidArgument, "template scales must be strictly increasing");
  }
  if (!(aspect > 0.0)) throw Error(ErrorKind::InvalidArgument, "template aspect must be positive");
  if (!(threshold > 0.0 && threshold < 1.0)) throw Error(ErrorKind::InvalidArgument, "threshold must lie in (0, 1)");
  if (max_locations < 1) throw Error(ErrorKind::InvalidArgument, "max_locations must be >= 1");
  if (!(anchor_x >= 0.0 && anchor_x <= 1.0 && anchor_y >= 0.0 && anchor_y <= 1.0))
    throw Error(ErrorKind::InvalidArgument, "template anchor must lie in [0,1]^2");
}

TemplateSpec default_template_spec(PartId part) {
  TemplateSpec spec;
  spec.part = part;
  spec.scales = default_template_scales();
  spec.anchor_x = 0.5;
  switch (part) {
    case PartId::Hair: spec.anchor_y = 1.0 / 3.0; break;
    case PartId::Eye: spec.anchor_y = 0.5; break;
    case PartId::Nose: spec.anchor_y = 0.60; break;
    case PartId::Mouth: spec.anchor_y = 0.75; break;
    case PartId::Beard: spec.anchor_y = 0.85; break;
  }
  return spec;
}

std::vector<Peak> select_peaks(const PartnessMap& m, double t, std::size_t max_locations) {
  std::vector<Peak> peaks;
  const float vmax = m.max_value();
  if (!(vmax > 0.0f) || max_locations == 0) return peaks;
  const double inv = 1.0 / static_cast<double>(vmax);
  const auto w = static_cast<long>(m.width());
  const auto h = static_cast<long>(m.height());

  for (long y = 0; y < h; ++y) {
    for (long x = 0; x < w; ++x) {
      const float v = m.at(static_cast<std::size_t>(x), static_cast<std::size_t>(y));
      const double p = static_cast<double>(v) * inv;
      if (p < t || v <= 0.0f) continue;
      bool is_max = true;
      for (long dy = -1; dy <= 1 && is_max; ++dy) {
        for (long dx = -1; dx <= 1; ++dx) {
          if (dx == 0 && dy == 0) continue;
          const long nx = x + dx;
          const long ny = y + dy;
          if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
          if (m.at(static_cast<std::size_t>(nx), static_cast<std::size_t>(ny)) > v) {
            is_max = false;
            break;
          }
        }
      }
      if (is_max) peaks.push_back({static_cast<double>(x), static_cast<double>(y), p});
    }
  }
  std::stable_sort(peaks.begin(), peaks.end(), [](const Peak& a, const Peak& b) {
    if (a.p != b.p) return a.p > b.p;
    return std::tie(a.y, a.x) < std::tie(b.y, b.x);
  });
  if (peaks.size() > max_locations) peaks.resize(max_locations);
  return peaks;
}

std::vector<TemplateCandidate> template_candidates(std::span<const Peak> peaks, const TemplateSpec& spec,
                                                   double image_width, double image_height) {
  spec.validate();
  std::vector<TemplateCandidate> out;
  out.reserve(peaks.size() * spec.scales.size());
  for (const Peak& peak : peaks) {
    for (double area : spec.scales) {
      const double w = std::sqrt(area * spec.aspect);
      const double h = w / spec.aspect;
      const double x1 = peak.x - spec.anchor_x * w;
      const double y1 = peak.y - spec.anchor_y * h;
      const Window nominal{x1, y1, x1 + w, y1 + h};
      const Window clipped{std::max(nominal.x1, 0.0), std::max(nominal.y1, 0.0), std::min(nominal.x2, image_width),
                           std::min(nominal.y2, image_height)};
      if (!clipped.valid() || clipped.area() < 0.5 * nominal.area()) continue;
      out.push_back({clipped, peak.p});
    }
  }
  return out;
}

std::vector<Window> template_windows(std::span<const Peak> peaks, const TemplateSpec& spec, double image_width,
                                     double image_height) {
  std::vector<Window> out;
  for (auto& c : template_candidates(peaks, spec, image_width, image_height)) out.push_back(c.window);
  return out;
}

}  // namespace faceness
