#pragma once

#include <span>
#include <vector>

#include "faceness/core.hpp"

namespace faceness {

/// Width to height ratio 1:1.5.
inline constexpr double kTemplateAspect = 1.0 / 1.5;

/// Box areas (pixels^2) of the ten default template scales.
std::vector<double> default_template_scales();

/// Multi-scale reference boxes anchored on peaks of one part map.
struct TemplateSpec {
  PartId part = PartId::Hair;
  /// Where the peak sits inside the window, as fractions of its width and height.
  double anchor_x = 0.5;
  double anchor_y = 0.5;
  std::vector<double> scales;
  /// Width / height.
  double aspect = kTemplateAspect;
  /// Minimum max-normalized response of a seed location.
  double threshold = 0.5;
  std::size_t max_locations = 70;

  void validate() const;
  std::size_t k() const { return scales.size(); }
};

TemplateSpec default_template_spec(PartId part);

struct Peak {
  double x = 0.0;
  double y = 0.0;
  double p = 0.0;

  friend bool operator==(const Peak&, const Peak&) = default;
};

/// Local maxima (>= all 8 neighbours) of the max-normalized map with p >= t,
/// sorted by p descending then (y, x) ascending, capped at `max_locations`.
/// Coordinates are pixel indices of the map.
std::vector<Peak> select_peaks(const PartnessMap& m, double t, std::size_t max_locations);

/// A template window together with the peak that seeded it.
struct TemplateCandidate {
  Window window;
  double seed_response = 0.0;
};

/// One window per (peak, scale), peaks in input order and scales ascending.
/// Peak coordinates are image points. Windows are clipped to the image and
/// dropped when less than half of their nominal area remains.
std::vector<TemplateCandidate> template_candidates(std::span<const Peak> peaks, const TemplateSpec& spec,
                                                   double image_width, double image_height);

std::vector<Window> template_windows(std::span<const Peak> peaks, const TemplateSpec& spec, double image_width,
                                     double image_height);

/// Image point of a map pixel's center for a map-to-image stride.
inline Peak peak_to_image(const Peak& peak, double stride) {
  return {(peak.x + 0.5) * stride, (peak.y + 0.5) * stride, peak.p};
}

}  // namespace faceness
