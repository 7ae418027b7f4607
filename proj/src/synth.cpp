#include "faceness/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "faceness/templates.hpp"

namespace faceness {

const FaceLayout& canonical_layout() {
  // Centers follow the template anchors; heights give each part a vertical band.
  static const FaceLayout layout = {{
      {0.5, 1.0 / 3.0, 0.90, 0.30},  // hair
      {0.5, 0.50, 0.70, 0.12},       // eye
      {0.5, 0.60, 0.25, 0.16},       // nose
      {0.5, 0.75, 0.45, 0.10},       // mouth
      {0.5, 0.85, 0.70, 0.20},       // beard
  }};
  return layout;
}

Window part_box(const Window& face, const PartLayout& layout) {
  const double w = face.width();
  const double h = face.height();
  const double cx = face.x1 + layout.center_x * w;
  const double cy = face.y1 + layout.center_y * h;
  return {cx - 0.5 * layout.width * w, cy - 0.5 * layout.height * h, cx + 0.5 * layout.width * w,
          cy + 0.5 * layout.height * h};
}

void SceneSpec::validate() const {
  if (width == 0 || height == 0) throw Error(ErrorKind::InvalidArgument, "scene must be non-empty");
  if (!(face_scale_min > 0.0 && face_scale_min <= face_scale_max))
    throw Error(ErrorKind::InvalidArgument, "face scale range must be positive and ordered");
  if (face_scale_max > static_cast<double>(height) || face_scale_max * kTemplateAspect > static_cast<double>(width))
    throw Error(ErrorKind::InvalidArgument, "face scale range does not fit the image");
  if (!(occlusion_prob >= 0.0 && occlusion_prob <= 1.0))
    throw Error(ErrorKind::InvalidArgument, "occlusion_prob must lie in [0, 1]");
  if (!(noise_sigma >= 0.0)) throw Error(ErrorKind::InvalidArgument, "noise_sigma must be >= 0");
}

namespace {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

// Per-pixel Gaussian mass along one axis for pixels [lo, hi).
std::vector<double> axis_weights(long lo, long hi, double c, double sigma) {
  std::vector<double> w;
  w.reserve(static_cast<std::size_t>(std::max(0L, hi - lo)));
  for (long i = lo; i < hi; ++i) {
    w.push_back(normal_cdf((static_cast<double>(i + 1) - c) / sigma) - normal_cdf((static_cast<double>(i) - c) / sigma));
  }
  return w;
}

}  // namespace

void render_blob(PartnessMap& m, double cx, double cy, double sigma_x, double sigma_y, double mass) {
  if (!(sigma_x > 0.0 && sigma_y > 0.0)) throw Error(ErrorKind::InvalidArgument, "blob sigma must be positive");
  const long w = static_cast<long>(m.width());
  const long h = static_cast<long>(m.height());
  const long x0 = std::max(0L, static_cast<long>(std::floor(cx - 4.0 * sigma_x)));
  const long x1 = std::min(w, static_cast<long>(std::ceil(cx + 4.0 * sigma_x)));
  const long y0 = std::max(0L, static_cast<long>(std::floor(cy - 4.0 * sigma_y)));
  const long y1 = std::min(h, static_cast<long>(std::ceil(cy + 4.0 * sigma_y)));
  if (x0 >= x1 || y0 >= y1) return;
  const auto wx = axis_weights(x0, x1, cx, sigma_x);
  const auto wy = axis_weights(y0, y1, cy, sigma_y);
  for (long y = y0; y < y1; ++y) {
    const double ry = mass * wy[static_cast<std::size_t>(y - y0)];
    for (long x = x0; x < x1; ++x) {
      m.add(static_cast<std::size_t>(x), static_cast<std::size_t>(y),
            static_cast<float>(ry * wx[static_cast<std::size_t>(x - x0)]));
    }
  }
}

namespace {

void render_unit_peak_blob(PartnessMap& m, const Window& box) {
  const double sx = box.width() / 4.0;
  const double sy = box.height() / 4.0;
  render_blob(m, box.center_x(), box.center_y(), sx, sy, 2.0 * std::numbers::pi * sx * sy);
}

}  // namespace

Scene generate_scene(const SceneSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double img_w = static_cast<double>(spec.width);
  const double img_h = static_cast<double>(spec.height);

  Scene scene;
  scene.truth.width = spec.width;
  scene.truth.height = spec.height;
  for (PartId p : kAllParts) scene.maps.emplace(p, PartnessMap(p, spec.width, spec.height));

  constexpr int kPlacementAttempts = 200;
  for (std::size_t f = 0; f < spec.n_faces; ++f) {
    for (int attempt = 0; attempt < kPlacementAttempts; ++attempt) {
      const double fh = spec.face_scale_min + unit(rng) * (spec.face_scale_max - spec.face_scale_min);
      const double fw = fh * kTemplateAspect;
      const double x1 = unit(rng) * (img_w - fw);
      const double y1 = unit(rng) * (img_h - fh);
      const Window box{x1, y1, x1 + fw, y1 + fh};
      const bool overlaps = std::any_of(scene.truth.faces.begin(), scene.truth.faces.end(),
                                        [&](const FaceAnnotation& a) { return intersection_area(a.face_box, box) > 0.0; });
      if (overlaps) continue;
      FaceAnnotation face;
      face.face_box = box;
      for (PartId p : kAllParts) {
        face.part_boxes[p] = part_box(box, spec.layout[part_index(p)]);
        const bool dropped = unit(rng) < spec.occlusion_prob;
        if (dropped || spec.forced_occlusions.contains(p)) face.occluded_parts.insert(p);
      }
      scene.truth.faces.push_back(std::move(face));
      break;
    }
  }

  for (const auto& face : scene.truth.faces) {
    for (PartId p : kAllParts) {
      if (face.occluded_parts.contains(p)) continue;
      render_unit_peak_blob(scene.maps.at(p), face.part_boxes.at(p));
    }
  }

  std::uniform_int_distribution<int> channel(0, static_cast<int>(kNumParts) - 1);
  for (std::size_t d = 0; d < spec.distractor_count; ++d) {
    const auto part = static_cast<PartId>(channel(rng));
    const double fh = spec.face_scale_min + unit(rng) * (spec.face_scale_max - spec.face_scale_min);
    const Window fake_face{0.0, 0.0, fh * kTemplateAspect, fh};
    const Window shape = part_box(fake_face, spec.layout[part_index(part)]);
    const double cx = unit(rng) * img_w;
    const double cy = unit(rng) * img_h;
    render_unit_peak_blob(scene.maps.at(part), shape.translated(cx - shape.center_x(), cy - shape.center_y()));
  }

  if (spec.noise_sigma > 0.0) {
    std::normal_distribution<double> noise(0.0, spec.noise_sigma);
    for (PartId p : kAllParts) {
      PartnessMap& m = scene.maps.at(p);
      for (std::size_t y = 0; y < m.height(); ++y)
        for (std::size_t x = 0; x < m.width(); ++x) m.set(x, y, static_cast<float>(m.at(x, y) + noise(rng)));
    }
  }
  return scene;
}

std::vector<LambdaSample> BandTrainingSet::samples() const {
  std::vector<LambdaSample> out;
  out.reserve(maps.size());
  for (std::size_t i = 0; i < maps.size(); ++i) {
    const auto& m = maps[i];
    out.push_back({Window{0.0, 0.0, static_cast<double>(m.width()), static_cast<double>(m.height())}, labels[i],
                   std::cref(m)});
  }
  return out;
}

BandTrainingSet generate_band_training(const BandSplitSpec& spec) {
  SpatialConfig{spec.part, spec.band_lo, spec.band_hi}.validate();
  std::mt19937_64 rng(spec.seed);
  std::uniform_int_distribution<int> height_choice(1, 3);
  std::uniform_int_distribution<int> width_choice(20, 60);
  std::uniform_real_distribution<double> intensity(0.5, 1.5);

  BandTrainingSet set;
  const std::size_t total = spec.n_pos + spec.n_neg;
  set.maps.reserve(total);
  for (std::size_t i = 0; i < total; ++i) {
    const int label = i < spec.n_pos ? 1 : 0;
    const auto h = static_cast<std::size_t>(50 * height_choice(rng));
    const auto w = static_cast<std::size_t>(width_choice(rng));
    const auto row_lo = static_cast<std::size_t>(std::lround(spec.band_lo * static_cast<double>(h)));
    const auto row_hi = static_cast<std::size_t>(std::lround(spec.band_hi * static_cast<double>(h)));
    PartnessMap m(spec.part, w, h);
    for (std::size_t y = 0; y < h; ++y) {
      const bool in_band = y >= row_lo && y < row_hi;
      for (std::size_t x = 0; x < w; ++x) {
        double v = (in_band == (label == 1)) ? intensity(rng) : 0.0;
        v += spec.leak;
        m.set(x, y, static_cast<float>(v));
      }
    }
    set.maps.push_back(build_integral(m));
    set.labels.push_back(label);
  }
  return set;
}

}  // namespace faceness
