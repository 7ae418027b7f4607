#pragma once

#include <array>
#include <cstdint>
#include <set>
#include <vector>

#include "faceness/core.hpp"
#include "faceness/integral.hpp"
#include "faceness/scoring.hpp"

namespace faceness {

/// Part box inside a face box, in fractions of the face width and height.
struct PartLayout {
  double center_x = 0.5;
  double center_y = 0.5;
  double width = 0.5;
  double height = 0.1;
};

using FaceLayout = std::array<PartLayout, kNumParts>;

/// The single geometry table shared by the generator, template anchors and band defaults.
const FaceLayout& canonical_layout();

/// Part box of `face` under `layout`.
Window part_box(const Window& face, const PartLayout& layout);

struct SceneSpec {
  std::size_t width = 400;
  std::size_t height = 300;
  std::size_t n_faces = 3;
  /// Face heights in pixels; face width is height * kTemplateAspect.
  double face_scale_min = 60.0;
  double face_scale_max = 180.0;
  /// Independent per-part drop probability per face.
  double occlusion_prob = 0.0;
  /// Parts dropped on every face regardless of `occlusion_prob`.
  std::set<PartId> forced_occlusions;
  std::size_t distractor_count = 0;
  /// Std of additive Gaussian noise, in units of the unit blob peak.
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;
  FaceLayout layout = canonical_layout();

  void validate() const;
};

struct Scene {
  MapSet maps;
  SceneGroundTruth truth;
};

/// Renders an axis-aligned Gaussian carrying `mass` into `m`, truncated at
/// four standard deviations. Each pixel receives the Gaussian's exact
/// integral over its unit square (up to truncation).
void render_blob(PartnessMap& m, double cx, double cy, double sigma_x, double sigma_y, double mass);

/// Seeded scene: non-overlapping faces, one unit-peak blob per visible part
/// (sigma = part box size / 4), distractor blobs on single channels, then
/// clamped additive noise.
Scene generate_scene(const SceneSpec& spec);

/// Band-split training set for `learn_lambda`: each sample owns one map
/// covering exactly its window. Positives carry mass only inside the band
/// [lo, hi), negatives only outside it; `leak` adds a uniform background
/// of that density (relative to the band mass density) to every pixel.
struct BandTrainingSet {
  std::vector<IntegralMap> maps;
  std::vector<int> labels;
  std::vector<LambdaSample> samples() const;
};

struct BandSplitSpec {
  PartId part = PartId::Hair;
  double band_lo = 0.0;
  double band_hi = 0.4;
  std::size_t n_pos = 20;
  std::size_t n_neg = 20;
  double leak = 0.0;
  std::uint64_t seed = 0;
};

BandTrainingSet generate_band_training(const BandSplitSpec& spec);

}  // namespace faceness
