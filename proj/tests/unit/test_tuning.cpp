#include <cmath>

#include "doctest.h"
#include "faceness/synth.hpp"
#include "faceness/tuning.hpp"

using namespace faceness;

namespace {

std::vector<TrainingScene> scenes_with_layout(const FaceLayout& layout, std::size_t count, std::uint64_t seed) {
  std::vector<TrainingScene> out;
  for (std::size_t i = 0; i < count; ++i) {
    SceneSpec s;
    s.n_faces = 3;
    s.noise_sigma = 0.02;
    s.distractor_count = 3;
    s.layout = layout;
    s.seed = seed + i;
    Scene sc = generate_scene(s);
    out.push_back({std::move(sc.maps), std::move(sc.truth)});
  }
  return out;
}

PipelineConfig hair_only() {
  PipelineConfig cfg = PipelineConfig::defaults();
  cfg.templates = {{PartId::Hair, cfg.templates.at(PartId::Hair)}};
  return cfg;
}

std::vector<double> steps(double lo, double hi, double step) {
  std::vector<double> v;
  for (double x = lo; x <= hi + 1e-9; x += step) v.push_back(std::round(x * 1000.0) / 1000.0);
  return v;
}

}  // namespace

TEST_CASE("a one-point space returns that point") {
  const auto scenes = scenes_with_layout(canonical_layout(), 2, 1);
  const TemplateSearchSpace space{{0.45}, {0.3}, {0.4}, {20}};
  const auto tuned = tune_templates(scenes, space, 50, hair_only());
  REQUIRE(tuned.size() == 1);
  const TemplateSpec& s = tuned.at(PartId::Hair);
  CHECK(s.anchor_x == 0.45);
  CHECK(s.anchor_y == 0.3);
  CHECK(s.threshold == 0.4);
  CHECK(s.max_locations == 20);
  CHECK(s.scales == default_template_scales());
}

TEST_CASE("equal recall prefers fewer proposals") {
  const auto scenes = scenes_with_layout(canonical_layout(), 3, 5);
  // Both caps keep every face; the per-part peak counts are far below 70.
  const TemplateSearchSpace space{{0.5}, {1.0 / 3.0}, {0.5}, {60, 70}};
  const TemplateScore a = evaluate_template(scenes, [] {
    TemplateSpec s = default_template_spec(PartId::Hair);
    s.max_locations = 3;
    return s;
  }(), hair_only(), 200);
  const TemplateScore b = evaluate_template(scenes, default_template_spec(PartId::Hair), hair_only(), 200);
  CHECK(a.mean_proposals < b.mean_proposals);
  if (a.recall == b.recall) {
    const TemplateSearchSpace pair{{0.5}, {1.0 / 3.0}, {0.5}, {70, 3}};
    CHECK(tune_templates(scenes, pair, 200, hair_only()).at(PartId::Hair).max_locations == 3);
  }
  const auto tuned = tune_templates(scenes, space, 200, hair_only());
  CHECK(tuned.at(PartId::Hair).max_locations == 60);
}

TEST_CASE("tuning recovers the generator's hair anchor") {
  const auto scenes = scenes_with_layout(canonical_layout(), 12, 40);
  const TemplateSearchSpace space{{0.4, 0.5, 0.6}, steps(0.1, 0.6, 0.05), {0.5}, {70}};
  const auto tuned = tune_templates(scenes, space, 3, hair_only());
  const TemplateSpec& got = tuned.at(PartId::Hair);
  CHECK(std::abs(got.anchor_x - 0.5) <= 0.1 + 1e-9);
  CHECK(std::abs(got.anchor_y - 1.0 / 3.0) <= 0.05 + 1e-9);

  const double best = evaluate_template(scenes, got, hair_only(), 3).recall;
  for (double ax : space.anchor_x) {
    for (double ay : space.anchor_y) {
      TemplateSpec s = default_template_spec(PartId::Hair);
      s.anchor_x = ax;
      s.anchor_y = ay;
      CHECK(evaluate_template(scenes, s, hair_only(), 3).recall <= best);
    }
  }
}

// Ranking uses the hair band, so the band has to agree with where the layout puts hair.
TEST_CASE("tuning follows a perturbed layout") {
  for (const auto& [center, band_hi] : {std::pair{0.45, 0.6}, std::pair{0.2, 0.35}}) {
    CAPTURE(center);
    FaceLayout layout = canonical_layout();
    layout[part_index(PartId::Hair)].center_y = center;
    const auto scenes = scenes_with_layout(layout, 12, 40);
    PipelineConfig cfg = hair_only();
    cfg.faceness.configs[PartId::Hair].band_hi = band_hi;
    const TemplateSearchSpace space{{0.4, 0.5, 0.6}, steps(0.1, 0.6, 0.05), {0.5}, {70}};
    const auto tuned = tune_templates(scenes, space, 3, cfg);
    CHECK(std::abs(tuned.at(PartId::Hair).anchor_y - center) <= 0.05 + 1e-9);
  }
}

TEST_CASE("tuning errors") {
  const auto scenes = scenes_with_layout(canonical_layout(), 1, 2);
  try {
    tune_templates(scenes, TemplateSearchSpace{{}, {0.3}, {0.5}, {70}}, 10, hair_only());
    FAIL("expected EmptySearchSpace");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::EmptySearchSpace);
  }
  std::vector<TrainingScene> empty = scenes;
  empty[0].truth.faces.clear();
  CHECK_THROWS_AS(tune_templates(empty, TemplateSearchSpace{{0.5}, {0.3}, {0.5}, {70}}, 10, hair_only()), Error);
}

TEST_CASE("parts without maps keep their base spec") {
  auto scenes = scenes_with_layout(canonical_layout(), 2, 3);
  for (auto& s : scenes) s.maps.erase(PartId::Beard);
  const auto tuned = tune_templates(scenes, TemplateSearchSpace{{0.5}, {0.4}, {0.5}, {70}}, 20);
  CHECK(tuned.size() == 5);
  CHECK(tuned.at(PartId::Beard).anchor_y == doctest::Approx(0.85));
  CHECK(tuned.at(PartId::Eye).anchor_y == 0.4);
}
