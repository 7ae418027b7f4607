#include <cmath>
#include <random>

#include "doctest.h"
#include "faceness/synth.hpp"
#include "faceness/templates.hpp"
#include "oracles.hpp"

using namespace faceness;

TEST_CASE("default specs") {
  for (PartId p : kAllParts) {
    const TemplateSpec s = default_template_spec(p);
    CHECK_NOTHROW(s.validate());
    CHECK(s.k() == 10);
    CHECK(s.threshold == 0.5);
    CHECK(s.max_locations == 70);
    CHECK(s.anchor_x == 0.5);
  }
  CHECK(default_template_spec(PartId::Hair).anchor_y == doctest::Approx(1.0 / 3.0));
  CHECK(default_template_spec(PartId::Eye).anchor_y == 0.5);
  CHECK(default_template_spec(PartId::Beard).anchor_y == doctest::Approx(0.85));
}

TEST_CASE("spec validation") {
  TemplateSpec s = default_template_spec(PartId::Eye);
  s.scales = {};
  CHECK_THROWS_AS(s.validate(), Error);
  s.scales = {100.0, 50.0};
  CHECK_THROWS_AS(s.validate(), Error);
  s = default_template_spec(PartId::Eye);
  s.threshold = 1.0;
  CHECK_THROWS_AS(s.validate(), Error);
  s = default_template_spec(PartId::Eye);
  s.max_locations = 0;
  CHECK_THROWS_AS(s.validate(), Error);
}

TEST_CASE("all-zero map has no peaks") { CHECK(select_peaks(PartnessMap(PartId::Hair, 16, 16), 0.5, 70).empty()); }

TEST_CASE("single blob yields one peak at its mode") {
  PartnessMap m(PartId::Eye, 50, 40);
  render_blob(m, 20.5, 14.5, 3.0, 2.0, 1.0);
  std::size_t ax = 0, ay = 0;
  for (std::size_t y = 0; y < m.height(); ++y)
    for (std::size_t x = 0; x < m.width(); ++x)
      if (m.at(x, y) > m.at(ax, ay)) {
        ax = x;
        ay = y;
      }
  const auto peaks = select_peaks(m, 0.5, 70);
  REQUIRE(peaks.size() == 1);
  CHECK(peaks[0].x == static_cast<double>(ax));
  CHECK(peaks[0].y == static_cast<double>(ay));
  CHECK(peaks[0].p == 1.0);
}

TEST_CASE("equal blobs tie-break on smaller (y, x)") {
  PartnessMap m(PartId::Eye, 60, 40);
  render_blob(m, 40.5, 10.5, 2.0, 2.0, 1.0);
  render_blob(m, 10.5, 30.5, 2.0, 2.0, 1.0);
  const auto one = select_peaks(m, 0.5, 1);
  REQUIRE(one.size() == 1);
  CHECK(one[0].x == 40.0);
  CHECK(one[0].y == 10.0);
  const auto two = select_peaks(m, 0.5, 5);
  REQUIRE(two.size() == 2);
  CHECK(two[1].y == 30.0);
}

TEST_CASE("peaks respect the threshold and cap") {
  PartnessMap m(PartId::Nose, 100, 20);
  for (int i = 0; i < 10; ++i) render_blob(m, 5.5 + 10 * i, 10.5, 1.5, 1.5, 1.0 + 0.1 * i);
  CHECK(select_peaks(m, 0.5, 70).size() == 10);
  CHECK(select_peaks(m, 0.5, 4).size() == 4);
  const auto hi = select_peaks(m, 0.9, 70);
  for (const auto& p : hi) CHECK(p.p >= 0.9);
  CHECK(hi.size() == 2);
}

TEST_CASE("hair window for a centred peak") {
  TemplateSpec s = default_template_spec(PartId::Hair);
  s.scales = {100.0 * 100.0};
  const Peak pk{100, 100, 1.0};
  const auto w = template_windows({&pk, 1}, s, 1000, 1000);
  REQUIRE(w.size() == 1);
  const double W = std::sqrt(1e4 / 1.5);
  const double H = W * 1.5;
  CHECK(std::abs(w[0].width() - 81.64965809277260) < 1e-6);
  CHECK(std::abs(w[0].height() - 122.4744871391589) < 1e-6);
  CHECK(std::abs(w[0].x1 - (100.0 - 0.5 * W)) < 1e-9);
  CHECK(std::abs(w[0].y1 - (100.0 - H / 3.0)) < 1e-9);
  CHECK(std::abs(w[0].x1 - 59.175170953613698) < 1e-6);
  CHECK(std::abs(w[0].y1 - 59.175170953613698) < 1e-6);
}

TEST_CASE("one peak gives one window per scale") {
  const TemplateSpec s = default_template_spec(PartId::Eye);
  const Peak pk{500, 500, 1.0};
  const auto c = template_candidates({&pk, 1}, s, 1000, 1000);
  REQUIRE(c.size() == 10);
  for (std::size_t i = 1; i < c.size(); ++i) CHECK(c[i].window.area() > c[i - 1].window.area());
  for (const auto& x : c) CHECK(x.seed_response == 1.0);
}

TEST_CASE("corner peaks keep windows with at least half their area") {
  TemplateSpec s = default_template_spec(PartId::Eye);
  s.scales = {25.0 * 25.0};
  s.anchor_x = 0.5;
  s.anchor_y = 0.5;
  const double W = std::sqrt(625.0 * s.aspect);
  const double H = W / s.aspect;
  // Quarter of the window inside: dropped.
  const Peak corner{0, 0, 1.0};
  CHECK(template_windows({&corner, 1}, s, 200, 200).empty());
  // Exactly half inside horizontally: kept and clipped.
  const Peak edge{0, 100, 1.0};
  const auto e = template_windows({&edge, 1}, s, 200, 200);
  REQUIRE(e.size() == 1);
  CHECK(e[0].x1 == 0.0);
  CHECK(e[0].area() == doctest::Approx(0.5 * W * H));
  // Just under half: dropped.
  const Peak in{-0.01, 100, 1.0};
  CHECK(template_windows({&in, 1}, s, 200, 200).empty());
}

TEST_CASE("windows scale with the map stride") {
  const Peak p = peak_to_image({3, 4, 0.7}, 8.0);
  CHECK(p.x == 28.0);
  CHECK(p.y == 36.0);
  CHECK(p.p == 0.7);
}

TEST_CASE("shifting map contents shifts every window") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> pos(450.0, 550.0);
  PartnessMap m(PartId::Mouth, 800, 800);
  for (int i = 0; i < 4; ++i) render_blob(m, pos(rng), pos(rng), 3.0, 2.0, 1.0 + 0.2 * i);
  const int dx = 13, dy = 7;
  PartnessMap shifted(PartId::Mouth, 800, 800);
  for (std::size_t y = 0; y + dy < 800; ++y)
    for (std::size_t x = 0; x + dx < 800; ++x) shifted.set(x + dx, y + dy, m.at(x, y));

  const TemplateSpec s = default_template_spec(PartId::Mouth);
  auto windows = [&](const PartnessMap& map) {
    auto peaks = select_peaks(map, s.threshold, s.max_locations);
    for (auto& p : peaks) p = peak_to_image(p, 1.0);
    return template_windows(peaks, s, 1e6, 1e6);
  };
  const auto a = windows(m);
  const auto b = windows(shifted);
  REQUIRE(a.size() == b.size());
  REQUIRE(!a.empty());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const Window t = a[i].translated(dx, dy);
    CHECK(std::abs(t.x1 - b[i].x1) < 1e-9);
    CHECK(std::abs(t.y1 - b[i].y1) < 1e-9);
    CHECK(std::abs(t.x2 - b[i].x2) < 1e-9);
    CHECK(std::abs(t.y2 - b[i].y2) < 1e-9);
  }
  CHECK(windows(m) == a);
}

TEST_CASE("window count is bounded by M times k") {
  std::mt19937_64 rng(5);
  PartnessMap m = oracle::random_map(PartId::Hair, 120, 120, 77);
  TemplateSpec s = default_template_spec(PartId::Hair);
  s.threshold = 0.1;
  s.max_locations = 30;
  auto peaks = select_peaks(m, s.threshold, s.max_locations);
  CHECK(peaks.size() <= 30);
  CHECK(template_windows(peaks, s, 120, 120).size() <= 30 * s.k());
}
