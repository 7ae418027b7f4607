#include <algorithm>
#include <random>

#include "doctest.h"
#include "faceness/nms.hpp"
#include "oracles.hpp"

using namespace faceness;

namespace {

std::vector<Proposal> as_proposals(const std::vector<Window>& w, const std::vector<double>& s) {
  std::vector<Proposal> out;
  for (std::size_t i = 0; i < w.size(); ++i) {
    Proposal p;
    p.window = w[i];
    p.faceness = s[i];
    p.part_scores[part_index(PartId::Eye)] = s[i];
    out.push_back(p);
  }
  return out;
}

// Random boxes on a coarse grid so ties in score and geometry happen.
void random_set(std::mt19937_64& rng, std::size_t n, std::vector<Window>& w, std::vector<double>& s) {
  std::uniform_int_distribution<int> pos(0, 12);
  std::uniform_int_distribution<int> side(2, 8);
  std::uniform_int_distribution<int> score(0, 9);
  w.clear();
  s.clear();
  for (std::size_t i = 0; i < n; ++i) {
    const double x = pos(rng), y = pos(rng);
    w.push_back({x, y, x + side(rng), y + side(rng)});
    s.push_back(score(rng) / 10.0);
  }
}

}  // namespace

TEST_CASE("iou examples") {
  const Window a{0, 0, 10, 10};
  CHECK(iou(a, a) == 1.0);
  CHECK(iou(a, {20, 20, 30, 30}) == 0.0);
  CHECK(iou(a, {10, 0, 20, 10}) == 0.0);
  CHECK(iou(a, {5, 0, 15, 10}) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("iou symmetry and translation") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> d(-50.0, 50.0);
  for (int k = 0; k < 500; ++k) {
    const Window a = oracle::random_box(rng, 30.0, 1.0, 20.0);
    const Window b = oracle::random_box(rng, 30.0, 1.0, 20.0);
    CHECK(iou(a, b) == iou(b, a));
    CHECK(iou(a, a) == 1.0);
    const double dx = d(rng), dy = d(rng);
    CHECK(iou(a.translated(dx, dy), b.translated(dx, dy)) == doctest::Approx(iou(a, b)).epsilon(1e-9));
    CHECK(iou(a, b) == doctest::Approx(oracle::iou(a, b)).epsilon(1e-12));
  }
}

TEST_CASE("nms basics") {
  CHECK(greedy_nms(std::vector<Proposal>{}, 0.5).empty());
  const auto two = as_proposals({{0, 0, 10, 10}, {0, 0, 10, 10}}, {0.8, 0.9});
  const auto out = greedy_nms(two, 0.5);
  REQUIRE(out.size() == 1);
  CHECK(out[0].faceness == 0.9);
}

TEST_CASE("nms matches the repeated-argmax oracle") {
  std::mt19937_64 rng(2);
  std::vector<Window> w;
  std::vector<double> s;
  for (int k = 0; k < 200; ++k) {
    random_set(rng, 20, w, s);
    for (double t : {0.3, 0.5, 0.7}) {
      const NmsResult got = greedy_nms_indices(w, s, t);
      const oracle::NmsOut want = oracle::nms(w, s, t);
      CHECK(got.kept == want.kept);
      REQUIRE(got.clusters.size() == want.clusters.size());
      for (std::size_t i = 0; i < got.clusters.size(); ++i) {
        auto c = got.clusters[i];
        std::sort(c.begin(), c.end());
        CHECK(c == want.clusters[i]);
      }
    }
  }
}

TEST_CASE("nms output is a non-overlapping subset") {
  std::mt19937_64 rng(3);
  std::vector<Window> w;
  std::vector<double> s;
  for (int k = 0; k < 100; ++k) {
    random_set(rng, 30, w, s);
    const auto props = as_proposals(w, s);
    const auto out = greedy_nms(props, 0.5);
    for (std::size_t i = 0; i < out.size(); ++i) {
      CHECK(std::find(w.begin(), w.end(), out[i].window) != w.end());
      for (std::size_t j = i + 1; j < out.size(); ++j) CHECK(iou(out[i].window, out[j].window) <= 0.5);
      if (i > 0) CHECK(out[i - 1].faceness >= out[i].faceness);
    }
  }
}

TEST_CASE("threshold one only reorders") {
  std::mt19937_64 rng(4);
  std::vector<Window> w;
  std::vector<double> s;
  random_set(rng, 40, w, s);
  const auto props = as_proposals(w, s);
  const auto out = greedy_nms(props, 1.0);
  CHECK(out.size() == props.size());
  for (std::size_t i = 1; i < out.size(); ++i) CHECK(out[i - 1].faceness >= out[i].faceness);
}

TEST_CASE("score fields") {
  Proposal p;
  p.faceness = 2.0;
  p.part_scores[part_index(PartId::Nose)] = 5.0;
  CHECK(ScoreField::faceness().read(p) == 2.0);
  CHECK(ScoreField::of_part(PartId::Nose).read(p) == 5.0);
  try {
    ScoreField::of_part(PartId::Hair).read(p);
    FAIL("expected MissingScore");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::MissingScore);
  }
  CHECK_THROWS_AS(greedy_nms_indices(std::vector<Window>{{0, 0, 1, 1}}, std::vector<double>{1.0}, 0.0), Error);
}

TEST_CASE("smoothing an isolated window leaves it unchanged") {
  const auto props = as_proposals({{0, 0, 10, 10}, {50, 50, 60, 60}}, {0.3, 0.7});
  const auto out = smooth_scores(props, PartId::Eye, 0.5);
  REQUIRE(out.size() == 2);
  CHECK(*out[0].part_scores[part_index(PartId::Eye)] == 0.7);
  CHECK(*out[1].part_scores[part_index(PartId::Eye)] == 0.3);
}

TEST_CASE("smoothing keeps the cluster maximum") {
  // The 0.9 window wins; its cluster contains a window scored 0.4.
  auto props = as_proposals({{0, 0, 10, 10}, {1, 0, 11, 10}, {40, 40, 50, 50}}, {0.9, 0.4, 0.2});
  auto out = smooth_scores(props, PartId::Eye, 0.5);
  REQUIRE(out.size() == 2);
  CHECK(out[0].window == Window{0, 0, 10, 10});
  CHECK(*out[0].part_scores[part_index(PartId::Eye)] == 0.9);
}

TEST_CASE("smoothing matches the oracle clusters") {
  std::mt19937_64 rng(5);
  std::vector<Window> w;
  std::vector<double> s;
  for (int k = 0; k < 100; ++k) {
    random_set(rng, 25, w, s);
    const auto props = as_proposals(w, s);
    const auto out = smooth_scores(props, PartId::Eye, 0.5);
    const auto want = oracle::nms(w, s, 0.5);
    REQUIRE(out.size() == want.kept.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
      double best = s[want.kept[i]];
      for (std::size_t j : want.clusters[i]) best = std::max(best, s[j]);
      CHECK(out[i].window == w[want.kept[i]]);
      CHECK(*out[i].part_scores[part_index(PartId::Eye)] == best);
    }
  }
}
