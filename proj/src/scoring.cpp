#include "faceness/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace faceness {

namespace {

// log(1 + exp(z)) without overflow.
double softplus(double z) {
  return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

}  // namespace

bool band_lo_free(PartId part) { return part != PartId::Hair; }
bool band_hi_free(PartId part) { return part != PartId::Beard; }

void SpatialConfig::validate() const {
  if (!(band_lo >= 0.0 && band_lo < band_hi && band_hi <= 1.0))
    throw Error(ErrorKind::InvalidArgument, "band must satisfy 0 <= lo < hi <= 1");
  if (part == PartId::Hair && band_lo != 0.0)
    throw Error(ErrorKind::InvalidArgument, "hair band must start at the window top");
  if (part == PartId::Beard && band_hi != 1.0)
    throw Error(ErrorKind::InvalidArgument, "beard band must end at the window bottom");
}

SpatialConfig default_spatial_config(PartId part) {
  switch (part) {
    case PartId::Hair: return {part, 0.0, 0.5};
    case PartId::Eye: return {part, 0.4, 0.6};
    case PartId::Nose: return {part, 0.5, 0.7};
    case PartId::Mouth: return {part, 0.65, 0.85};
    case PartId::Beard: return {part, 0.7, 1.0};
  }
  return {part, 0.0, 1.0};
}

FacenessParams FacenessParams::defaults() {
  FacenessParams params;
  for (PartId p : kAllParts) params.configs[p] = default_spatial_config(p);
  return params;
}

void FacenessParams::validate() const {
  for (PartId p : kAllParts) {
    auto it = configs.find(p);
    if (it == configs.end())
      throw Error(ErrorKind::InvalidArgument, "missing spatial config for " + std::string(part_name(p)));
    if (it->second.part != p) throw Error(ErrorKind::PartMismatch, "spatial config keyed under the wrong part");
    it->second.validate();
  }
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw Error(ErrorKind::InvalidArgument, "alpha must be finite and > 0");
  if (!(epsilon > 0.0 && epsilon <= 1e-3)) throw Error(ErrorKind::InvalidArgument, "epsilon must lie in (0, 1e-3]");
}

BandSums band_sums(const IntegralMap& im, const SpatialConfig& cfg, const Window& w) {
  const double total = region_sum(im, w);
  const double h = w.height();
  const Window band{w.x1, w.y1 + cfg.band_lo * h, w.x2, w.y1 + cfg.band_hi * h};
  const double inside = std::min(region_sum(im, band), total);
  return {inside, total - inside};
}

double part_score(const IntegralMap& im, const SpatialConfig& cfg, const Window& w, double eps) {
  if (cfg.part != im.part()) throw Error(ErrorKind::PartMismatch, "spatial config and map refer to different parts");
  if (!w.valid()) throw Error(ErrorKind::EmptyWindow, "part_score on an empty window");
  const BandSums s = band_sums(im, cfg, w);
  return s.inside / (s.outside + eps);
}

double combined_faceness(const PartScores& scores) {
  double sum = 0.0;
  int count = 0;
  for (const auto& s : scores) {
    if (s) {
      sum += *s;
      ++count;
    }
  }
  if (count == 0) throw Error(ErrorKind::NoScores, "no part scores to combine");
  return sum / count;
}

double lambda_objective(std::span<const LambdaSample> samples, const SpatialConfig& cfg, double alpha,
                        double eps_per_area) {
  double objective = 0.0;
  for (const auto& s : samples) {
    const double delta = part_score(s.map.get(), cfg, s.window, eps_per_area * s.window.area());
    const double z = alpha * delta;
    // log sigma(z) = -softplus(-z); log(1 - sigma(z)) = -softplus(z).
    objective -= s.label != 0 ? softplus(-z) : softplus(z);
  }
  return objective;
}

std::vector<double> lambda_grid(double grid_step) {
  if (!(grid_step > 0.0 && grid_step <= 0.5)) throw Error(ErrorKind::InvalidArgument, "grid_step must lie in (0, 0.5]");
  std::vector<double> grid;
  const auto steps = static_cast<long>(std::floor(1.0 / grid_step + 1e-9));
  for (long k = 0; k <= steps; ++k) grid.push_back(std::min(1.0, static_cast<double>(k) * grid_step));
  if (1.0 - grid.back() > 1e-9) grid.push_back(1.0);
  else grid.back() = 1.0;
  return grid;
}

SpatialConfig learn_lambda(std::span<const LambdaSample> samples, PartId part, double alpha, double grid_step,
                           double eps_per_area) {
  if (samples.empty()) throw Error(ErrorKind::InvalidArgument, "learn_lambda needs training samples");
  bool has_pos = false;
  bool has_neg = false;
  for (const auto& s : samples) {
    (s.label != 0 ? has_pos : has_neg) = true;
    if (s.map.get().part() != part) throw Error(ErrorKind::PartMismatch, "training map belongs to another part");
  }
  if (!has_pos || !has_neg) throw Error(ErrorKind::DegenerateLabels, "training labels are all identical");
  if (!(alpha > 0.0)) throw Error(ErrorKind::InvalidArgument, "alpha must be > 0");

  const std::vector<double> grid = lambda_grid(grid_step);
  const std::vector<double> los = band_lo_free(part) ? grid : std::vector<double>{0.0};
  const std::vector<double> his = band_hi_free(part) ? grid : std::vector<double>{1.0};

  SpatialConfig best{part, 0.0, 1.0};
  double best_objective = -std::numeric_limits<double>::infinity();
  bool found = false;
  // Ascending scan with strict improvement keeps the smallest (lo, hi) on ties.
  for (double lo : los) {
    for (double hi : his) {
      if (!(lo < hi)) continue;
      const SpatialConfig cfg{part, lo, hi};
      const double obj = lambda_objective(samples, cfg, alpha, eps_per_area);
      if (!found || obj > best_objective) {
        best = cfg;
        best_objective = obj;
        found = true;
      }
    }
  }
  return best;
}

}  // namespace faceness
