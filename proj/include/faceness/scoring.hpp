#pragma once

#include <functional>
#include <map>
#include <span>

#include "faceness/core.hpp"
#include "faceness/integral.hpp"

namespace faceness {

/// Vertical band [band_lo, band_hi) of a window, as fractions of its height,
/// holding the part's positive mass. Hair pins band_lo = 0, Beard pins band_hi = 1.
struct SpatialConfig {
  PartId part = PartId::Hair;
  double band_lo = 0.0;
  double band_hi = 1.0;

  /// Throws InvalidArgument when the band or the part's pinned edge is violated.
  void validate() const;
};

bool band_lo_free(PartId part);
bool band_hi_free(PartId part);

/// Band defaults matching the canonical face layout.
SpatialConfig default_spatial_config(PartId part);

struct FacenessParams {
  std::map<PartId, SpatialConfig> configs;
  /// Sigmoid sharpness of the band likelihood.
  double alpha = 1.0;
  /// Denominator guard per unit window area; the guard for a window is epsilon * area.
  double epsilon = 1e-6;

  static FacenessParams defaults();
  void validate() const;
  double guard_for(const Window& w) const { return epsilon * w.area(); }
};

/// Band sums of a window: S_in over the band, S_out over the rest of the window.
struct BandSums {
  double inside = 0.0;
  double outside = 0.0;
};

BandSums band_sums(const IntegralMap& im, const SpatialConfig& cfg, const Window& w);

/// Delta_w = S_in / (S_out + eps). Throws EmptyWindow, PartMismatch.
double part_score(const IntegralMap& im, const SpatialConfig& cfg, const Window& w, double eps);

/// Mean over the parts that carry a score. Throws NoScores.
double combined_faceness(const PartScores& scores);

struct LambdaSample {
  Window window;
  int label = 0;  // 1 face, 0 non-face
  std::reference_wrapper<const IntegralMap> map;
};

/// Log-likelihood of the labels under the band config; each window contributes
/// log sigma or log(1 - sigma) with sigma = 1 / (1 + exp(-alpha * Delta_w)).
double lambda_objective(std::span<const LambdaSample> samples, const SpatialConfig& cfg, double alpha,
                        double eps_per_area = 1e-6);

/// Grid {0, step, 2 step, ..., 1}; 1 is appended when step does not divide it.
std::vector<double> lambda_grid(double grid_step);

/// Exhaustive grid search for the band config maximizing `lambda_objective`.
/// Ties go to smaller band_lo, then smaller band_hi.
/// Throws DegenerateLabels when every label is identical.
SpatialConfig learn_lambda(std::span<const LambdaSample> samples, PartId part, double alpha, double grid_step,
                           double eps_per_area = 1e-6);

}  // namespace faceness
