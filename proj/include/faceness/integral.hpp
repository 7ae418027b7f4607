#pragma once

#include <vector>

#include "faceness/core.hpp"

namespace faceness {

/// Summed-area table over a PartnessMap.
///
/// The table has (width+1) x (height+1) entries; entry (i, j) holds the sum of
/// all map values in columns < i and rows < j, accumulated in double.
/// Real-valued query points are resolved by bilinear interpolation of the
/// table, which equals treating each pixel as a unit square of constant
/// density. Points outside the map are clamped to its border, so mass outside
/// the map is zero.
class IntegralMap {
 public:
  IntegralMap() = default;

  PartId part() const { return part_; }
  std::size_t width() const { return width_; }
  std::size_t height() const { return height_; }

  /// Table entry at integer corner (i, j), 0 <= i <= width, 0 <= j <= height.
  double at(std::size_t i, std::size_t j) const { return table_[j * (width_ + 1) + i]; }

  /// Cumulative mass of [0,x) x [0,y).
  double value(double x, double y) const;

  /// Total mass of the map.
  double total() const { return at(width_, height_); }

  friend IntegralMap build_integral(const PartnessMap& m);

 private:
  PartId part_ = PartId::Hair;
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::vector<double> table_;
};

IntegralMap build_integral(const PartnessMap& m);

/// Mass inside `w` via four-corner evaluation. Throws EmptyWindow.
double region_sum(const IntegralMap& im, const Window& w);

}  // namespace faceness
