#include "faceness/integral.hpp"

#include <algorithm>
#include <cmath>

namespace faceness {

IntegralMap build_integral(const PartnessMap& m) {
  IntegralMap im;
  im.part_ = m.part();
  im.width_ = m.width();
  im.height_ = m.height();
  const std::size_t stride = im.width_ + 1;
  im.table_.assign(stride * (im.height_ + 1), 0.0);

  const auto values = m.values();
  for (std::size_t y = 0; y < im.height_; ++y) {
    double row_sum = 0.0;
    const float* row = values.data() + y * im.width_;
    double* above = im.table_.data() + y * stride;
    double* out = im.table_.data() + (y + 1) * stride;
    for (std::size_t x = 0; x < im.width_; ++x) {
      row_sum += static_cast<double>(row[x]);
      out[x + 1] = above[x + 1] + row_sum;
    }
  }
  return im;
}

double IntegralMap::value(double x, double y) const {
  x = std::clamp(x, 0.0, static_cast<double>(width_));
  y = std::clamp(y, 0.0, static_cast<double>(height_));
  const auto i0 = static_cast<std::size_t>(std::floor(x));
  const auto j0 = static_cast<std::size_t>(std::floor(y));
  // fx, fy are zero on the far border, so (i0+1, j0+1) is only read inside the table.
  const double fx = x - static_cast<double>(i0);
  const double fy = y - static_cast<double>(j0);

  const double v00 = at(i0, j0);
  // Integer corners skip interpolation so integer-aligned sums stay exact.
  if (fx == 0.0 && fy == 0.0) return v00;
  if (fx == 0.0) return v00 + fy * (at(i0, j0 + 1) - v00);
  if (fy == 0.0) return v00 + fx * (at(i0 + 1, j0) - v00);
  const double v10 = at(i0 + 1, j0);
  const double v01 = at(i0, j0 + 1);
  const double v11 = at(i0 + 1, j0 + 1);
  return v00 + fx * (v10 - v00) + fy * (v01 - v00) + fx * fy * (v11 - v10 - v01 + v00);
}

double region_sum(const IntegralMap& im, const Window& w) {
  if (!w.valid()) throw Error(ErrorKind::EmptyWindow, "region_sum on an empty window");
  const double s = im.value(w.x2, w.y2) - im.value(w.x1, w.y2) - im.value(w.x2, w.y1) + im.value(w.x1, w.y1);
  return s > 0.0 ? s : 0.0;
}

}  // namespace faceness
