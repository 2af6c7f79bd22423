#pragma once

#include <vector>

namespace stokes {

/// Interpolating cubic B-spline on a uniform 2D grid (clamped ends, with
/// boundary derivatives estimated by one-sided 5-point differences). Exact on
/// cubic polynomials; interior error O(h^4) for smooth data.
class Spline2D {
public:
  Spline2D() = default;
  /// data is row-major: data[iy * nx + ix], x = x0 + ix*h, y = y0 + iy*h.
  Spline2D(const std::vector<double>& data, int nx, int ny, double x0, double y0,
           double h);

  double eval(double x, double y) const;
  bool in_domain(double x, double y) const;
  double x0() const { return x0_; }
  double y0() const { return y0_; }
  double xmax() const { return x0_ + h_ * (nx_ - 1); }
  double ymax() const { return y0_ + h_ * (ny_ - 1); }

private:
  int nx_ = 0, ny_ = 0;
  double x0_ = 0.0, y0_ = 0.0, h_ = 1.0;
  std::vector<double> coef_;  // (ny_+2) x (nx_+2)
};

}  // namespace stokes
