#include "stokes/spline.hpp"

#include <cmath>
#include <stdexcept>

namespace stokes {

namespace {

// one-sided 4th-order derivative estimates at the ends of a sampled row
double fd_left(const double* f, int stride, double h) {
  return (-25.0 * f[0] + 48.0 * f[stride] - 36.0 * f[2 * stride] + 16.0 * f[3 * stride] -
          3.0 * f[4 * stride]) /
         (12.0 * h);
}
double fd_right(const double* f, int n, int stride, double h) {
  const double* e = f + (n - 1) * stride;
  return (25.0 * e[0] - 48.0 * e[-stride] + 36.0 * e[-2 * stride] - 16.0 * e[-3 * stride] +
          3.0 * e[-4 * stride]) /
         (12.0 * h);
}

// Solve for n+2 B-spline coefficients c[0..n+1] interpolating f[0..n-1] with
// clamped end derivatives. Interpolation rows: c_j + 4 c_{j+1} + c_{j+2} = 6 f_j;
// derivative rows: c_{j+2} - c_j = 2 h f'_j at j = 0, n-1.
void solve_row(const double* f, int n, int stride, double h, double* c) {
  const double fp0 = fd_left(f, stride, h);
  const double fp1 = fd_right(f, n, stride, h);
  // tridiagonal system for c[1..n]
  std::vector<double> diag(n), rhs(n), sub(n, 1.0), sup(n, 1.0);
  for (int i = 0; i < n; ++i) {
    diag[i] = 4.0;
    rhs[i] = 6.0 * f[i * stride];
  }
  sup[0] = 2.0;
  rhs[0] += 2.0 * h * fp0;
  sub[n - 1] = 2.0;
  rhs[n - 1] -= 2.0 * h * fp1;
  for (int i = 1; i < n; ++i) {
    const double m = sub[i] / diag[i - 1];
    diag[i] -= m * sup[i - 1];
    rhs[i] -= m * rhs[i - 1];
  }
  c[n] = rhs[n - 1] / diag[n - 1];
  for (int i = n - 2; i >= 0; --i) c[i + 1] = (rhs[i] - sup[i] * c[i + 2]) / diag[i];
  c[0] = c[2] - 2.0 * h * fp0;
  c[n + 1] = c[n - 1] + 2.0 * h * fp1;
}

inline void bspline_weights(double t, double* w) {
  const double t2 = t * t, t3 = t2 * t;
  w[0] = (1.0 - 3.0 * t + 3.0 * t2 - t3) / 6.0;
  w[1] = (4.0 - 6.0 * t2 + 3.0 * t3) / 6.0;
  w[2] = (1.0 + 3.0 * t + 3.0 * t2 - 3.0 * t3) / 6.0;
  w[3] = t3 / 6.0;
}

}  // namespace

Spline2D::Spline2D(const std::vector<double>& data, int nx, int ny, double x0, double y0,
                   double h)
    : nx_(nx), ny_(ny), x0_(x0), y0_(y0), h_(h) {
  if (nx < 5 || ny < 5) throw std::invalid_argument("spline grid too small");
  if (data.size() != static_cast<size_t>(nx) * ny)
    throw std::invalid_argument("spline data size mismatch");

  // pass 1: along x for each data row -> (ny) x (nx+2)
  std::vector<double> cx(static_cast<size_t>(ny) * (nx + 2));
  for (int iy = 0; iy < ny; ++iy)
    solve_row(data.data() + static_cast<size_t>(iy) * nx, nx, 1, h, &cx[iy * (nx + 2)]);

  // pass 2: along y for each coefficient column -> (ny+2) x (nx+2)
  coef_.assign(static_cast<size_t>(ny + 2) * (nx + 2), 0.0);
  std::vector<double> col(ny), ccol(ny + 2);
  for (int jx = 0; jx < nx + 2; ++jx) {
    for (int iy = 0; iy < ny; ++iy) col[iy] = cx[static_cast<size_t>(iy) * (nx + 2) + jx];
    solve_row(col.data(), ny, 1, h, ccol.data());
    for (int iy = 0; iy < ny + 2; ++iy)
      coef_[static_cast<size_t>(iy) * (nx + 2) + jx] = ccol[iy];
  }
}

bool Spline2D::in_domain(double x, double y) const {
  const double eps = 1e-9 * h_;
  return x >= x0_ - eps && x <= xmax() + eps && y >= y0_ - eps && y <= ymax() + eps;
}

double Spline2D::eval(double x, double y) const {
  if (!in_domain(x, y)) throw std::domain_error("spline evaluation outside the grid");
  double ux = (x - x0_) / h_;
  double uy = (y - y0_) / h_;
  int ix = std::min(std::max(static_cast<int>(std::floor(ux)), 0), nx_ - 2);
  int iy = std::min(std::max(static_cast<int>(std::floor(uy)), 0), ny_ - 2);
  const double tx = ux - ix, ty = uy - iy;
  double wx[4], wy[4];
  bspline_weights(tx, wx);
  bspline_weights(ty, wy);
  double acc = 0.0;
  for (int m = 0; m < 4; ++m) {
    const double* row = &coef_[static_cast<size_t>(iy + m) * (nx_ + 2) + ix];
    acc += wy[m] * (wx[0] * row[0] + wx[1] * row[1] + wx[2] * row[2] + wx[3] * row[3]);
  }
  return acc;
}

}  // namespace stokes
