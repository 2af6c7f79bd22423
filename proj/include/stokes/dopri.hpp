#pragma once

#include <complex>
#include <functional>
#include <vector>

namespace stokes {

struct OdeParams {
  double thresh = 1e-14;   // relative error goal per step
  double rstep = 1e-4;     // initial step
  double max_step = 2e-4;  // cap (2 * rstep by default)
  double abs_tol = 0.0;    // absolute tolerance component
};

/// Derivative callback: dy/dtau = f(tau, y).
using OdeRhs =
    std::function<void(double, const std::vector<std::complex<double>>&,
                       std::vector<std::complex<double>>&)>;

/// Adaptive Dormand-Prince 4(5) over tau in [0, 1], error controlled per
/// component against abs_tol + thresh * max(|y0|, |y1|).
/// Throws on step-size collapse and on non-finite values.
std::vector<std::complex<double>> integrate_dopri(const OdeRhs& rhs,
                                                  std::vector<std::complex<double>> y,
                                                  const OdeParams& params);

}  // namespace stokes
