#include "stokes/dopri.hpp"

#include <cmath>
#include <stdexcept>

namespace stokes {

namespace {

using state = std::vector<std::complex<double>>;

// Dormand-Prince 5(4) tableau
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;

}  // namespace

state integrate_dopri(const OdeRhs& rhs, state y, const OdeParams& params) {
  const size_t n = y.size();
  state k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), ynew(n);

  double tau = 0.0;
  double h = std::min(params.rstep, params.max_step);
  rhs(tau, y, k1);  // FSAL seed

  int rejected_in_a_row = 0;
  while (tau < 1.0) {
    h = std::min(h, 1.0 - tau);
    if (h < 1e-15) throw std::runtime_error("ODE step size collapsed");

    for (size_t i = 0; i < n; ++i) ytmp[i] = y[i] + h * a21 * k1[i];
    rhs(tau + c2 * h, ytmp, k2);
    for (size_t i = 0; i < n; ++i) ytmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    rhs(tau + c3 * h, ytmp, k3);
    for (size_t i = 0; i < n; ++i)
      ytmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    rhs(tau + c4 * h, ytmp, k4);
    for (size_t i = 0; i < n; ++i)
      ytmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    rhs(tau + c5 * h, ytmp, k5);
    for (size_t i = 0; i < n; ++i)
      ytmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] +
                            a65 * k5[i]);
    rhs(tau + h, ytmp, k6);
    for (size_t i = 0; i < n; ++i)
      ynew[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    rhs(tau + h, ynew, k7);

    // scaled RMS error over components
    double err = 0.0;
    bool finite = true;
    for (size_t i = 0; i < n; ++i) {
      const std::complex<double> ei =
          h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      const double scale =
          params.abs_tol + params.thresh * std::max(std::abs(y[i]), std::abs(ynew[i]));
      const double mag = std::abs(ei);
      if (!std::isfinite(mag) || !std::isfinite(std::abs(ynew[i]))) {
        finite = false;
        break;
      }
      if (mag == 0.0) continue;
      if (scale == 0.0) {
        err = 1e30;  // unresolvable component; force a smaller step
        break;
      }
      err = std::max(err, mag / scale);
    }
    if (!finite) throw std::runtime_error("ODE state is not finite");

    if (err <= 1.0) {
      tau += h;
      y.swap(ynew);
      k1.swap(k7);
      rejected_in_a_row = 0;
    } else if (++rejected_in_a_row > 60) {
      throw std::runtime_error("ODE step size collapsed (persistent rejection)");
    }
    const double factor =
        (err <= 1e-30) ? 5.0 : std::min(5.0, std::max(0.2, 0.9 * std::pow(err, -0.2)));
    h = std::min(h * factor, params.max_step);
  }
  return y;
}

}  // namespace stokes
