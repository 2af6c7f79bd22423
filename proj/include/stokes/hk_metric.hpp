#pragma once

#include "stokes/ieq.hpp"
#include "stokes/pde.hpp"

namespace stokes {

struct ComplexField {
  FieldGrid re, im;
};

/// Bounded solution of the variation equation
///   (lap - 8(e^{2u} + e^{-2u}|P2|^2)) F + 8 e^{-2u} conj(P2) P2_dot = 0
/// with the far-field asymptote F -> P2_dot/(2 P2) imposed as Dirichlet data
/// on the square boundary. One linear solve per real component.
ComplexField solve_F_variation(const FieldGrid& u, const ComplexPoly& p2, cplx p2_dot);

/// L2 metric coefficient: interior Riemann sum (midpoint rule on cell centers
/// clipped to |z| < r) of 4 e^{-2u}(|P2_dot|^2 - Re(F P2 conj(P2_dot))), plus
/// the tail 4 pi / ((n-2) r^{n-2}) for deg P2 = n.
struct MetricIntegral {
  double total = 0.0;
  double inner = 0.0;
  double outer = 0.0;
};
MetricIntegral l2_metric_integral(const FieldGrid& u, const ComplexField& f,
                                  const ComplexPoly& p2, cplx p2_dot);

/// Closed form 25 M^2 / (6 sqrt(3)) |c|^(-1/3); throws at c = 0.
double semiflat_metric(cplx c);

/// Metric coefficient from spectral-coordinate Darboux derivatives by forward
/// finite differences of the ray solutions at c, c+eps, c+i eps.
double ieq_metric(const Theory& theory, cplx c, double eps, const IeqParams& params);

/// Same finite-difference bracket applied to caller-provided log-coordinates;
/// used to validate the pipeline against the closed-form semiflat values.
double metric_bracket(const std::array<double, 2>& x_at_c,
                      const std::array<double, 2>& x_at_c_plus_eps,
                      const std::array<double, 2>& x_at_c_plus_ieps, double eps);

struct IntegrandGrids {
  FieldGrid integrand;       // I
  FieldGrid integrand_sf;    // semiflat substitute
  FieldGrid difference;      // I - I^sf
};
IntegrandGrids emit_integrand_grids(const FieldGrid& u, const ComplexField& f,
                                    const ComplexPoly& p2, cplx p2_dot);

struct MetricOptions {
  double rmax = 10.0;
  int pde_nmesh = 1400;
  double pde_thresh = 5e-11;
  PdeMethod method = PdeMethod::Euler;
  double eps = 1e-6;
  IeqParams ieq;

  MetricOptions() { ieq.tolerance = 1e-15; }
};

struct MetricSample {
  cplx c;
  double g_de = 0.0, g_ieq = 0.0, g_sf = 0.0;
  double i_in = 0.0, i_out = 0.0;
  double eps = 0.0;
};

/// Direct + integral-equation + closed-form metric at one parameter point of
/// the cubic family with P2 = z^3 - c, P2_dot = -1.
MetricSample metric_point(cplx c, const MetricOptions& opts, bool with_de = true);

}  // namespace stokes
