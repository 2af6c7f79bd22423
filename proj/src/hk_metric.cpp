#include "stokes/hk_metric.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace stokes {

namespace {

constexpr double kPi = std::numbers::pi;

double m_constant() {
  return std::sqrt(3.0 * kPi) * std::tgamma(4.0 / 3.0) / std::tgamma(11.0 / 6.0);
}

double integrand_value(double u, cplx f, cplx p2, cplx p2_dot) {
  return 4.0 * std::exp(-2.0 * u) *
         (std::norm(p2_dot) - (f * p2 * std::conj(p2_dot)).real());
}

}  // namespace

ComplexField solve_F_variation(const FieldGrid& u, const ComplexPoly& p2, cplx p2_dot) {
  const Grid2D& g = u.grid;
  const int t = g.total();
  FieldGrid kappa(g, FieldKind::Generic);
  FieldGrid src_re(g, FieldKind::Generic), src_im(g, FieldKind::Generic);
  FieldGrid bc_re(g, FieldKind::Generic), bc_im(g, FieldKind::Generic);
  for (int iy = 0; iy < t; ++iy) {
    for (int ix = 0; ix < t; ++ix) {
      const cplx z(g.coord(ix), g.coord(iy));
      const cplx p = p2.eval(z);
      const double uv = u.at(ix, iy);
      kappa.at(ix, iy) = 8.0 * (std::exp(2.0 * uv) + std::exp(-2.0 * uv) * std::norm(p));
      // (lap - kappa) F = -8 e^{-2u} conj(P2) P2_dot
      const cplx s = -8.0 * std::exp(-2.0 * uv) * std::conj(p) * p2_dot;
      src_re.at(ix, iy) = s.real();
      src_im.at(ix, iy) = s.imag();
      if (ix == 0 || ix == t - 1 || iy == 0 || iy == t - 1) {
        const cplx fb = 0.5 * p2_dot / p;
        bc_re.at(ix, iy) = fb.real();
        bc_im.at(ix, iy) = fb.imag();
      }
    }
  }
  ComplexField f{solve_helmholtz_dirichlet(kappa, src_re, bc_re),
                 solve_helmholtz_dirichlet(kappa, src_im, bc_im)};
  return f;
}

MetricIntegral l2_metric_integral(const FieldGrid& u, const ComplexField& f,
                                  const ComplexPoly& p2, cplx p2_dot) {
  const Grid2D& g = u.grid;
  const int t = g.total();
  const double h = g.spacing();
  const int n = p2.degree();
  if (n < 3) throw std::invalid_argument("tail formula needs deg P2 >= 3");

  const Spline2D su(u.values, t, t, -g.r, -g.r, h);
  const Spline2D sfr(f.re.values, t, t, -g.r, -g.r, h);
  const Spline2D sfi(f.im.values, t, t, -g.r, -g.r, h);

  double inner = 0.0;
  for (int iy = 0; iy < t - 1; ++iy) {
    const double yc = g.coord(iy) + 0.5 * h;
    for (int ix = 0; ix < t - 1; ++ix) {
      const double xc = g.coord(ix) + 0.5 * h;
      if (xc * xc + yc * yc >= g.r * g.r) continue;
      const cplx z(xc, yc);
      const double uv = su.eval(xc, yc);
      const cplx fv(sfr.eval(xc, yc), sfi.eval(xc, yc));
      inner += integrand_value(uv, fv, p2.eval(z), p2_dot);
    }
  }
  inner *= h * h;

  MetricIntegral out;
  out.inner = inner;
  out.outer = 4.0 * kPi / ((n - 2) * std::pow(g.r, n - 2));
  out.total = out.inner + out.outer;
  return out;
}

double semiflat_metric(cplx c) {
  if (c == cplx(0)) throw std::invalid_argument("semiflat metric is singular at c = 0");
  const double m = m_constant();
  return 25.0 * m * m / (6.0 * std::sqrt(3.0)) * std::pow(std::abs(c), -1.0 / 3.0);
}

double metric_bracket(const std::array<double, 2>& x_at_c,
                      const std::array<double, 2>& x_at_c_plus_eps,
                      const std::array<double, 2>& x_at_c_plus_ieps, double eps) {
  const double da1 = (x_at_c_plus_eps[0] - x_at_c[0]) / eps;
  const double da2 = (x_at_c_plus_eps[1] - x_at_c[1]) / eps;
  const double db1 = (x_at_c_plus_ieps[0] - x_at_c[0]) / eps;
  const double db2 = (x_at_c_plus_ieps[1] - x_at_c[1]) / eps;
  // orientation fixed by positivity of the closed-form semiflat limit
  return da2 * db1 - da1 * db2;
}

namespace {

std::array<double, 2> log_cluster_at(const Theory& theory, cplx c, const IeqParams& params) {
  std::map<FamilyParam, cplx> ps = {{FamilyParam::Lambda, 0.0}, {FamilyParam::C, c}};
  const PeriodVector pv = periods_at(theory, ps);
  const RaySolution sol = solve_fixed_point(theory, pv, IeqMode::Hitchin, 1.0, params);
  if (!sol.converged) throw std::runtime_error("ray iteration did not converge");
  std::array<double, 2> out;
  for (int i = 0; i < 2; ++i) {
    ChargeVector basis(theory.lattice_rank, 0);
    basis[i] = 1;
    out[i] = evaluate_at(theory, sol, basis, cplx(1.0)).real();
  }
  return out;
}

}  // namespace

double ieq_metric(const Theory& theory, cplx c, double eps, const IeqParams& params) {
  const auto x0 = log_cluster_at(theory, c, params);
  const auto xa = log_cluster_at(theory, c + eps, params);
  const auto xb = log_cluster_at(theory, c + cplx(0.0, eps), params);
  return metric_bracket(x0, xa, xb, eps);
}

IntegrandGrids emit_integrand_grids(const FieldGrid& u, const ComplexField& f,
                                    const ComplexPoly& p2, cplx p2_dot) {
  const Grid2D& g = u.grid;
  IntegrandGrids out{FieldGrid(g, FieldKind::Generic), FieldGrid(g, FieldKind::Generic),
                     FieldGrid(g, FieldKind::Generic)};
  const int t = g.total();
  for (int iy = 0; iy < t; ++iy) {
    for (int ix = 0; ix < t; ++ix) {
      const cplx z(g.coord(ix), g.coord(iy));
      const cplx p = p2.eval(z);
      const double iv = integrand_value(
          u.at(ix, iy), cplx(f.re.at(ix, iy), f.im.at(ix, iy)), p, p2_dot);
      // semiflat substitutes u -> log|P2|/2, F -> P2_dot/(2 P2)
      const double usf = 0.5 * std::log(std::abs(p));
      const cplx fsf = 0.5 * p2_dot / p;
      const double isf = integrand_value(usf, fsf, p, p2_dot);
      out.integrand.at(ix, iy) = iv;
      out.integrand_sf.at(ix, iy) = isf;
      out.difference.at(ix, iy) = iv - isf;
    }
  }
  return out;
}

MetricSample metric_point(cplx c, const MetricOptions& opts, bool with_de) {
  const Theory& theory = get_theory("A1A2");
  MetricSample sample;
  sample.c = c;
  sample.eps = opts.eps;
  sample.g_sf = semiflat_metric(c);
  sample.g_ieq = ieq_metric(theory, c, opts.eps, opts.ieq);
  if (with_de) {
    const ComplexPoly p2({-c, 0.0, 0.0, 1.0});
    const cplx p2_dot(-1.0, 0.0);
    Grid2D grid{opts.pde_nmesh, opts.rmax};
    PdeOptions popts;
    popts.method = opts.method;
    popts.pde_thresh = opts.pde_thresh;
    const FieldGrid u = newton_solve_u(p2, 2, grid, popts);
    const ComplexField f = solve_F_variation(u, p2, p2_dot);
    const MetricIntegral mi = l2_metric_integral(u, f, p2, p2_dot);
    sample.g_de = mi.total;
    sample.i_in = mi.inner;
    sample.i_out = mi.outer;
  }
  return sample;
}

}  // namespace stokes
