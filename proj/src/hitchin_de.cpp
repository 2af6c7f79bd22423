#include "stokes/hitchin_de.hpp"

#include <cmath>
#include <stdexcept>

namespace stokes {

ConnectionMatrixField hitchin_connection(const ComplexPoly& p_top, int rank,
                                         const UEvaluator& u_eval, cplx zeta) {
  if (zeta == cplx(0)) throw std::invalid_argument("zero spectral parameter");
  ConnectionMatrixField conn;
  conn.rank = rank;
  const cplx inv_zeta = 1.0 / zeta;
  if (rank == 2) {
    conn.eval = [p_top, u_eval, zeta, inv_zeta](cplx z, cplx* a_z, cplx* a_zbar) {
      const double x = z.real(), y = z.imag();
      const double u = u_eval.u.eval(x, y);
      const cplx uz = 0.5 * cplx(u_eval.ux.eval(x, y), -u_eval.uy.eval(x, y));
      const cplx p = p_top.eval(z);
      a_z[0] = -uz;
      a_z[1] = -inv_zeta * p;
      a_z[2] = inv_zeta;
      a_z[3] = uz;
      a_zbar[0] = 0.0;
      a_zbar[1] = zeta * std::exp(2.0 * u);
      a_zbar[2] = -zeta * std::conj(p) * std::exp(-2.0 * u);
      a_zbar[3] = 0.0;
    };
  } else if (rank == 3) {
    conn.eval = [p_top, u_eval, zeta, inv_zeta](cplx z, cplx* a_z, cplx* a_zbar) {
      const double x = z.real(), y = z.imag();
      const double u = u_eval.u.eval(x, y);
      const cplx uz = 0.5 * cplx(u_eval.ux.eval(x, y), -u_eval.uy.eval(x, y));
      const cplx p = p_top.eval(z);
      for (int i = 0; i < 9; ++i) {
        a_z[i] = 0.0;
        a_zbar[i] = 0.0;
      }
      a_z[0] = -uz;
      a_z[2] = -inv_zeta * p;
      a_z[3] = inv_zeta;
      a_z[7] = inv_zeta;
      a_z[8] = uz;
      a_zbar[1] = zeta * std::exp(u);
      a_zbar[5] = zeta * std::exp(u);
      a_zbar[6] = -zeta * std::conj(p) * std::exp(-2.0 * u);
    };
  } else {
    throw std::invalid_argument("rank must be 2 or 3");
  }
  return conn;
}

HitchinDEResult hitchin_spectral_coords_DE(const Theory& theory,
                                           const std::map<FamilyParam, cplx>& params,
                                           double R, cplx zeta,
                                           const HitchinDEOptions& opts) {
  if (R <= 0.0) throw std::invalid_argument("R must be positive");
  if (zeta == cplx(0)) throw std::invalid_argument("zero spectral parameter");

  HitchinDEResult res;
  const DifferentialTuple w = build_differentials(theory, params);
  const DifferentialTuple scaled = scale_differentials(w, R);
  if (!scaled.p2_or_zero().is_zero() && theory.rank == 3)
    throw std::invalid_argument("rank-3 direct pipeline supports the cyclic case only");
  auto [norm, fmap] = normalize_quasi_monic_centered(scaled);
  res.normalized = norm;

  const double radius = opts.radius_override.value_or(
      choose_radius_hitchin(norm, opts.rmax_cap));
  res.grid_radius = radius;

  Grid2D grid{opts.pde_nmesh, radius};
  PdeOptions popts;
  popts.method = opts.pde_method;
  popts.pde_thresh = opts.pde_thresh;
  popts.anderson_depth = opts.anderson_depth;
  popts.fourier_shift = opts.fourier_shift;
  const FieldGrid u = newton_solve_u(norm.top(), theory.rank, grid, popts, &res.pde_report);
  const UEvaluator u_eval = interpolate_field(u);

  const auto dirs = stokes_ray_directions(norm, zeta);
  const auto labeled = labeled_sector_directions(theory, dirs, std::arg(zeta));
  res.ode_radius = 0.98 * radius;

  const auto conn = hitchin_connection(norm.top(), theory.rank, u_eval, zeta);
  res.frames = subdominant_vectors(conn, labeled, res.ode_radius, opts.ode);
  res.coords = spectral_coords_DE(res.frames, theory, SignConvention::Paper);
  res.ode_error = ode_error_estimate(res.frames, theory, opts.ode.thresh);
  return res;
}

RichardsonResult richardson_error(double coarse, double middle, double fine) {
  RichardsonResult out;
  const double d1 = middle - coarse;
  const double d2 = fine - middle;
  if (d1 == 0.0 && d2 == 0.0) {
    out.accepted = true;
    out.estimate = 0.0;
    out.exponent = 0.0;
    out.extrapolated = fine;
    return out;
  }
  if (d1 * d2 <= 0.0)
    throw std::domain_error("no power-law fit: successive differences disagree in sign");
  out.exponent = std::log2(d1 / d2);
  const double denom = std::pow(2.0, out.exponent) - 1.0;
  out.extrapolated = fine + d2 / denom;
  out.estimate = std::abs(fine - out.extrapolated);
  out.accepted = out.exponent >= 1.6 && out.exponent <= 2.4;
  return out;
}

}  // namespace stokes
