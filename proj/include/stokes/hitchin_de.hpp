#pragma once

#include <map>
#include <optional>

#include "stokes/oper_de.hpp"
#include "stokes/pde.hpp"
#include "stokes/periods.hpp"

namespace stokes {

/// Flat connection of the harmonic-metric family in the holomorphic frame.
///
/// Rank 2, metric diag(e^-u, e^u), top polynomial P (scalings folded in):
///   A_z    = [ -u_z        -P/zeta ]      A_zbar = [ 0                zeta e^{2u} ]
///            [  1/zeta      u_z    ]               [ -zeta conj(P) e^{-2u}   0    ]
/// Rank 3 (cyclic), metric diag(e^-u, 1, e^u):
///   A_z    = [ -u_z   0     -P/zeta ]     A_zbar = [ 0                 zeta e^u  0        ]
///            [ 1/zeta 0      0      ]              [ 0                 0         zeta e^u ]
///            [ 0      1/zeta u_z    ]              [ -zeta conj(P) e^{-2u}  0    0        ]
/// with u_z = (u_x - i u_y)/2. Zero curvature is equivalent to u solving the
/// self-duality equation; the tests verify it numerically on plaquettes.
ConnectionMatrixField hitchin_connection(const ComplexPoly& p_top, int rank,
                                         const UEvaluator& u_eval, cplx zeta);

struct HitchinDEOptions {
  int pde_nmesh = 1023;
  PdeMethod pde_method = PdeMethod::Fourier;
  double pde_thresh = 1e-9;
  double rmax_cap = 12.0;
  std::optional<double> radius_override;  // grid half-width
  OdeParams ode;
  int anderson_depth = 3;
  FourierShift fourier_shift = FourierShift::HalfRange;
};

struct HitchinDEResult {
  CoordResult coords;  // paper convention
  std::vector<double> ode_error;
  FrameSet frames;
  double grid_radius = 0.0;
  double ode_radius = 0.0;
  PdeReport pde_report;
  DifferentialTuple normalized;
};

/// Full direct pipeline: scale by R, normalize, solve the self-duality
/// equation on the grid, interpolate, transport along the labeled sector
/// bisectors with the flat connection, read off coordinates.
HitchinDEResult hitchin_spectral_coords_DE(const Theory& theory,
                                           const std::map<FamilyParam, cplx>& params,
                                           double R, cplx zeta,
                                           const HitchinDEOptions& opts);

struct RichardsonResult {
  double estimate = 0.0;
  double exponent = 0.0;
  bool accepted = false;
  double extrapolated = 0.0;
};

/// Error estimate from three values on a mesh ladder with spacing ratio 2
/// (coarse, middle, fine). Fits error ~ h^p; accepted iff p in [1.6, 2.4].
/// Equal values give an accepted zero estimate; differences of opposite sign
/// throw (no power-law fit).
RichardsonResult richardson_error(double coarse, double middle, double fine);

}  // namespace stokes
