#pragma once

#include <optional>
#include <string>
#include <vector>

#include "stokes/complex_poly.hpp"
#include "stokes/spline.hpp"

namespace stokes {

/// Uniform square grid on [-r, r]^2 with nmesh interior nodes per axis plus
/// the Dirichlet boundary ring; spacing 2r/(nmesh+1). The fourier backend
/// needs nmesh = 2^j - 1 so that the interior matches a fast sine transform.
struct Grid2D {
  int nmesh = 255;
  double r = 8.0;

  double spacing() const { return 2.0 * r / (nmesh + 1); }
  int total() const { return nmesh + 2; }  // nodes per axis incl. boundary
  double coord(int i) const { return -r + spacing() * i; }
};

enum class FieldKind { U, Ux, Uy, F, Residual, Generic };

struct FieldGrid {
  Grid2D grid;
  FieldKind kind = FieldKind::Generic;
  std::vector<double> values;  // row-major [iy * total + ix]

  FieldGrid() = default;
  FieldGrid(const Grid2D& g, FieldKind k)
      : grid(g), kind(k), values(static_cast<size_t>(g.total()) * g.total(), 0.0) {}
  double& at(int ix, int iy) { return values[static_cast<size_t>(iy) * grid.total() + ix]; }
  double at(int ix, int iy) const {
    return values[static_cast<size_t>(iy) * grid.total() + ix];
  }

  void save(const std::string& path) const;
  static FieldGrid load(const std::string& path);
};

enum class PdeMethod { Euler, Fourier };

/// Constant for the constant-coefficient replacement step: half the range of
/// the linearization coefficient (default), or the midpoint of its range.
enum class FourierShift { HalfRange, Midpoint };

struct PdeOptions {
  PdeMethod method = PdeMethod::Euler;
  double pde_thresh = 1e-9;      // C0 norm (euler) / L2 norm (fourier)
  int max_outer = 200000;
  FourierShift fourier_shift = FourierShift::HalfRange;
  int anderson_depth = 3;        // fourier acceleration depth; 0 = plain
  bool use_model = true;         // false only in manufactured-solution tests
  int euler_cap = 1400;
  int fourier_cap = 8191;
  bool verbose = false;
};

struct PdeReport {
  int iterations = 0;
  double final_residual = 0.0;
};

/// Smooth bump: positive on |z| < 0.9 r, zero outside.
double sigma_bump(double abs_z, double r);

/// Closed-form model with the self-duality far-field growth:
/// u0 = 1/(k+2) log(|P_N|^2 + sigma e^{-|P_N|^4}), k = 2/(N-1)
/// (the exponent equals 1/(N+2) in rank 2).
FieldGrid model_u0(const ComplexPoly& pn, const Grid2D& grid, int rank);

/// Five-point residual of the self-duality equation on the interior:
/// lap u - 4(e^{ku} - e^{-2u} |P_N|^2) - source.
FieldGrid residual_field(const FieldGrid& u, const ComplexPoly& pn, int rank,
                         const FieldGrid* source = nullptr);

double c0_norm_interior(const FieldGrid& f);
double l2_norm_interior(const FieldGrid& f);  // integral-normalized

/// Direct sparse solve of (lap - kappa) delta = rhs with Dirichlet delta = 0.
FieldGrid linear_step_euler(const FieldGrid& kappa, const FieldGrid& rhs);

/// Sine-space solve of (lap - C) delta = rhs with Dirichlet delta = 0;
/// exact for the discrete five-point operator.
FieldGrid linear_step_fourier(double c_shift, const FieldGrid& rhs);

/// Direct solve of (lap - kappa) f = source with prescribed boundary ring
/// values (sparse SPD factorization). Returns f on the full grid.
FieldGrid solve_helmholtz_dirichlet(const FieldGrid& kappa, const FieldGrid& source,
                                    const FieldGrid& boundary);

/// Newton (euler) / constant-coefficient-preconditioned (fourier) solve of
/// lap u = 4(e^{ku} - e^{-2u} |P_N|^2) + source with u = u0 + v, v = 0 on the
/// boundary. Returns u on the full grid.
FieldGrid newton_solve_u(const ComplexPoly& pn, int rank, const Grid2D& grid,
                         const PdeOptions& opts, PdeReport* report = nullptr,
                         const FieldGrid* source = nullptr);

/// Continuous evaluators for u and its first partials (central differences,
/// one-sided at the boundary, each interpolated by a bicubic spline).
struct UEvaluator {
  Spline2D u, ux, uy;
  double r = 0.0;
};
UEvaluator interpolate_field(const FieldGrid& u);

/// Five-point Laplacian of an arbitrary field (interior nodes only).
FieldGrid laplacian_field(const FieldGrid& f);

}  // namespace stokes
