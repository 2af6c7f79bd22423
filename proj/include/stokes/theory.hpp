#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "stokes/complex_poly.hpp"

namespace stokes {

/// Integer homology class in the fixed basis {gamma_i}.
using ChargeVector = std::vector<int>;

/// Output sign convention for spectral coordinates: the code convention flips
/// the sign of X_gamma for gamma in +-Gamma'.
enum class SignConvention { Paper, Code };

/// Tuple of polynomial k-differentials (phi_k = P_k dz^k, k = 2..N).
struct DifferentialTuple {
  int rank = 2;                     // N, 2 or 3
  std::map<int, ComplexPoly> phi;   // k -> P_k

  const ComplexPoly& top() const { return phi.at(rank); }
  ComplexPoly p2_or_zero() const {
    auto it = phi.find(2);
    return it == phi.end() ? ComplexPoly::zero() : it->second;
  }
};

/// Affine coordinate change f(z) = a*z + b with a real positive.
struct AffineMap {
  double a = 1.0;
  cplx b = 0.0;
  cplx apply(cplx z) const { return a * z + b; }
};

/// One determinant factor: det of subdominant vectors at the listed sectors
/// (N indices), or the triple-cross-product determinant for 6 indices (N=3).
struct DetTerm {
  enum Kind { P, Q } kind = P;
  std::vector<int> sectors;  // 1-based sector indices
};

/// Spectral coordinate as a signed ratio of determinant products.
struct CoordinateFormula {
  std::vector<DetTerm> numerator;
  std::vector<DetTerm> denominator;
  int sign = +1;
};

struct ChargeWithCount {
  ChargeVector charge;
  int bps_count = 1;  // Omega; same for -charge
};

enum class FamilyParam { Lambda, C };

/// Immutable catalog entry: rank/degree, polynomial family, charge lattice,
/// base-point periods, and the spectral-coordinate formulas.
struct Theory {
  std::string name;              // A1A2, A1A3, A2A1, A2A2
  int rank = 2;                  // N
  int degree = 2;                // d = deg(P_N)
  int lattice_rank = 2;
  std::vector<std::vector<int>> intersection;   // antisymmetric, lattice_rank^2
  std::vector<ChargeWithCount> gamma_prime;     // one representative per +-pair
  std::vector<cplx> base_periods;               // Z_{gamma_i} at the basepoint
  double theta0 = 0.0;                          // reference BPS-free angle
  std::vector<FamilyParam> family_params;
  std::vector<CoordinateFormula> coord_formulas;

  // Sector-labeling anchor: bisector direction of sector 1 at theta = theta0
  // for the normalized connection (see stokes_ray_directions).
  double sector1_direction = 0.0;

  int sector_count() const { return degree + rank; }
  int pairing(const ChargeVector& a, const ChargeVector& b) const;
  bool is_pure_flavor(const ChargeVector& c) const;
};

/// The four hardcoded theories. Throws std::invalid_argument for other names.
const Theory& get_theory(const std::string& name);
std::vector<std::string> theory_names();

/// Fill in the polynomial family at the given parameter values.
/// Validates the degree conditions deg(P_N) = d, deg(P_k) < (k/N) d.
DifferentialTuple build_differentials(const Theory& theory,
                                      const std::map<FamilyParam, cplx>& params);

/// (t^2 P_2 dz^2, t^3 P_3 dz^3). Throws on t = 0.
DifferentialTuple scale_differentials(const DifferentialTuple& w, cplx t);

/// Affine pullback f(z) = a z + b, a > 0 real, such that the pulled-back top
/// polynomial has unit-modulus leading coefficient and vanishing z^{d-1} term.
/// Returns the normalized tuple together with f.
std::pair<DifferentialTuple, AffineMap> normalize_quasi_monic_centered(
    const DifferentialTuple& w);

/// Bisector angles of the d+N sectors at infinity for the connection scaled
/// by the given spectral parameter, sorted ascending in [0, 2pi).
std::vector<double> stokes_ray_directions(const DifferentialTuple& w, cplx spectral_param);

/// ODE integration radius for opers: max(8, 8 r0), r0 the largest root
/// modulus over the nonzero P_k.
double choose_radius_oper(const DifferentialTuple& w);

/// Grid half-width heuristic for the self-duality solve:
/// clamp(4 r0 + 4, 6, rmax_cap).
double choose_radius_hitchin(const DifferentialTuple& w, double rmax_cap = 12.0);

/// -1 for charges lying in +-Gamma' (code output convention), +1 otherwise.
double code_sign(const Theory& theory, const ChargeVector& charge);

/// Sector labels i = 1..d+N -> bisector angles, honoring the catalog anchor:
/// label 1 is the bisector closest to sector1_direction + (theta - theta0) * N/(d+N),
/// labels increase counterclockwise. `dirs` are the sorted bisectors and
/// `theta_phase` is arg of the physical spectral parameter (which may already
/// be folded into the tuple that produced `dirs`).
std::vector<double> labeled_sector_directions(const Theory& theory,
                                              const std::vector<double>& dirs,
                                              double theta_phase);

}  // namespace stokes
