#pragma once

#include <array>
#include <map>
#include <vector>

#include "stokes/complex_poly.hpp"
#include "stokes/theory.hpp"

namespace stokes {

/// Periods of the basis charges at given family parameters.
struct PeriodVector {
  std::vector<cplx> values;
  std::map<FamilyParam, cplx> params;
};

/// Closed-form / stored values at the catalog basepoint.
PeriodVector base_periods(const Theory& theory);

/// Period of an integer combination of basis charges.
cplx period_of(const ChargeVector& charge, const PeriodVector& pv);

/// 2 * integral of sqrt(-P2) over the straight segment [z_a, z_b] between two
/// simple roots, branch continuous from `branch_sign` * principal value at the
/// midpoint. Throws if sqrt(-P2) vanishes on the open segment or an endpoint
/// is not a simple root.
cplx numeric_period_n2(const ComplexPoly& p2, cplx z_a, cplx z_b, int branch_sign);

/// Closed contour in the plane built from arcs and straight segments.
/// Pieces are smooth; corners may occur only at piece boundaries.
class Contour {
public:
  static Contour figure_eight(cplx za, cplx zb, double rho);
  static Contour circle(cplx center, double radius, bool ccw);

  int piece_count() const { return static_cast<int>(pieces_.size()); }
  cplx piece_at(int piece, double s) const;     // s in [0, 1]
  cplx piece_deriv(int piece, double s) const;  // d/ds

private:
  struct Piece {
    bool arc = false;
    cplx a, b;        // segment endpoints
    cplx center;      // arc data
    double radius = 0.0, phi0 = 0.0, phi1 = 0.0;
  };
  std::vector<Piece> pieces_;
};

/// Periods of the three closed lifts of `contour` on the trigonal curve
/// y^3 + y P2 + P3 = 0, integrating y dz with continuous sheet tracking.
/// Entry k starts from the k-th root at the contour start (sorted by value).
/// Throws if sheets collide on the contour.
std::array<cplx, 3> lift_periods_n3(const ComplexPoly& p2, const ComplexPoly& p3,
                                    const Contour& contour);

/// Integral of the appropriate lift over the stored contour for one basis
/// charge, selected as the lift closest to `expected`.
cplx numeric_period_n3(const ComplexPoly& p2, const ComplexPoly& p3,
                       const Contour& contour, cplx expected);

/// Basis periods at the given family parameters. Uses closed forms where the
/// family admits them (A1A2 at Lambda=0 scales as c^(5/6)) and tracked
/// quadrature otherwise, continued from the basepoint.
PeriodVector periods_at(const Theory& theory, const std::map<FamilyParam, cplx>& params);

}  // namespace stokes
