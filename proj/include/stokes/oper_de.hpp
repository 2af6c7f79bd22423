#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "stokes/dopri.hpp"
#include "stokes/theory.hpp"

namespace stokes {

/// Connection 1-form evaluator: writes the dz and dzbar components (row-major
/// rank x rank) at z. Opers have no dzbar part.
struct ConnectionMatrixField {
  int rank = 2;
  std::function<void(cplx z, cplx* a_z, cplx* a_zbar)> eval;
};

/// d + phi for the normalized tuple (spectral parameter already folded in).
ConnectionMatrixField oper_connection(const DifferentialTuple& normalized_w);

/// Transport matrix of s' = -(A_z zdot + A_zbar conj(zdot)) s along the
/// segment z(tau) = tau * radius * e^{i angle}, tau in [0,1], columnwise
/// adaptive Dormand-Prince 4(5).
Eigen::MatrixXcd parallel_transport(const ConnectionMatrixField& conn, double angle,
                                    double radius, const OdeParams& params);

struct Frame {
  Eigen::MatrixXcd transport;        // frame matrix F
  Eigen::VectorXcd subdominant;      // unit eigenvector, smallest |eigenvalue|
  std::vector<cplx> eigenvalues;     // sorted ascending by modulus
  Eigen::MatrixXcd eigenvectors;     // columns, same order
  Eigen::VectorXd componentwise_err; // first-order eigenvector error bound
};

struct FrameSet {
  int rank = 2;
  double radius = 0.0;
  std::vector<Frame> frames;  // one per sector label 1..d+N
};

/// Frames for each labeled sector direction. Eigenvector phases are fixed by
/// making the largest-modulus component real positive. Throws when the two
/// smallest eigenvalue moduli are relatively closer than 1e-10 (Stokes data
/// unresolvable at this radius).
FrameSet subdominant_vectors(const ConnectionMatrixField& conn,
                             const std::vector<double>& directions, double radius,
                             const OdeParams& params);

/// det(v_{i1}, ..., v_{iN}); indices 1-based and distinct.
cplx det_invariant_p(const FrameSet& frames, const std::vector<int>& indices);

/// det(v_a x v_b, v_c x v_d, v_e x v_f) for rank 3; throws when a cross
/// product vanishes (coincident subdominant lines).
cplx det_invariant_q(const FrameSet& frames, const std::vector<int>& indices);

struct CoordResult {
  std::vector<cplx> values;
  std::vector<bool> precision_warning;  // a determinant was near zero
};

/// Evaluate the catalog coordinate formulas on the frames.
CoordResult spectral_coords_DE(const FrameSet& frames, const Theory& theory,
                               SignConvention convention);

/// Relative error bound per coordinate from the ODE tolerance, propagated
/// through eigenvector first-order variation and the determinant ratios by
/// finite differences (step 1e-12); reported as twice the linearized bound.
std::vector<double> ode_error_estimate(const FrameSet& frames, const Theory& theory,
                                       double ode_thresh);

/// Full direct pipeline for opers: fold hbar into the tuple, normalize,
/// transport along the labeled sector bisectors, read off coordinates.
struct OperDEResult {
  FrameSet frames;
  DifferentialTuple normalized;
  AffineMap frame_map;
  std::vector<double> directions;
  CoordResult coords;                // paper-convention values
  std::vector<double> error_estimates;
};

OperDEResult compute_oper_coords(const Theory& theory, const DifferentialTuple& w,
                                 cplx hbar, const OdeParams& params);

}  // namespace stokes
