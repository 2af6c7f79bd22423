#pragma once

#include <string>
#include <vector>

#include "stokes/periods.hpp"
#include "stokes/theory.hpp"

namespace stokes {

enum class IeqMode { Oper, Hitchin };
enum class ConvolutionMethod { Fourier, Simps };

/// Uniform sample grid for the ray functions: t_k = -L + 2L k / steps,
/// k = 0..steps-1 (periodic convention, shared by both convolution paths).
struct RayGrid {
  double L = 200.0;
  int steps = 1 << 17;

  double spacing() const { return 2.0 * L / steps; }
  double t(int k) const { return -L + spacing() * k; }
};

struct IeqParams {
  RayGrid grid;
  double tolerance = 2e-15;
  double damping = 0.3;
  ConvolutionMethod method = ConvolutionMethod::Fourier;
  int max_iter = 1000;
};

/// Sampled log-coordinates x_gamma on the rays through -Z_gamma, one per
/// stored charge (one representative of each +-pair; the opposite charge has
/// the same samples).
///
/// Ray parameterization (fixed conventions):
///   oper:    t = log|hbar^-1|, hbar(t) = -exp(i arg Z_gamma - t),
///            driving term  -|Z_gamma| e^t
///   hitchin: t = log|zeta|,   zeta(t) = -exp(i arg Z_gamma + t),
///            driving term  -2 R |Z_gamma| cosh t
///
/// The arrays store the instanton part x - driving; accessors add the driving
/// back. On each ray the coupled equations read
///   x_gamma(t) = driving(t)
///     + sum_mu Omega(mu) <gamma,mu>/(2 pi i) * int dt' L_mu(t') * k(t - t')
/// with L_mu = log(1 + exp x_mu), the sum over stored representatives mu, and
///   k(tau) =  1/sinh(tau + i theta)   (hitchin)
///   k(tau) = -1/sinh(tau - i theta)   (oper),
/// where theta = arg Z_gamma + pi - arg Z_mu. This is the +-pair-collapsed
/// form of the defining integral equations.
struct RaySolution {
  IeqMode mode = IeqMode::Oper;
  std::string theory_name;
  double R = 1.0;  // hitchin only
  RayGrid grid;
  PeriodVector periods;
  std::vector<ChargeVector> charges;            // stored representatives
  std::vector<std::vector<cplx>> inst;          // instanton part per charge
  int iterations_used = 0;
  bool converged = false;
  std::vector<double> last_deltas;

  cplx ray_period(int charge_idx) const;
  double driving(int charge_idx, double t) const;
  cplx x_at_sample(int charge_idx, int k) const;

  void save(const std::string& path) const;
  static RaySolution load(const std::string& path);
};

/// x^(0): driving term alone (exact for decoupled charges).
RaySolution initial_guess(const Theory& theory, const PeriodVector& periods, IeqMode mode,
                          double R, const RayGrid& grid);

/// One application of the integral-equation map F (no damping).
/// Throws on a BPS-ful ray collision (coupled pair with theta = 0 mod pi).
RaySolution apply_F(const Theory& theory, const RaySolution& sol,
                    ConvolutionMethod method = ConvolutionMethod::Fourier);

/// Damped fixed-point iteration x <- (1-p) F(x) + p x from the initial guess
/// until the sup-norm change is below tolerance for 5 consecutive iterations.
/// On max_iter exhaustion returns the best iterate with converged = false.
RaySolution solve_fixed_point(const Theory& theory, const PeriodVector& periods,
                              IeqMode mode, double R, const IeqParams& params);

/// x_charge at an arbitrary spectral parameter via one Simpson evaluation of
/// the defining equation on the converged ray data. Works for any integer
/// charge (the equation is additive in the charge). Throws if the parameter
/// lies on a coupled ray.
cplx evaluate_at(const Theory& theory, const RaySolution& sol, const ChargeVector& charge,
                 cplx spectral_param);

/// Instanton part only (x minus the driving term).
cplx evaluate_inst_at(const Theory& theory, const RaySolution& sol,
                      const ChargeVector& charge, cplx spectral_param);

/// X_i = sigma * exp(x_i) for the basis charges at hbar = 1 / zeta = 1.
/// Code convention flips the sign for charges in +-Gamma'.
std::vector<cplx> cluster_at_unit(const Theory& theory, const RaySolution& sol,
                                  SignConvention convention);

/// Leading approximation: exp(hbar^-1 Z) for opers,
/// exp(R zeta^-1 Z + R zeta conj(Z)) for the Hitchin section.
cplx asymptotic_approx(const ChargeVector& charge, const PeriodVector& periods,
                       const Theory& theory, IeqMode mode, cplx spectral_param, double R);

/// log(1 + exp(x)), stable for very negative real parts.
cplx log1p_exp(cplx x);

}  // namespace stokes
