#include "stokes/oper_de.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace stokes {

namespace {

constexpr double kPi = std::numbers::pi;

void check_indices(const std::vector<int>& idx, int nframes, bool distinct) {
  for (int i : idx)
    if (i < 1 || i > nframes) throw std::out_of_range("sector index out of range");
  if (distinct) {
    auto sorted = idx;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw std::invalid_argument("sector indices must be distinct");
  }
}

Eigen::Vector3cd cross3(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
  Eigen::Vector3cd out;
  out(0) = a(1) * b(2) - a(2) * b(1);
  out(1) = a(2) * b(0) - a(0) * b(2);
  out(2) = a(0) * b(1) - a(1) * b(0);
  return out;
}

cplx eval_det_term(const FrameSet& frames, const DetTerm& term) {
  if (term.kind == DetTerm::P) return det_invariant_p(frames, term.sectors);
  return det_invariant_q(frames, term.sectors);
}

// gather the distinct sector labels a formula touches
std::vector<int> formula_sectors(const CoordinateFormula& f) {
  std::vector<int> out;
  auto add = [&](const std::vector<DetTerm>& terms) {
    for (const auto& t : terms)
      for (int s : t.sectors)
        if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
  };
  add(f.numerator);
  add(f.denominator);
  return out;
}

}  // namespace

ConnectionMatrixField oper_connection(const DifferentialTuple& normalized_w) {
  ConnectionMatrixField conn;
  conn.rank = normalized_w.rank;
  const ComplexPoly top = normalized_w.top();
  const ComplexPoly p2 = normalized_w.p2_or_zero();
  if (normalized_w.rank == 2) {
    conn.eval = [top](cplx z, cplx* a_z, cplx* a_zbar) {
      const cplx p = top.eval(z);
      a_z[0] = 0.0;
      a_z[1] = -p;
      a_z[2] = 1.0;
      a_z[3] = 0.0;
      for (int i = 0; i < 4; ++i) a_zbar[i] = 0.0;
    };
  } else {
    conn.eval = [top, p2](cplx z, cplx* a_z, cplx* a_zbar) {
      const cplx p3 = top.eval(z);
      const cplx half_p2 = 0.5 * p2.eval(z);
      a_z[0] = 0.0;
      a_z[1] = -half_p2;
      a_z[2] = -p3;
      a_z[3] = 1.0;
      a_z[4] = 0.0;
      a_z[5] = -half_p2;
      a_z[6] = 0.0;
      a_z[7] = 1.0;
      a_z[8] = 0.0;
      for (int i = 0; i < 9; ++i) a_zbar[i] = 0.0;
    };
  }
  return conn;
}

Eigen::MatrixXcd parallel_transport(const ConnectionMatrixField& conn, double angle,
                                    double radius, const OdeParams& params) {
  if (radius <= 0.0) throw std::invalid_argument("radius must be positive");
  const int n = conn.rank;
  const cplx zdot = std::polar(radius, angle);

  std::vector<cplx> az(n * n), azb(n * n);
  auto rhs = [&](double tau, const std::vector<cplx>& y, std::vector<cplx>& dy) {
    conn.eval(tau * zdot, az.data(), azb.data());
    // dT = -(A_z zdot + A_zbar conj(zdot)) T, row-major state
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        cplx acc(0);
        for (int k = 0; k < n; ++k) {
          const cplx coeff = az[i * n + k] * zdot + azb[i * n + k] * std::conj(zdot);
          acc -= coeff * y[k * n + j];
        }
        dy[i * n + j] = acc;
      }
    }
  };

  std::vector<cplx> y(n * n, cplx(0));
  for (int i = 0; i < n; ++i) y[i * n + i] = 1.0;
  y = integrate_dopri(rhs, std::move(y), params);

  Eigen::MatrixXcd out(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out(i, j) = y[i * n + j];
  return out;
}

FrameSet subdominant_vectors(const ConnectionMatrixField& conn,
                             const std::vector<double>& directions, double radius,
                             const OdeParams& params) {
  FrameSet fs;
  fs.rank = conn.rank;
  fs.radius = radius;
  const int n = conn.rank;
  for (double dir : directions) {
    Frame fr;
    fr.transport = parallel_transport(conn, dir, radius, params);
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(fr.transport, true);
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      return std::abs(es.eigenvalues()(a)) < std::abs(es.eigenvalues()(b));
    });
    for (int i : order) fr.eigenvalues.push_back(es.eigenvalues()(i));
    fr.eigenvectors.resize(n, n);
    for (int i = 0; i < n; ++i) fr.eigenvectors.col(i) = es.eigenvectors().col(order[i]);

    const double lam0 = std::abs(fr.eigenvalues[0]);
    const double lam1 = std::abs(fr.eigenvalues[1]);
    if (lam1 - lam0 < 1e-10 * lam1)
      throw std::domain_error("subdominant eigenvalue tie; Stokes data unresolved");

    Eigen::VectorXcd v = fr.eigenvectors.col(0);
    v /= v.norm();
    int imax = 0;
    for (int i = 1; i < n; ++i)
      if (std::abs(v(i)) > std::abs(v(imax))) imax = i;
    v *= std::abs(v(imax)) / v(imax);  // largest component real positive
    fr.subdominant = v;
    fr.eigenvectors.col(0) = v;

    // first-order eigenvector variation bound, componentwise
    const Eigen::MatrixXcd dual = fr.eigenvectors.inverse();
    const Eigen::MatrixXd abs_f = fr.transport.cwiseAbs();
    const Eigen::VectorXd abs_v0 = v.cwiseAbs();
    Eigen::VectorXd err = Eigen::VectorXd::Zero(n);
    for (int j = 1; j < n; ++j) {
      const Eigen::VectorXd dual_j = dual.row(j).cwiseAbs().transpose();
      const double scalar = dual_j.dot(abs_f * abs_v0);
      const double gap = std::abs(fr.eigenvalues[0] - fr.eigenvalues[j]);
      err += (scalar / gap) * fr.eigenvectors.col(j).cwiseAbs();
    }
    fr.componentwise_err = err;  // still to be scaled by ode_thresh
    fs.frames.push_back(std::move(fr));
  }
  return fs;
}

cplx det_invariant_p(const FrameSet& frames, const std::vector<int>& indices) {
  const int n = frames.rank;
  if (static_cast<int>(indices.size()) != n)
    throw std::invalid_argument("need exactly rank sector indices");
  check_indices(indices, static_cast<int>(frames.frames.size()), true);
  Eigen::MatrixXcd m(n, n);
  for (int c = 0; c < n; ++c) m.col(c) = frames.frames[indices[c] - 1].subdominant;
  return m.determinant();
}

cplx det_invariant_q(const FrameSet& frames, const std::vector<int>& indices) {
  if (frames.rank != 3) throw std::invalid_argument("hexapod determinant needs rank 3");
  if (indices.size() != 6) throw std::invalid_argument("hexapod determinant needs 6 indices");
  check_indices(indices, static_cast<int>(frames.frames.size()), false);
  Eigen::Matrix3cd m;
  for (int c = 0; c < 3; ++c) {
    const auto& a = frames.frames[indices[2 * c] - 1].subdominant;
    const auto& b = frames.frames[indices[2 * c + 1] - 1].subdominant;
    const Eigen::Vector3cd cr = cross3(a, b);
    if (cr.norm() < 1e-12)
      throw std::domain_error("vanishing cross product (coincident subdominant lines)");
    m.col(c) = cr;
  }
  return m.determinant();
}

CoordResult spectral_coords_DE(const FrameSet& frames, const Theory& theory,
                               SignConvention convention) {
  CoordResult result;
  for (int i = 0; i < static_cast<int>(theory.coord_formulas.size()); ++i) {
    const auto& f = theory.coord_formulas[i];
    cplx num(double(f.sign));
    cplx den(1.0);
    bool warn = false;
    for (const auto& t : f.numerator) {
      const cplx d = eval_det_term(frames, t);
      if (std::abs(d) < 1e-10) warn = true;
      num *= d;
    }
    for (const auto& t : f.denominator) {
      const cplx d = eval_det_term(frames, t);
      if (std::abs(d) < 1e-10) warn = true;
      den *= d;
    }
    cplx x = num / den;
    if (convention == SignConvention::Code) {
      ChargeVector basis(theory.lattice_rank, 0);
      basis[i] = 1;
      x *= code_sign(theory, basis);
    }
    result.values.push_back(x);
    result.precision_warning.push_back(warn);
  }
  return result;
}

std::vector<double> ode_error_estimate(const FrameSet& frames, const Theory& theory,
                                       double ode_thresh) {
  constexpr double kFdStep = 1e-12;
  std::vector<double> out;
  for (const auto& f : theory.coord_formulas) {
    double rel = 0.0;
    auto add_terms = [&](const std::vector<DetTerm>& terms) {
      for (const auto& t : terms) {
        const cplx base = eval_det_term(frames, t);
        // perturb each component of each participating vector
        double delta = 0.0;
        std::vector<int> secs = t.sectors;
        std::sort(secs.begin(), secs.end());
        secs.erase(std::unique(secs.begin(), secs.end()), secs.end());
        FrameSet work = frames;
        for (int s : secs) {
          auto& vec = work.frames[s - 1].subdominant;
          for (int comp = 0; comp < frames.rank; ++comp) {
            const cplx saved = vec(comp);
            vec(comp) = saved + kFdStep;
            const cplx pert = eval_det_term(work, t);
            vec(comp) = saved;
            const double partial = std::abs(pert - base) / kFdStep;
            delta += partial * ode_thresh * frames.frames[s - 1].componentwise_err(comp);
          }
        }
        rel += delta / std::max(std::abs(base), 1e-300);
      }
    };
    add_terms(f.numerator);
    add_terms(f.denominator);
    out.push_back(2.0 * rel);
  }
  return out;
}

OperDEResult compute_oper_coords(const Theory& theory, const DifferentialTuple& w,
                                 cplx hbar, const OdeParams& params) {
  if (hbar == cplx(0)) throw std::invalid_argument("zero spectral parameter");
  OperDEResult res;
  const DifferentialTuple scaled = scale_differentials(w, 1.0 / hbar);
  auto [norm, fmap] = normalize_quasi_monic_centered(scaled);
  res.normalized = norm;
  res.frame_map = fmap;
  const auto dirs = stokes_ray_directions(norm, cplx(1.0));
  res.directions = labeled_sector_directions(theory, dirs, std::arg(hbar));
  const double radius = choose_radius_oper(norm);
  const auto conn = oper_connection(norm);
  res.frames = subdominant_vectors(conn, res.directions, radius, params);
  res.coords = spectral_coords_DE(res.frames, theory, SignConvention::Paper);
  res.error_estimates = ode_error_estimate(res.frames, theory, params.thresh);
  return res;
}

}  // namespace stokes
