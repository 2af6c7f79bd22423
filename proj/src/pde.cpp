#include "stokes/pde.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <cmath>
#include <cstring>
#include <deque>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include "stokes/fft.hpp"

namespace stokes {

namespace {

constexpr double kPi = std::numbers::pi;

bool is_pow2_minus_1(int n) { return ((n + 1) & n) == 0 && n >= 3; }

double rhs_term(double u, double p2abs2, double k) {
  return 4.0 * (std::exp(k * u) - std::exp(-2.0 * u) * p2abs2);
}

double kappa_term(double u, double p2abs2, double k) {
  return 4.0 * (k * std::exp(k * u) + 2.0 * std::exp(-2.0 * u) * p2abs2);
}

std::vector<double> p2abs2_on_grid(const ComplexPoly& pn, const Grid2D& grid) {
  const int t = grid.total();
  std::vector<double> out(static_cast<size_t>(t) * t);
  for (int iy = 0; iy < t; ++iy)
    for (int ix = 0; ix < t; ++ix)
      out[static_cast<size_t>(iy) * t + ix] =
          std::norm(pn.eval(cplx(grid.coord(ix), grid.coord(iy))));
  return out;
}

}  // namespace

double sigma_bump(double abs_z, double r) {
  const double s = abs_z / (0.9 * r);
  if (s >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - s * s));
}

FieldGrid model_u0(const ComplexPoly& pn, const Grid2D& grid, int rank) {
  const double k = 2.0 / (rank - 1);
  FieldGrid u0(grid, FieldKind::U);
  const int t = grid.total();
  for (int iy = 0; iy < t; ++iy) {
    for (int ix = 0; ix < t; ++ix) {
      const cplx z(grid.coord(ix), grid.coord(iy));
      const double p2 = std::norm(pn.eval(z));
      const double sig = sigma_bump(std::abs(z), grid.r);
      const double damp = (p2 * p2 > 700.0) ? 0.0 : std::exp(-p2 * p2);
      u0.at(ix, iy) = std::log(p2 + sig * damp) / (k + 2.0);
    }
  }
  return u0;
}

FieldGrid laplacian_field(const FieldGrid& f) {
  const Grid2D& g = f.grid;
  FieldGrid out(g, FieldKind::Generic);
  const double inv_h2 = 1.0 / (g.spacing() * g.spacing());
  for (int iy = 1; iy <= g.nmesh; ++iy)
    for (int ix = 1; ix <= g.nmesh; ++ix)
      out.at(ix, iy) = (f.at(ix - 1, iy) + f.at(ix + 1, iy) + f.at(ix, iy - 1) +
                        f.at(ix, iy + 1) - 4.0 * f.at(ix, iy)) *
                       inv_h2;
  return out;
}

FieldGrid residual_field(const FieldGrid& u, const ComplexPoly& pn, int rank,
                         const FieldGrid* source) {
  const Grid2D& g = u.grid;
  const double k = 2.0 / (rank - 1);
  const auto p2 = p2abs2_on_grid(pn, g);
  FieldGrid rho = laplacian_field(u);
  rho.kind = FieldKind::Residual;
  const int t = g.total();
  for (int iy = 1; iy <= g.nmesh; ++iy)
    for (int ix = 1; ix <= g.nmesh; ++ix)
      rho.at(ix, iy) -= rhs_term(u.at(ix, iy), p2[static_cast<size_t>(iy) * t + ix], k);
  if (source)
    for (int iy = 1; iy <= g.nmesh; ++iy)
      for (int ix = 1; ix <= g.nmesh; ++ix) rho.at(ix, iy) -= source->at(ix, iy);
  return rho;
}

double c0_norm_interior(const FieldGrid& f) {
  double m = 0.0;
  for (int iy = 1; iy <= f.grid.nmesh; ++iy)
    for (int ix = 1; ix <= f.grid.nmesh; ++ix) m = std::max(m, std::abs(f.at(ix, iy)));
  return m;
}

double l2_norm_interior(const FieldGrid& f) {
  double acc = 0.0;
  for (int iy = 1; iy <= f.grid.nmesh; ++iy)
    for (int ix = 1; ix <= f.grid.nmesh; ++ix) acc += f.at(ix, iy) * f.at(ix, iy);
  return std::sqrt(acc) * f.grid.spacing();
}

FieldGrid linear_step_euler(const FieldGrid& kappa, const FieldGrid& rhs) {
  const Grid2D& g = kappa.grid;
  const int n = g.nmesh;
  const double inv_h2 = 1.0 / (g.spacing() * g.spacing());
  using Trip = Eigen::Triplet<double>;
  std::vector<Trip> trips;
  trips.reserve(static_cast<size_t>(n) * n * 5);
  auto idx = [n](int ix, int iy) { return (iy - 1) * n + (ix - 1); };
  Eigen::VectorXd b(static_cast<Eigen::Index>(n) * n);
  for (int iy = 1; iy <= n; ++iy) {
    for (int ix = 1; ix <= n; ++ix) {
      const int row = idx(ix, iy);
      // solve (-lap + kappa) delta = -rhs  (SPD form)
      trips.emplace_back(row, row, 4.0 * inv_h2 + kappa.at(ix, iy));
      if (ix > 1) trips.emplace_back(row, idx(ix - 1, iy), -inv_h2);
      if (ix < n) trips.emplace_back(row, idx(ix + 1, iy), -inv_h2);
      if (iy > 1) trips.emplace_back(row, idx(ix, iy - 1), -inv_h2);
      if (iy < n) trips.emplace_back(row, idx(ix, iy + 1), -inv_h2);
      b(row) = -rhs.at(ix, iy);
    }
  }
  Eigen::SparseMatrix<double> a(static_cast<Eigen::Index>(n) * n,
                                static_cast<Eigen::Index>(n) * n);
  a.setFromTriplets(trips.begin(), trips.end());
  trips.clear();
  trips.shrink_to_fit();
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(a);
  if (solver.info() != Eigen::Success) throw std::runtime_error("sparse factorization failed");
  const Eigen::VectorXd x = solver.solve(b);
  FieldGrid delta(g, FieldKind::Generic);
  for (int iy = 1; iy <= n; ++iy)
    for (int ix = 1; ix <= n; ++ix) delta.at(ix, iy) = x(idx(ix, iy));
  return delta;
}

FieldGrid solve_helmholtz_dirichlet(const FieldGrid& kappa, const FieldGrid& source,
                                    const FieldGrid& boundary) {
  const Grid2D& g = kappa.grid;
  const int n = g.nmesh;
  const double inv_h2 = 1.0 / (g.spacing() * g.spacing());
  using Trip = Eigen::Triplet<double>;
  std::vector<Trip> trips;
  trips.reserve(static_cast<size_t>(n) * n * 5);
  auto idx = [n](int ix, int iy) { return (iy - 1) * n + (ix - 1); };
  Eigen::VectorXd b(static_cast<Eigen::Index>(n) * n);
  for (int iy = 1; iy <= n; ++iy) {
    for (int ix = 1; ix <= n; ++ix) {
      const int row = idx(ix, iy);
      trips.emplace_back(row, row, 4.0 * inv_h2 + kappa.at(ix, iy));
      double rhs_val = -source.at(ix, iy);
      if (ix > 1)
        trips.emplace_back(row, idx(ix - 1, iy), -inv_h2);
      else
        rhs_val += inv_h2 * boundary.at(0, iy);
      if (ix < n)
        trips.emplace_back(row, idx(ix + 1, iy), -inv_h2);
      else
        rhs_val += inv_h2 * boundary.at(n + 1, iy);
      if (iy > 1)
        trips.emplace_back(row, idx(ix, iy - 1), -inv_h2);
      else
        rhs_val += inv_h2 * boundary.at(ix, 0);
      if (iy < n)
        trips.emplace_back(row, idx(ix, iy + 1), -inv_h2);
      else
        rhs_val += inv_h2 * boundary.at(ix, n + 1);
      b(row) = rhs_val;
    }
  }
  Eigen::SparseMatrix<double> a(static_cast<Eigen::Index>(n) * n,
                                static_cast<Eigen::Index>(n) * n);
  a.setFromTriplets(trips.begin(), trips.end());
  trips.clear();
  trips.shrink_to_fit();
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(a);
  if (solver.info() != Eigen::Success) throw std::runtime_error("sparse factorization failed");
  const Eigen::VectorXd x = solver.solve(b);
  FieldGrid f(g, FieldKind::F);
  for (int iy = 0; iy < g.total(); ++iy)
    for (int ix = 0; ix < g.total(); ++ix)
      f.at(ix, iy) = (ix == 0 || ix == n + 1 || iy == 0 || iy == n + 1)
                         ? boundary.at(ix, iy)
                         : x(idx(ix, iy));
  return f;
}

FieldGrid linear_step_fourier(double c_shift, const FieldGrid& rhs) {
  const Grid2D& g = rhs.grid;
  const int n = g.nmesh;
  std::vector<double> buf(static_cast<size_t>(n) * n);
  for (int iy = 1; iy <= n; ++iy)
    for (int ix = 1; ix <= n; ++ix)
      buf[static_cast<size_t>(iy - 1) * n + (ix - 1)] = rhs.at(ix, iy);
  dst2_inplace(buf, n, n);
  const double inv_h2 = 1.0 / (g.spacing() * g.spacing());
  std::vector<double> mu(n);
  for (int m = 0; m < n; ++m) {
    const double s = std::sin(kPi * (m + 1) / (2.0 * (n + 1)));
    mu[m] = -4.0 * inv_h2 * s * s;
  }
  for (int my = 0; my < n; ++my)
    for (int mx = 0; mx < n; ++mx)
      buf[static_cast<size_t>(my) * n + mx] /= (mu[mx] + mu[my] - c_shift);
  dst2_inplace(buf, n, n);
  const double norm = 1.0 / (4.0 * (n + 1.0) * (n + 1.0));
  FieldGrid delta(g, FieldKind::Generic);
  for (int iy = 1; iy <= n; ++iy)
    for (int ix = 1; ix <= n; ++ix)
      delta.at(ix, iy) = buf[static_cast<size_t>(iy - 1) * n + (ix - 1)] * norm;
  return delta;
}

namespace {

// Anderson mixing over the fixed-point map v -> v + delta(v).
class AndersonMixer {
public:
  explicit AndersonMixer(int depth) : depth_(depth) {}

  // v and step are interior-sized flat arrays; returns the next v
  Eigen::VectorXd next(const Eigen::VectorXd& v, const Eigen::VectorXd& step) {
    const Eigen::VectorXd g = v + step;  // fixed-point image
    if (depth_ <= 0) return g;
    vs_.push_back(v);
    gs_.push_back(g);
    if (static_cast<int>(vs_.size()) > depth_ + 1) {
      vs_.pop_front();
      gs_.pop_front();
    }
    const int m = static_cast<int>(vs_.size()) - 1;
    if (m == 0) return g;
    // minimize || f_k + sum_j alpha_j (f_{k-j} - f_k) || over the history
    Eigen::MatrixXd df(v.size(), m);
    const Eigen::VectorXd fk = gs_.back() - vs_.back();
    for (int j = 0; j < m; ++j) df.col(j) = (gs_[j] - vs_[j]) - fk;
    const Eigen::MatrixXd ata = df.transpose() * df;
    const Eigen::VectorXd atb = -df.transpose() * fk;
    Eigen::VectorXd alpha =
        (ata + 1e-12 * ata.norm() * Eigen::MatrixXd::Identity(m, m)).ldlt().solve(atb);
    Eigen::VectorXd out = gs_.back();
    for (int j = 0; j < m; ++j) out += alpha(j) * (gs_[j] - gs_.back());
    return out;
  }

  void reset() {
    vs_.clear();
    gs_.clear();
  }

private:
  int depth_;
  std::deque<Eigen::VectorXd> vs_, gs_;
};

}  // namespace

FieldGrid newton_solve_u(const ComplexPoly& pn, int rank, const Grid2D& grid,
                         const PdeOptions& opts, PdeReport* report,
                         const FieldGrid* source) {
  if (rank != 2 && rank != 3) throw std::invalid_argument("rank must be 2 or 3");
  if (opts.method == PdeMethod::Fourier && !is_pow2_minus_1(grid.nmesh))
    throw std::invalid_argument("fourier backend needs nmesh = 2^j - 1");
  if (opts.method == PdeMethod::Euler && grid.nmesh > opts.euler_cap)
    throw std::invalid_argument("grid too large for the direct sparse backend");
  if (opts.method == PdeMethod::Fourier && grid.nmesh > opts.fourier_cap)
    throw std::invalid_argument("grid too large for the sine-transform backend");

  const double k = 2.0 / (rank - 1);
  const int n = grid.nmesh;
  const int t = grid.total();
  const auto p2 = p2abs2_on_grid(pn, grid);

  FieldGrid u = opts.use_model ? model_u0(pn, grid, rank) : FieldGrid(grid, FieldKind::U);

  // inlined residual with the precomputed |P_N|^2 grid (hot path)
  const double inv_h2 = 1.0 / (grid.spacing() * grid.spacing());
  auto residual = [&](const FieldGrid& field) {
    FieldGrid rho_out(grid, FieldKind::Residual);
    for (int iy = 1; iy <= n; ++iy) {
      for (int ix = 1; ix <= n; ++ix) {
        const double uc = field.at(ix, iy);
        double v = (field.at(ix - 1, iy) + field.at(ix + 1, iy) + field.at(ix, iy - 1) +
                    field.at(ix, iy + 1) - 4.0 * uc) *
                   inv_h2;
        v -= rhs_term(uc, p2[static_cast<size_t>(iy) * t + ix], k);
        if (source) v -= source->at(ix, iy);
        rho_out.at(ix, iy) = v;
      }
    }
    return rho_out;
  };
  auto norm_of = [&](const FieldGrid& rho) {
    return opts.method == PdeMethod::Euler ? c0_norm_interior(rho) : l2_norm_interior(rho);
  };

  FieldGrid rho = residual(u);
  double res_norm = norm_of(rho);
  int iterations = 0;
  int growth_strikes = 0;

  const bool euler = opts.method == PdeMethod::Euler;
  AndersonMixer mixer(euler ? 0 : opts.anderson_depth);
  const Eigen::Index interior = static_cast<Eigen::Index>(n) * n;

  auto flatten = [&](const FieldGrid& f) {
    Eigen::VectorXd v(interior);
    for (int iy = 1; iy <= n; ++iy)
      for (int ix = 1; ix <= n; ++ix) v((iy - 1) * n + (ix - 1)) = f.at(ix, iy);
    return v;
  };
  auto unflatten_into = [&](const Eigen::VectorXd& v, FieldGrid& f) {
    for (int iy = 1; iy <= n; ++iy)
      for (int ix = 1; ix <= n; ++ix) f.at(ix, iy) = v((iy - 1) * n + (ix - 1));
  };

  while (res_norm >= opts.pde_thresh) {
    if (++iterations > opts.max_outer)
      throw std::runtime_error("self-duality solve exceeded the iteration budget");

    FieldGrid kap(grid, FieldKind::Generic);
    double kmin = 1e300, kmax = -1e300;
    for (int iy = 1; iy <= n; ++iy) {
      for (int ix = 1; ix <= n; ++ix) {
        const double kv =
            kappa_term(u.at(ix, iy), p2[static_cast<size_t>(iy) * t + ix], k);
        kap.at(ix, iy) = kv;
        kmin = std::min(kmin, kv);
        kmax = std::max(kmax, kv);
      }
    }

    FieldGrid delta;
    if (euler) {
      delta = linear_step_euler(kap, rho);
    } else {
      const double c_shift = (opts.fourier_shift == FourierShift::HalfRange)
                                 ? 0.5 * (kmax - kmin)
                                 : 0.5 * (kmax + kmin);
      delta = linear_step_fourier(c_shift, rho);
    }

    if (euler) {
      // full Newton step with halving line search on residual growth
      double alpha = 1.0;
      FieldGrid trial = u;
      double trial_norm = 0.0;
      for (int ls = 0; ls < 9; ++ls) {
        for (int iy = 1; iy <= n; ++iy)
          for (int ix = 1; ix <= n; ++ix)
            trial.at(ix, iy) = u.at(ix, iy) + alpha * delta.at(ix, iy);
        FieldGrid trial_rho = residual(trial);
        trial_norm = norm_of(trial_rho);
        if (trial_norm < res_norm || ls == 8) {
          u = trial;
          rho = std::move(trial_rho);
          break;
        }
        alpha *= 0.5;
      }
      growth_strikes = (trial_norm >= res_norm) ? growth_strikes + 1 : 0;
      res_norm = trial_norm;
    } else {
      const Eigen::VectorXd mixed = mixer.next(flatten(u), flatten(delta));
      FieldGrid trial = u;
      unflatten_into(mixed, trial);
      FieldGrid trial_rho = residual(trial);
      double trial_norm = norm_of(trial_rho);
      if (trial_norm > 4.0 * res_norm && opts.anderson_depth > 0) {
        // reject the extrapolation, fall back to the plain step
        mixer.reset();
        trial = u;
        for (int iy = 1; iy <= n; ++iy)
          for (int ix = 1; ix <= n; ++ix)
            trial.at(ix, iy) = u.at(ix, iy) + delta.at(ix, iy);
        trial_rho = residual(trial);
        trial_norm = norm_of(trial_rho);
      }
      growth_strikes = (trial_norm >= res_norm) ? growth_strikes + 1 : 0;
      u = std::move(trial);
      rho = std::move(trial_rho);
      res_norm = trial_norm;
    }

    if (!std::isfinite(res_norm)) throw std::runtime_error("self-duality solve diverged");
    if (growth_strikes >= 10)
      throw std::runtime_error("self-duality residual grew for 10 consecutive steps");
  }

  if (report) {
    report->iterations = iterations;
    report->final_residual = res_norm;
  }
  return u;
}

UEvaluator interpolate_field(const FieldGrid& u) {
  const Grid2D& g = u.grid;
  const int t = g.total();
  const double h = g.spacing();
  FieldGrid ux(g, FieldKind::Ux), uy(g, FieldKind::Uy);
  for (int iy = 0; iy < t; ++iy) {
    for (int ix = 0; ix < t; ++ix) {
      if (ix == 0)
        ux.at(ix, iy) = (-3.0 * u.at(0, iy) + 4.0 * u.at(1, iy) - u.at(2, iy)) / (2.0 * h);
      else if (ix == t - 1)
        ux.at(ix, iy) =
            (3.0 * u.at(t - 1, iy) - 4.0 * u.at(t - 2, iy) + u.at(t - 3, iy)) / (2.0 * h);
      else
        ux.at(ix, iy) = (u.at(ix + 1, iy) - u.at(ix - 1, iy)) / (2.0 * h);
      if (iy == 0)
        uy.at(ix, iy) = (-3.0 * u.at(ix, 0) + 4.0 * u.at(ix, 1) - u.at(ix, 2)) / (2.0 * h);
      else if (iy == t - 1)
        uy.at(ix, iy) =
            (3.0 * u.at(ix, t - 1) - 4.0 * u.at(ix, t - 2) + u.at(ix, t - 3)) / (2.0 * h);
      else
        uy.at(ix, iy) = (u.at(ix, iy + 1) - u.at(ix, iy - 1)) / (2.0 * h);
    }
  }
  UEvaluator ev{Spline2D(u.values, t, t, -g.r, -g.r, h),
                Spline2D(ux.values, t, t, -g.r, -g.r, h),
                Spline2D(uy.values, t, t, -g.r, -g.r, h), g.r};
  return ev;
}

namespace {
constexpr char kFieldMagic[8] = {'F', 'L', 'D', 'G', 'R', 'D', '0', '1'};
}

void FieldGrid::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  out.write(kFieldMagic, 8);
  const int kind_tag = static_cast<int>(kind);
  out.write(reinterpret_cast<const char*>(&kind_tag), sizeof kind_tag);
  out.write(reinterpret_cast<const char*>(&grid.nmesh), sizeof grid.nmesh);
  out.write(reinterpret_cast<const char*>(&grid.r), sizeof grid.r);
  out.write(reinterpret_cast<const char*>(values.data()), values.size() * sizeof(double));
}

FieldGrid FieldGrid::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  char magic[8];
  in.read(magic, 8);
  if (std::memcmp(magic, kFieldMagic, 8) != 0)
    throw std::runtime_error("bad field snapshot header");
  int kind_tag = 0;
  Grid2D g;
  in.read(reinterpret_cast<char*>(&kind_tag), sizeof kind_tag);
  in.read(reinterpret_cast<char*>(&g.nmesh), sizeof g.nmesh);
  in.read(reinterpret_cast<char*>(&g.r), sizeof g.r);
  FieldGrid f(g, static_cast<FieldKind>(kind_tag));
  in.read(reinterpret_cast<char*>(f.values.data()), f.values.size() * sizeof(double));
  if (!in) throw std::runtime_error("truncated field snapshot");
  return f;
}

}  // namespace stokes
