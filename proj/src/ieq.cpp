#include "stokes/ieq.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <numbers>
#include <stdexcept>

#include "stokes/fft.hpp"

namespace stokes {

namespace {

constexpr double kPi = std::numbers::pi;

struct Coupling {
  int target;      // stored index of gamma
  int source;      // stored index of mu
  cplx coeff;      // Omega(mu) <gamma,mu> / (2 pi i)
  double theta;    // arg Z_gamma + pi - arg Z_mu
};

// kernel k(tau) per the header; zero once sinh overflows
cplx kernel_value(double tau, double theta, IeqMode mode) {
  if (std::abs(tau) > 700.0) return 0.0;
  if (mode == IeqMode::Hitchin) return 1.0 / std::sinh(cplx(tau, theta));
  return -1.0 / std::sinh(cplx(tau, -theta));
}

std::vector<Coupling> build_couplings(const Theory& theory, const RaySolution& sol) {
  std::vector<Coupling> out;
  const int n = static_cast<int>(sol.charges.size());
  for (int g = 0; g < n; ++g) {
    const double arg_g = std::arg(sol.ray_period(g));
    for (int m = 0; m < n; ++m) {
      const int pair = theory.pairing(sol.charges[g], sol.charges[m]);
      const int omega = theory.gamma_prime[m].bps_count;
      if (pair == 0 || omega == 0) continue;
      const double theta = arg_g + kPi - std::arg(sol.ray_period(m));
      const double mod_pi = std::abs(std::remainder(theta, kPi));
      if (mod_pi < 1e-9)
        throw std::domain_error("kernel singularity: coupled rays collide (BPS-ful angle)");
      out.push_back({g, m, double(omega * pair) / (2.0 * kPi * cplx(0.0, 1.0)), theta});
    }
  }
  return out;
}

std::vector<std::vector<cplx>> log_terms(const RaySolution& sol) {
  std::vector<std::vector<cplx>> ls(sol.charges.size());
  for (size_t c = 0; c < sol.charges.size(); ++c) {
    ls[c].resize(sol.grid.steps);
    for (int k = 0; k < sol.grid.steps; ++k)
      ls[c][k] = log1p_exp(sol.x_at_sample(static_cast<int>(c), k));
  }
  return ls;
}

// circular-convolution spectra of the kernels, deduped by angle; spacing folded in
class KernelSpectra {
public:
  KernelSpectra(const RayGrid& grid, IeqMode mode) : grid_(grid), mode_(mode) {}

  const std::vector<cplx>& get(double theta) {
    const long long key = llround(theta * 1e12);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    const int m = grid_.steps;
    std::vector<cplx> spec(m);
    for (int j = 0; j < m; ++j) {
      const double tau = (j <= m / 2) ? grid_.spacing() * j : grid_.spacing() * (j - m);
      spec[j] = kernel_value(tau, theta, mode_) * grid_.spacing();
    }
    fft_forward(spec);
    return cache_.emplace(key, std::move(spec)).first->second;
  }

private:
  RayGrid grid_;
  IeqMode mode_;
  std::map<long long, std::vector<cplx>> cache_;
};

// direct convolution with composite Simpson weights in t'
std::vector<cplx> simpson_convolution(const RayGrid& grid, IeqMode mode, double theta,
                                      const std::vector<cplx>& values) {
  const int m = grid.steps;
  std::vector<double> w(m, 1.0);
  // composite Simpson over the first m-2 sub-intervals (even count for
  // m = 2^j), trapezoid on the last; the integrand vanishes at both ends.
  w[0] = 1.0 / 3.0;
  for (int j = 1; j < m - 2; ++j) w[j] = (j % 2 == 1) ? 4.0 / 3.0 : 2.0 / 3.0;
  w[m - 2] = 1.0 / 3.0 + 0.5;
  w[m - 1] = 0.5;
  std::vector<cplx> out(m, cplx(0));
  for (int k = 0; k < m; ++k) {
    cplx acc(0);
    for (int j = 0; j < m; ++j) {
      const cplx v = values[j];
      if (v == cplx(0)) continue;
      acc += w[j] * v * kernel_value(grid.t(k) - grid.t(j), theta, mode);
    }
    out[k] = acc * grid.spacing();
  }
  return out;
}

struct FMachinery {
  std::vector<Coupling> couplings;
  KernelSpectra spectra;

  FMachinery(const Theory& theory, const RaySolution& sol)
      : couplings(build_couplings(theory, sol)), spectra(sol.grid, sol.mode) {}

  // returns the new instanton parts F(x) - driving
  std::vector<std::vector<cplx>> apply(const RaySolution& sol, ConvolutionMethod method) {
    const auto ls = log_terms(sol);
    const int m = sol.grid.steps;
    const int n = static_cast<int>(sol.charges.size());
    std::vector<std::vector<cplx>> out(n, std::vector<cplx>(m, cplx(0)));
    if (method == ConvolutionMethod::Fourier) {
      std::vector<std::vector<cplx>> lhat(n);
      for (int c = 0; c < n; ++c) {
        lhat[c] = ls[c];
        fft_forward(lhat[c]);
      }
      std::vector<std::vector<cplx>> acc(n);
      for (const auto& cp : couplings) {
        const auto& spec = spectra.get(cp.theta);
        auto& a = acc[cp.target];
        if (a.empty()) a.assign(m, cplx(0));
        const auto& lh = lhat[cp.source];
        for (int j = 0; j < m; ++j) a[j] += cp.coeff * spec[j] * lh[j];
      }
      for (int c = 0; c < n; ++c) {
        if (acc[c].empty()) continue;
        fft_inverse(acc[c]);
        out[c] = std::move(acc[c]);
      }
    } else {
      for (const auto& cp : couplings) {
        auto conv = simpson_convolution(sol.grid, sol.mode, cp.theta, ls[cp.source]);
        for (int j = 0; j < m; ++j) out[cp.target][j] += cp.coeff * conv[j];
      }
    }
    return out;
  }
};

}  // namespace

cplx log1p_exp(cplx x) {
  if (x.real() < -700.0) return 0.0;
  const cplx w = std::exp(x);
  if (std::abs(w) < 1e-4) {
    // series keeps relative accuracy where 1 + w rounds poorly
    return w * (1.0 + w * (-0.5 + w * (1.0 / 3.0 + w * -0.25)));
  }
  if (x.real() > 40.0) return x + std::log(1.0 + std::exp(-x));
  return std::log(1.0 + w);
}

cplx RaySolution::ray_period(int charge_idx) const {
  return period_of(charges[charge_idx], periods);
}

double RaySolution::driving(int charge_idx, double t) const {
  const double abs_z = std::abs(ray_period(charge_idx));
  if (mode == IeqMode::Oper) return -abs_z * std::exp(t);
  return -2.0 * R * abs_z * std::cosh(t);
}

cplx RaySolution::x_at_sample(int charge_idx, int k) const {
  return inst[charge_idx][k] + driving(charge_idx, grid.t(k));
}

RaySolution initial_guess(const Theory& theory, const PeriodVector& periods, IeqMode mode,
                          double R, const RayGrid& grid) {
  if (mode == IeqMode::Hitchin && R <= 0.0)
    throw std::invalid_argument("R must be positive in hitchin mode");
  RaySolution sol;
  sol.mode = mode;
  sol.theory_name = theory.name;
  sol.R = R;
  sol.grid = grid;
  sol.periods = periods;
  for (const auto& cw : theory.gamma_prime) sol.charges.push_back(cw.charge);
  sol.inst.assign(sol.charges.size(), std::vector<cplx>(grid.steps, cplx(0)));
  return sol;
}

RaySolution apply_F(const Theory& theory, const RaySolution& sol, ConvolutionMethod method) {
  FMachinery machinery(theory, sol);
  RaySolution out = sol;
  out.inst = machinery.apply(sol, method);
  return out;
}

RaySolution solve_fixed_point(const Theory& theory, const PeriodVector& periods,
                              IeqMode mode, double R, const IeqParams& params) {
  RaySolution sol = initial_guess(theory, periods, mode, R, params.grid);
  if (params.damping < 0.0 || params.damping >= 1.0)
    throw std::invalid_argument("damping must lie in [0, 1)");
  if (params.tolerance <= 0.0) throw std::invalid_argument("tolerance must be positive");

  FMachinery machinery(theory, sol);
  const double p = params.damping;
  int consecutive = 0;
  std::vector<double> deltas;
  for (int iter = 1; iter <= params.max_iter; ++iter) {
    auto next = machinery.apply(sol, params.method);
    double delta = 0.0;
    for (size_t c = 0; c < sol.inst.size(); ++c) {
      for (int k = 0; k < sol.grid.steps; ++k) {
        const cplx updated = (1.0 - p) * next[c][k] + p * sol.inst[c][k];
        delta = std::max(delta, std::abs(updated - sol.inst[c][k]));
        sol.inst[c][k] = updated;
      }
    }
    deltas.push_back(delta);
    sol.iterations_used = iter;
    consecutive = (delta < params.tolerance) ? consecutive + 1 : 0;
    if (consecutive >= 5) {
      sol.converged = true;
      break;
    }
  }
  const size_t keep = std::min<size_t>(5, deltas.size());
  sol.last_deltas.assign(deltas.end() - keep, deltas.end());
  return sol;
}

namespace {

cplx driving_term(const RaySolution& sol, const ChargeVector& charge, cplx sigma) {
  const cplx z = period_of(charge, sol.periods);
  if (sol.mode == IeqMode::Oper) return z / sigma;
  return sol.R * (z / sigma + sigma * std::conj(z));
}

}  // namespace

cplx evaluate_at(const Theory& theory, const RaySolution& sol, const ChargeVector& charge,
                 cplx spectral_param) {
  return driving_term(sol, charge, spectral_param) +
         evaluate_inst_at(theory, sol, charge, spectral_param);
}

cplx evaluate_inst_at(const Theory& theory, const RaySolution& sol,
                      const ChargeVector& charge, cplx spectral_param) {
  if (spectral_param == cplx(0)) throw std::invalid_argument("zero spectral parameter");
  const cplx sigma = spectral_param;
  const int m = sol.grid.steps;

  std::vector<double> w(m, 1.0);
  w[0] = 1.0 / 3.0;
  for (int j = 1; j < m - 2; ++j) w[j] = (j % 2 == 1) ? 4.0 / 3.0 : 2.0 / 3.0;
  w[m - 2] = 1.0 / 3.0 + 0.5;
  w[m - 1] = 0.5;

  cplx acc(0);
  for (size_t c = 0; c < sol.charges.size(); ++c) {
    const int pair = theory.pairing(charge, sol.charges[c]);
    const int omega = theory.gamma_prime[c].bps_count;
    if (pair == 0 || omega == 0) continue;
    const cplx z_mu = sol.ray_period(static_cast<int>(c));
    const double arg_mu = std::arg(z_mu);
    if (std::abs(std::remainder(std::arg(sigma) - arg_mu, kPi)) < 1e-9)
      throw std::domain_error("spectral parameter lies on a coupled ray");
    cplx term(0);
    for (int k = 0; k < m; ++k) {
      const cplx lv = log1p_exp(sol.x_at_sample(static_cast<int>(c), k));
      if (lv == cplx(0)) continue;
      const double s = (sol.mode == IeqMode::Oper) ? -sol.grid.t(k) : sol.grid.t(k);
      if (std::abs(s) > 690.0) continue;
      const cplx xi = -std::polar(std::exp(s), arg_mu);
      term += w[k] * lv * (4.0 * xi * sigma) / (xi * xi - sigma * sigma);
    }
    acc += double(omega * pair) / (4.0 * kPi * cplx(0.0, 1.0)) * term * sol.grid.spacing();
  }
  return acc;
}

std::vector<cplx> cluster_at_unit(const Theory& theory, const RaySolution& sol,
                                  SignConvention convention) {
  std::vector<cplx> out;
  for (int i = 0; i < theory.lattice_rank; ++i) {
    ChargeVector basis(theory.lattice_rank, 0);
    basis[i] = 1;
    const cplx x = evaluate_at(theory, sol, basis, cplx(1.0));
    const double sign = (convention == SignConvention::Code) ? code_sign(theory, basis) : 1.0;
    out.push_back(sign * std::exp(x));
  }
  return out;
}

cplx asymptotic_approx(const ChargeVector& charge, const PeriodVector& periods,
                       const Theory& theory, IeqMode mode, cplx spectral_param, double R) {
  if (spectral_param == cplx(0)) throw std::invalid_argument("zero spectral parameter");
  const cplx z = period_of(charge, periods);
  if (mode == IeqMode::Oper) return std::exp(z / spectral_param);
  return std::exp(R * (z / spectral_param + spectral_param * std::conj(z)));
}

namespace {
constexpr char kMagic[8] = {'R', 'A', 'Y', 'S', 'O', 'L', '0', '1'};
}

void RaySolution::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  out.write(kMagic, 8);
  const int mode_tag = (mode == IeqMode::Oper) ? 0 : 1;
  auto put_i = [&](int v) { out.write(reinterpret_cast<const char*>(&v), sizeof v); };
  auto put_d = [&](double v) { out.write(reinterpret_cast<const char*>(&v), sizeof v); };
  put_i(mode_tag);
  put_i(static_cast<int>(theory_name.size()));
  out.write(theory_name.data(), theory_name.size());
  put_d(R);
  put_d(grid.L);
  put_i(grid.steps);
  put_i(iterations_used);
  put_i(converged ? 1 : 0);
  put_i(static_cast<int>(periods.values.size()));
  for (const auto& z : periods.values) {
    put_d(z.real());
    put_d(z.imag());
  }
  put_i(static_cast<int>(charges.size()));
  for (const auto& ch : charges) {
    put_i(static_cast<int>(ch.size()));
    for (int v : ch) put_i(v);
  }
  for (const auto& row : inst)
    out.write(reinterpret_cast<const char*>(row.data()), row.size() * sizeof(cplx));
}

RaySolution RaySolution::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  char magic[8];
  in.read(magic, 8);
  if (std::memcmp(magic, kMagic, 8) != 0) throw std::runtime_error("bad snapshot header");
  auto get_i = [&]() {
    int v;
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    return v;
  };
  auto get_d = [&]() {
    double v;
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    return v;
  };
  RaySolution sol;
  sol.mode = get_i() == 0 ? IeqMode::Oper : IeqMode::Hitchin;
  const int name_len = get_i();
  sol.theory_name.resize(name_len);
  in.read(sol.theory_name.data(), name_len);
  sol.R = get_d();
  sol.grid.L = get_d();
  sol.grid.steps = get_i();
  sol.iterations_used = get_i();
  sol.converged = get_i() != 0;
  const int np = get_i();
  sol.periods.values.resize(np);
  for (int i = 0; i < np; ++i) {
    const double re = get_d();
    const double im = get_d();
    sol.periods.values[i] = cplx(re, im);
  }
  const int nc = get_i();
  sol.charges.resize(nc);
  for (int i = 0; i < nc; ++i) {
    sol.charges[i].resize(get_i());
    for (auto& v : sol.charges[i]) v = get_i();
  }
  sol.inst.assign(nc, std::vector<cplx>(sol.grid.steps));
  for (auto& row : sol.inst)
    in.read(reinterpret_cast<char*>(row.data()), row.size() * sizeof(cplx));
  if (!in) throw std::runtime_error("truncated snapshot");
  return sol;
}

}  // namespace stokes
