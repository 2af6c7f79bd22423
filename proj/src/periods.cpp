#include "stokes/periods.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "stokes/quadrature.hpp"

namespace stokes {

namespace {

constexpr double kPi = std::numbers::pi;

double dist_point_segment(cplx p, cplx a, cplx b) {
  const cplx d = b - a;
  const double len2 = std::norm(d);
  if (len2 == 0.0) return std::abs(p - a);
  double t = ((p - a) * std::conj(d)).real() / len2;
  t = std::clamp(t, 0.0, 1.0);
  return std::abs(p - (a + t * d));
}

// sqrt branch continuous from `prev`
cplx tracked_sqrt(cplx value, cplx prev) {
  cplx s = std::sqrt(value);
  return (std::abs(s - prev) <= std::abs(-s - prev)) ? s : -s;
}

}  // namespace

PeriodVector base_periods(const Theory& theory) {
  PeriodVector pv;
  pv.values = theory.base_periods;
  return pv;
}

cplx period_of(const ChargeVector& charge, const PeriodVector& pv) {
  if (charge.size() != pv.values.size())
    throw std::invalid_argument("charge dimension mismatch");
  cplx z(0);
  for (size_t i = 0; i < charge.size(); ++i) z += double(charge[i]) * pv.values[i];
  return z;
}

cplx numeric_period_n2(const ComplexPoly& p2, cplx z_a, cplx z_b, int branch_sign) {
  const ComplexPoly dp = p2.derivative();
  const double scale = std::max(1.0, std::abs(p2.leading()));
  if (std::abs(p2.eval(z_a)) > 1e-8 * scale || std::abs(p2.eval(z_b)) > 1e-8 * scale)
    throw std::invalid_argument("segment endpoints must be roots");
  if (std::abs(dp.eval(z_a)) < 1e-8 * scale || std::abs(dp.eval(z_b)) < 1e-8 * scale)
    throw std::invalid_argument("segment endpoints must be simple roots");
  for (const auto& r : p2.roots()) {
    if (std::abs(r - z_a) < 1e-7 || std::abs(r - z_b) < 1e-7) continue;
    if (dist_point_segment(r, z_a, z_b) < 1e-9)
      throw std::domain_error("sqrt(-P2) vanishes on the open segment");
  }

  const cplx mid = 0.5 * (z_a + z_b);
  const cplx h = 0.5 * (z_b - z_a);

  // z(phi) = mid + h sin(phi); the square-root endpoint behavior is absorbed
  // by the cos(phi) Jacobian, leaving a smooth integrand in phi.
  auto integrate = [&](int n) {
    const auto& rule = gauss_legendre(n);
    cplx acc(0);
    // nodes ascend; track the branch from the middle outward on both halves
    std::vector<cplx> w(n);
    const cplx w_mid = double(branch_sign) * std::sqrt(-p2.eval(mid));
    int mid_idx = n / 2;
    cplx prev = w_mid;
    for (int i = mid_idx; i < n; ++i) {
      const double phi = 0.5 * kPi * rule.nodes[i];
      w[i] = tracked_sqrt(-p2.eval(mid + h * std::sin(phi)), prev);
      prev = w[i];
    }
    prev = w_mid;
    for (int i = mid_idx - 1; i >= 0; --i) {
      const double phi = 0.5 * kPi * rule.nodes[i];
      w[i] = tracked_sqrt(-p2.eval(mid + h * std::sin(phi)), prev);
      prev = w[i];
    }
    for (int i = 0; i < n; ++i) {
      const double phi = 0.5 * kPi * rule.nodes[i];
      acc += rule.weights[i] * w[i] * h * std::cos(phi);
    }
    return acc * (0.5 * kPi);  // d phi scale from [-1,1] to [-pi/2, pi/2]
  };

  cplx z_prev = integrate(32);
  for (int n = 64; n <= 8192; n *= 2) {
    const cplx z_cur = integrate(n);
    if (std::abs(z_cur - z_prev) <= 1e-11 * std::max(1.0, std::abs(z_cur)))
      return 2.0 * z_cur;
    z_prev = z_cur;
  }
  return 2.0 * z_prev;
}

Contour Contour::figure_eight(cplx za, cplx zb, double rho) {
  const cplx u = (zb - za) / std::abs(zb - za);
  const double phi_a = std::arg(u);
  const double phi_b = phi_a + kPi;
  const cplx s0 = za + rho * u;
  const cplx s1 = zb - rho * u;
  Contour c;
  c.pieces_.push_back({true, 0, 0, za, rho, phi_a, phi_a + 2.0 * kPi});
  c.pieces_.push_back({false, s0, s1, 0, 0, 0, 0});
  c.pieces_.push_back({true, 0, 0, zb, rho, phi_b, phi_b - 2.0 * kPi});
  c.pieces_.push_back({false, s1, s0, 0, 0, 0, 0});
  return c;
}

Contour Contour::circle(cplx center, double radius, bool ccw) {
  Contour c;
  c.pieces_.push_back({true, 0, 0, center, radius, 0.0, ccw ? 2.0 * kPi : -2.0 * kPi});
  return c;
}

cplx Contour::piece_at(int piece, double s) const {
  const Piece& p = pieces_[piece];
  if (p.arc) return p.center + std::polar(p.radius, p.phi0 + s * (p.phi1 - p.phi0));
  return p.a + s * (p.b - p.a);
}

cplx Contour::piece_deriv(int piece, double s) const {
  const Piece& p = pieces_[piece];
  if (p.arc) {
    const double dphi = p.phi1 - p.phi0;
    return cplx(0, 1) * dphi * std::polar(p.radius, p.phi0 + s * dphi);
  }
  return p.b - p.a;
}

namespace {

std::array<cplx, 3> sheet_roots(const ComplexPoly& p2, const ComplexPoly& p3, cplx z) {
  ComplexPoly cubic({p3.eval(z), p2.eval(z), 0.0, 1.0});
  auto r = cubic.roots();
  std::array<cplx, 3> out = {r[0], r[1], r[2]};
  return out;
}

// match `next` to `prev` by the best of the 6 permutations; returns max move
double match_sheets(const std::array<cplx, 3>& prev, std::array<cplx, 3>& next) {
  static const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                  {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  double best_cost = 1e300;
  int best = 0;
  for (int p = 0; p < 6; ++p) {
    double cost = 0.0;
    for (int i = 0; i < 3; ++i) cost += std::abs(next[perms[p][i]] - prev[i]);
    if (cost < best_cost) {
      best_cost = cost;
      best = p;
    }
  }
  std::array<cplx, 3> matched = {next[perms[best][0]], next[perms[best][1]],
                                 next[perms[best][2]]};
  double max_move = 0.0;
  for (int i = 0; i < 3; ++i) max_move = std::max(max_move, std::abs(matched[i] - prev[i]));
  next = matched;
  return max_move;
}

double min_gap(const std::array<cplx, 3>& r) {
  return std::min({std::abs(r[0] - r[1]), std::abs(r[0] - r[2]), std::abs(r[1] - r[2])});
}

}  // namespace

std::array<cplx, 3> lift_periods_n3(const ComplexPoly& p2, const ComplexPoly& p3,
                                    const Contour& contour) {
  // Composite Simpson with n sub-intervals per smooth piece; sheets tracked
  // through all pieces in order. Returns false when the tracking step is too
  // coarse relative to the sheet gaps (caller then doubles n).
  auto attempt = [&](int n, std::array<cplx, 3>& out) -> bool {
    auto start = sheet_roots(p2, p3, contour.piece_at(0, 0.0));
    std::sort(start.begin(), start.end(), [](cplx a, cplx b) {
      return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    std::array<cplx, 3> prev = start;
    std::array<cplx, 3> acc = {0, 0, 0};
    for (int piece = 0; piece < contour.piece_count(); ++piece) {
      for (int i = 0; i <= n; ++i) {
        const double s = double(i) / n;
        std::array<cplx, 3> cur = (piece == 0 && i == 0)
                                      ? start
                                      : sheet_roots(p2, p3, contour.piece_at(piece, s));
        if (!(piece == 0 && i == 0)) {
          const double gap = min_gap(prev);
          if (gap < 1e-9) throw std::domain_error("sheets collide on the contour");
          const double move = match_sheets(prev, cur);
          if (move > 0.4 * gap) return false;  // refine
        }
        const double wgt = (i == 0 || i == n) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        const cplx dz = contour.piece_deriv(piece, s);
        for (int k = 0; k < 3; ++k) acc[k] += wgt * cur[k] * dz / (3.0 * n);
        prev = cur;
      }
    }
    for (int k = 0; k < 3; ++k) {
      if (std::abs(prev[k] - start[k]) > 1e-6 * std::max(1.0, std::abs(start[k])))
        return false;  // lift did not close at this resolution
    }
    out = acc;
    return true;
  };

  std::array<cplx, 3> prev_val = {0, 0, 0};
  bool have_prev = false;
  for (int n = 128; n <= 65536; n *= 2) {
    std::array<cplx, 3> val;
    if (!attempt(n, val)) continue;
    if (have_prev) {
      double diff = 0.0, mag = 1.0;
      for (int k = 0; k < 3; ++k) {
        diff = std::max(diff, std::abs(val[k] - prev_val[k]));
        mag = std::max(mag, std::abs(val[k]));
      }
      if (diff <= 1e-11 * mag) return val;
    }
    prev_val = val;
    have_prev = true;
  }
  if (!have_prev) throw std::domain_error("contour lift failed to close");
  return prev_val;
}

cplx numeric_period_n3(const ComplexPoly& p2, const ComplexPoly& p3,
                       const Contour& contour, cplx expected) {
  const auto lifts = lift_periods_n3(p2, p3, contour);
  cplx best = lifts[0];
  for (const auto& v : lifts)
    if (std::abs(v - expected) < std::abs(best - expected)) best = v;
  return best;
}

namespace {

// Track roots of a cubic family from `from` to `to` parameters by stepping.
std::vector<cplx> track_roots(const ComplexPoly& from_poly, const std::vector<cplx>& from_roots,
                              const ComplexPoly& to_poly, int steps) {
  std::vector<cplx> cur = from_roots;
  for (int s = 1; s <= steps; ++s) {
    const double t = double(s) / steps;
    ComplexPoly blend = from_poly * (1.0 - t) + to_poly * t;
    auto r = blend.roots();
    // greedy nearest matching (degree <= 4 here)
    std::vector<cplx> matched(cur.size());
    std::vector<bool> used(r.size(), false);
    for (size_t i = 0; i < cur.size(); ++i) {
      int best = -1;
      double bd = 1e300;
      for (size_t j = 0; j < r.size(); ++j) {
        if (used[j]) continue;
        const double d = std::abs(r[j] - cur[i]);
        if (d < bd) {
          bd = d;
          best = int(j);
        }
      }
      used[best] = true;
      matched[i] = r[best];
    }
    cur = matched;
  }
  return cur;
}

cplx nearest_sign(cplx value, cplx reference) {
  return (std::abs(value - reference) <= std::abs(-value - reference)) ? value : -value;
}

PeriodVector periods_a1a2(const Theory& theory, const std::map<FamilyParam, cplx>& params) {
  PeriodVector pv;
  pv.params = params;
  const cplx lambda = params.at(FamilyParam::Lambda);
  const cplx c = params.at(FamilyParam::C);
  if (lambda == cplx(0)) {
    const cplx factor = std::pow(c, 5.0 / 6.0);
    for (const auto& z : theory.base_periods) pv.values.push_back(z * factor);
    return pv;
  }
  // Track the three roots of z^3 - Lambda z - c from the basepoint z^3 - 1
  // and integrate over the deformed saddle segments. gamma_1 pairs the roots
  // continued from (1, omega); gamma_2 pairs (omega, omega^2).
  const cplx omega = std::polar(1.0, 2.0 * kPi / 3.0);
  const std::vector<cplx> base_roots = {1.0, omega, omega * omega};
  ComplexPoly base_poly({-1.0, 0.0, 0.0, 1.0});
  ComplexPoly target({-c, -lambda, 0.0, 1.0});
  const auto roots = track_roots(base_poly, base_roots, target, 16);

  const cplx z1 = numeric_period_n2(target, roots[0], roots[1], +1);
  const cplx z2 = numeric_period_n2(target, roots[1], roots[2], +1);
  pv.values = {nearest_sign(z1, theory.base_periods[0]),
               nearest_sign(z2, theory.base_periods[1])};
  return pv;
}

PeriodVector periods_a2a1(const Theory& theory, const std::map<FamilyParam, cplx>& params) {
  PeriodVector pv;
  pv.params = params;
  const cplx c = params.at(FamilyParam::C);
  if (c == cplx(0)) {
    pv.values = theory.base_periods;
    return pv;
  }
  const ComplexPoly p3({0.5, 0.0, -0.5});
  const Contour eight = Contour::figure_eight(1.0, -1.0, 0.55);
  std::vector<cplx> cur = theory.base_periods;
  const int chain = 4;
  for (int s = 1; s <= chain; ++s) {
    const cplx cs = c * double(s) / chain;
    const auto lifts = lift_periods_n3(ComplexPoly({cs}), p3, eight);
    for (size_t i = 0; i < cur.size(); ++i) {
      cplx best = lifts[0];
      for (const auto& v : lifts)
        if (std::abs(v - cur[i]) < std::abs(best - cur[i])) best = v;
      cur[i] = best;
    }
  }
  pv.values = cur;
  return pv;
}

}  // namespace

PeriodVector periods_at(const Theory& theory, const std::map<FamilyParam, cplx>& params) {
  for (const auto& p : theory.family_params)
    if (!params.count(p)) throw std::invalid_argument("missing family parameter");

  if (theory.name == "A1A2") return periods_a1a2(theory, params);
  if (theory.name == "A2A1") return periods_a2a1(theory, params);
  PeriodVector pv;
  pv.params = params;
  pv.values = theory.base_periods;
  return pv;
}

}  // namespace stokes
