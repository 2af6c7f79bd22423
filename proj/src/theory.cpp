#include "stokes/theory.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace stokes {

namespace {

constexpr double kPi = std::numbers::pi;

cplx polar(double r, double theta) { return std::polar(r, theta); }

DetTerm p_term(std::initializer_list<int> idx) { return DetTerm{DetTerm::P, idx}; }
DetTerm q_term(std::initializer_list<int> idx) { return DetTerm{DetTerm::Q, idx}; }

// M = sqrt(3 pi) Gamma(4/3) / Gamma(11/6)
double constant_m() {
  return std::sqrt(3.0 * kPi) * std::tgamma(4.0 / 3.0) / std::tgamma(11.0 / 6.0);
}

// |12 * 2^(2/3) * pi^(3/2) / (5 Gamma(-1/6) Gamma(2/3))|
double constant_a2a1() {
  const double gm16 = std::abs(std::tgamma(-1.0 / 6.0));
  return 12.0 * std::pow(2.0, 2.0 / 3.0) * std::pow(kPi, 1.5) /
         (5.0 * gm16 * std::tgamma(2.0 / 3.0));
}

Theory make_a1a2() {
  Theory t;
  t.name = "A1A2";
  t.rank = 2;
  t.degree = 3;
  t.lattice_rank = 2;
  t.intersection = {{0, 1}, {-1, 0}};
  t.gamma_prime = {{{1, 0}, 1}, {{0, 1}, 1}, {{1, 1}, 1}};
  const double m = constant_m();
  t.base_periods = {polar(m, 5.0 * kPi / 6.0), cplx(0.0, -m)};
  t.theta0 = 0.0;
  t.family_params = {FamilyParam::Lambda, FamilyParam::C};
  t.coord_formulas = {
      {{p_term({2, 3}), p_term({1, 5})}, {p_term({1, 2}), p_term({3, 5})}, +1},
      {{p_term({2, 3}), p_term({4, 5}), p_term({1, 3})},
       {p_term({1, 2}), p_term({3, 4}), p_term({3, 5})},
       +1}};
  t.sector1_direction = 2.0 * kPi / 5.0;
  return t;
}

Theory make_a1a3() {
  Theory t;
  t.name = "A1A3";
  t.rank = 2;
  t.degree = 4;
  t.lattice_rank = 3;
  t.intersection = {{0, 1, 1}, {-1, 0, 0}, {-1, 0, 0}};
  t.gamma_prime = {{{1, 0, 0}, 1},  {{0, 1, 0}, 1},  {{0, 0, 1}, 1},
                   {{1, 0, -1}, 1}, {{1, -1, 0}, 1}, {{1, -1, -1}, 1}};
  const double z1 = 2.0 * std::sqrt(kPi) * std::tgamma(1.25) / std::tgamma(1.75);
  t.base_periods = {cplx(z1, 0.0), 0.5 * cplx(1.0, 1.0) * z1, 0.5 * cplx(1.0, 1.0) * z1};
  t.theta0 = 0.4;
  t.family_params = {};
  t.coord_formulas = {
      {{p_term({1, 3}), p_term({4, 6})}, {p_term({1, 6}), p_term({3, 4})}, +1},
      {{p_term({2, 3}), p_term({1, 4})}, {p_term({1, 2}), p_term({3, 4})}, +1},
      {{p_term({1, 4}), p_term({5, 6})}, {p_term({4, 5}), p_term({1, 6})}, +1}};
  t.sector1_direction = 2.0 * kPi / 6.0 + 2.0 * 0.4 / 6.0;
  return t;
}

Theory make_a2a1() {
  Theory t;
  t.name = "A2A1";
  t.rank = 3;
  t.degree = 2;
  t.lattice_rank = 2;
  t.intersection = {{0, 1}, {-1, 0}};
  t.gamma_prime = {{{1, 0}, 1}, {{0, 1}, 1}, {{1, 1}, 1}};
  const double k = constant_a2a1();
  t.base_periods = {polar(k, 5.0 * kPi / 6.0), polar(k, 5.0 * kPi / 6.0 + 2.0 * kPi / 3.0)};
  t.theta0 = 0.0;
  t.family_params = {FamilyParam::C};
  t.coord_formulas = {
      {{p_term({2, 3, 4}), p_term({1, 4, 5})}, {p_term({1, 2, 4}), p_term({3, 4, 5})}, +1},
      {{p_term({2, 4, 5}), p_term({1, 2, 3}), p_term({1, 4, 5})},
       {p_term({1, 2, 5}), p_term({1, 2, 4}), p_term({3, 4, 5})},
       +1}};
  t.sector1_direction = kPi / 5.0;
  return t;
}

Theory make_a2a2() {
  Theory t;
  t.name = "A2A2";
  t.rank = 3;
  t.degree = 3;
  t.lattice_rank = 4;
  t.intersection = {{0, 1, 0, 0}, {-1, 0, 0, 0}, {0, 0, 0, 0}, {0, 0, 0, 0}};
  t.gamma_prime = {{{1, 0, 0, 0}, 1},    {{0, 1, 0, 0}, 1},    {{1, 1, 0, 0}, 1},
                   {{0, 1, 1, 0}, 1},    {{0, 1, 1, 1}, 1},    {{1, 0, -1, 0}, 1},
                   {{1, 0, -1, -1}, 1},  {{1, -1, -1, 0}, 1},  {{1, -1, -1, -1}, 1},
                   {{1, -1, -2, -1}, 1}, {{1, -2, -2, -1}, 1}, {{2, -1, -2, -1}, 1}};
  // gamma_1, gamma_2 are quadrature values for the figure-eight cycles
  // (validated against the six-figure fixtures in the tests); gamma_3,
  // gamma_4 are peripheral cycles with residue closed form 2 pi 2^(-1/3).
  const double rperiod = 2.0 * kPi * std::pow(2.0, -1.0 / 3.0);
  t.base_periods = {cplx(2.3029775442421211, 0.0),
                    cplx(5.4703294315738259, 4.4879166604824955),
                    polar(rperiod, 5.0 * kPi / 6.0), cplx(0.0, -rperiod)};
  t.theta0 = 0.0;
  t.family_params = {};
  t.coord_formulas = {
      {{q_term({1, 2, 3, 4, 5, 6})}, {p_term({1, 2, 3}), p_term({4, 5, 6})}, +1},
      {{p_term({1, 2, 5}), p_term({3, 5, 6}), p_term({4, 5, 6})},
       {p_term({1, 5, 6}), p_term({2, 5, 6}), p_term({3, 4, 5})},
       +1},
      {{p_term({1, 2, 6}), p_term({3, 4, 5})}, {p_term({1, 2, 3}), p_term({4, 5, 6})}, +1},
      {{p_term({1, 5, 6}), p_term({2, 3, 4})}, {p_term({1, 2, 6}), p_term({3, 4, 5})}, +1}};
  t.sector1_direction = 2.0 * kPi / 6.0;
  return t;
}

const std::vector<Theory>& catalog() {
  static const std::vector<Theory> entries = {make_a1a2(), make_a1a3(), make_a2a1(),
                                              make_a2a2()};
  return entries;
}

void validate_degrees(const DifferentialTuple& w, int d) {
  if (w.top().degree() != d)
    throw std::invalid_argument("top differential has wrong degree");
  for (const auto& [k, p] : w.phi) {
    if (k == w.rank) continue;
    if (p.is_zero()) continue;
    if (double(p.degree()) >= double(k) * d / double(w.rank))
      throw std::invalid_argument("lower differential degree violates the family bound");
  }
}

}  // namespace

int Theory::pairing(const ChargeVector& a, const ChargeVector& b) const {
  if (static_cast<int>(a.size()) != lattice_rank || static_cast<int>(b.size()) != lattice_rank)
    throw std::invalid_argument("charge dimension mismatch");
  int s = 0;
  for (int i = 0; i < lattice_rank; ++i)
    for (int j = 0; j < lattice_rank; ++j) s += a[i] * intersection[i][j] * b[j];
  return s;
}

bool Theory::is_pure_flavor(const ChargeVector& c) const {
  if (static_cast<int>(c.size()) != lattice_rank)
    throw std::invalid_argument("charge dimension mismatch");
  for (int i = 0; i < lattice_rank; ++i) {
    int s = 0;
    for (int j = 0; j < lattice_rank; ++j) s += intersection[i][j] * c[j];
    if (s != 0) return false;
  }
  return true;
}

const Theory& get_theory(const std::string& name) {
  for (const auto& t : catalog())
    if (t.name == name) return t;
  throw std::invalid_argument("unknown theory: " + name);
}

std::vector<std::string> theory_names() {
  std::vector<std::string> names;
  for (const auto& t : catalog()) names.push_back(t.name);
  return names;
}

DifferentialTuple build_differentials(const Theory& theory,
                                      const std::map<FamilyParam, cplx>& params) {
  for (const auto& p : theory.family_params)
    if (!params.count(p)) throw std::invalid_argument("missing family parameter");
  if (params.size() != theory.family_params.size())
    throw std::invalid_argument("unexpected family parameter");

  DifferentialTuple w;
  w.rank = theory.rank;
  if (theory.name == "A1A2") {
    const cplx lambda = params.at(FamilyParam::Lambda);
    const cplx c = params.at(FamilyParam::C);
    w.phi[2] = ComplexPoly({-c, -lambda, 0.0, 1.0});
  } else if (theory.name == "A1A3") {
    w.phi[2] = ComplexPoly({-1.0, 0.0, 0.0, 0.0, 1.0});
  } else if (theory.name == "A2A1") {
    const cplx c = params.at(FamilyParam::C);
    w.phi[2] = ComplexPoly({c});
    w.phi[3] = ComplexPoly({0.5, 0.0, -0.5});
  } else if (theory.name == "A2A2") {
    w.phi[2] = ComplexPoly::zero();
    w.phi[3] = ComplexPoly({-1.0, 0.0, -1.5, 0.5});
  } else {
    throw std::invalid_argument("unknown theory: " + theory.name);
  }
  validate_degrees(w, theory.degree);
  return w;
}

DifferentialTuple scale_differentials(const DifferentialTuple& w, cplx t) {
  if (t == cplx(0)) throw std::invalid_argument("zero scale");
  DifferentialTuple out;
  out.rank = w.rank;
  for (const auto& [k, p] : w.phi) out.phi[k] = p * std::pow(t, k);
  return out;
}

std::pair<DifferentialTuple, AffineMap> normalize_quasi_monic_centered(
    const DifferentialTuple& w) {
  const ComplexPoly& pn = w.top();
  const int d = pn.degree();
  if (d < 1) throw std::invalid_argument("top differential must be nonconstant");

  const cplx b = -pn.coeff(d - 1) / (double(d) * pn.leading());
  const double a = std::pow(std::abs(pn.leading()), -1.0 / double(w.rank + d));

  DifferentialTuple out;
  out.rank = w.rank;
  for (const auto& [k, p] : w.phi)
    out.phi[k] = p.compose_affine(a, b, std::pow(cplx(a), k));
  return {out, AffineMap{a, b}};
}

std::vector<double> stokes_ray_directions(const DifferentialTuple& w, cplx spectral_param) {
  if (spectral_param == cplx(0)) throw std::invalid_argument("zero spectral parameter");
  const int m = w.rank + w.top().degree();
  const double arg_a =
      std::arg(w.top().leading()) - double(w.rank) * std::arg(spectral_param);
  std::vector<double> dirs(m);
  for (int j = 1; j <= m; ++j) {
    double theta = (2.0 * kPi * j - arg_a) / m;
    theta = std::fmod(theta, 2.0 * kPi);
    if (theta < 0) theta += 2.0 * kPi;
    dirs[j - 1] = theta;
  }
  std::sort(dirs.begin(), dirs.end());
  return dirs;
}

double choose_radius_oper(const DifferentialTuple& w) {
  std::vector<ComplexPoly> ps;
  for (const auto& [k, p] : w.phi) ps.push_back(p);
  return std::max(8.0, 8.0 * max_root_modulus(ps));
}

double choose_radius_hitchin(const DifferentialTuple& w, double rmax_cap) {
  std::vector<ComplexPoly> ps;
  for (const auto& [k, p] : w.phi) ps.push_back(p);
  const double r0 = max_root_modulus(ps);
  return std::clamp(4.0 * r0 + 4.0, 6.0, rmax_cap);
}

double code_sign(const Theory& theory, const ChargeVector& charge) {
  for (const auto& cw : theory.gamma_prime) {
    if (cw.charge == charge) return -1.0;
    ChargeVector neg(cw.charge.size());
    for (size_t j = 0; j < neg.size(); ++j) neg[j] = -cw.charge[j];
    if (neg == charge) return -1.0;
  }
  return 1.0;
}

std::vector<double> labeled_sector_directions(const Theory& theory,
                                              const std::vector<double>& dirs,
                                              double theta_phase) {
  const int m = static_cast<int>(dirs.size());
  const double anchor = theory.sector1_direction +
                        (theta_phase - theory.theta0) * double(theory.rank) / double(m);
  int best = 0;
  double best_dist = 10.0;
  for (int j = 0; j < m; ++j) {
    double d = std::remainder(dirs[j] - anchor, 2.0 * kPi);
    if (std::abs(d) < best_dist) {
      best_dist = std::abs(d);
      best = j;
    }
  }
  std::vector<double> out(m);
  for (int i = 0; i < m; ++i) out[i] = dirs[(best + i) % m];
  return out;
}

}  // namespace stokes
