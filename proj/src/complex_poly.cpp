#include "stokes/complex_poly.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace stokes {

namespace {
constexpr double kTrimTol = 0.0;  // exact zeros only; callers scale sanely
}

ComplexPoly::ComplexPoly(std::vector<cplx> coeffs) : coeffs_(std::move(coeffs)) {
  while (!coeffs_.empty() && std::abs(coeffs_.back()) <= kTrimTol) coeffs_.pop_back();
}

ComplexPoly ComplexPoly::monomial(int degree, cplx coeff) {
  std::vector<cplx> c(degree + 1, cplx(0));
  c[degree] = coeff;
  return ComplexPoly(std::move(c));
}

cplx ComplexPoly::eval(cplx z) const {
  cplx acc(0);
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * z + *it;
  return acc;
}

ComplexPoly ComplexPoly::derivative() const {
  if (coeffs_.size() <= 1) return ComplexPoly();
  std::vector<cplx> d(coeffs_.size() - 1);
  for (size_t k = 1; k < coeffs_.size(); ++k) d[k - 1] = coeffs_[k] * double(k);
  return ComplexPoly(std::move(d));
}

ComplexPoly ComplexPoly::compose_affine(cplx a, cplx b, cplx s) const {
  // Horner in (a*z + b): acc(z) <- acc(z)*(a z + b) + c_k
  std::vector<cplx> acc;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
    std::vector<cplx> next(acc.size() + 1, cplx(0));
    for (size_t i = 0; i < acc.size(); ++i) {
      next[i + 1] += acc[i] * a;
      next[i] += acc[i] * b;
    }
    if (next.empty()) next.push_back(cplx(0));
    next[0] += *it;
    acc = std::move(next);
  }
  ComplexPoly out(std::move(acc));
  return out * s;
}

std::vector<cplx> ComplexPoly::roots() const {
  const int d = degree();
  if (d < 1) return {};
  Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(d, d);
  const cplx lead = coeffs_.back();
  for (int i = 0; i < d; ++i) companion(i, d - 1) = -coeffs_[i] / lead;
  for (int i = 1; i < d; ++i) companion(i, i - 1) = 1.0;
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(companion, /*computeEigenvectors=*/false);
  std::vector<cplx> out(d);
  for (int i = 0; i < d; ++i) out[i] = es.eigenvalues()(i);
  return out;
}

ComplexPoly ComplexPoly::operator*(cplx s) const {
  if (s == cplx(0)) return ComplexPoly();
  std::vector<cplx> c(coeffs_);
  for (auto& v : c) v *= s;
  return ComplexPoly(std::move(c));
}

ComplexPoly ComplexPoly::operator+(const ComplexPoly& other) const {
  std::vector<cplx> c(std::max(coeffs_.size(), other.coeffs_.size()), cplx(0));
  for (size_t i = 0; i < coeffs_.size(); ++i) c[i] += coeffs_[i];
  for (size_t i = 0; i < other.coeffs_.size(); ++i) c[i] += other.coeffs_[i];
  return ComplexPoly(std::move(c));
}

double max_root_modulus(const std::vector<ComplexPoly>& polys) {
  double r0 = 0.0;
  for (const auto& p : polys) {
    if (p.degree() < 1) continue;
    for (const auto& z : p.roots()) r0 = std::max(r0, std::abs(z));
  }
  return r0;
}

}  // namespace stokes
