#pragma once

#include <complex>
#include <vector>

namespace stokes {

using cplx = std::complex<double>;

/// Polynomial with complex coefficients, ascending degree.
/// Trailing (near-)zero coefficients are trimmed so that the leading
/// coefficient is nonzero unless the polynomial is identically zero.
class ComplexPoly {
public:
  ComplexPoly() = default;
  explicit ComplexPoly(std::vector<cplx> coeffs);
  static ComplexPoly zero() { return ComplexPoly(); }
  static ComplexPoly monomial(int degree, cplx coeff = 1.0);

  // degree of the zero polynomial is -1
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  bool is_zero() const { return coeffs_.empty(); }
  cplx leading() const { return coeffs_.empty() ? cplx(0) : coeffs_.back(); }
  cplx coeff(int k) const {
    return (k >= 0 && k < static_cast<int>(coeffs_.size())) ? coeffs_[k] : cplx(0);
  }
  const std::vector<cplx>& coeffs() const { return coeffs_; }

  cplx eval(cplx z) const;          // Horner
  ComplexPoly derivative() const;

  /// q(z) = s * p(a*z + b), used for affine pullbacks.
  ComplexPoly compose_affine(cplx a, cplx b, cplx s = 1.0) const;

  /// Roots via the companion-matrix eigenvalues. Degrees here are <= 4.
  std::vector<cplx> roots() const;

  ComplexPoly operator*(cplx s) const;
  ComplexPoly operator+(const ComplexPoly& other) const;

private:
  std::vector<cplx> coeffs_;  // ascending; empty == zero polynomial
};

/// Largest root modulus of all nonzero polynomials in a list; 0 if none.
double max_root_modulus(const std::vector<ComplexPoly>& polys);

}  // namespace stokes
