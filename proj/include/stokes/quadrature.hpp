#pragma once

#include <vector>

namespace stokes {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Cached rule of size n (Newton iteration on Legendre polynomials).
const GaussLegendre& gauss_legendre(int n);

}  // namespace stokes
