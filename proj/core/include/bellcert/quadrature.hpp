#pragma once

#include <cstddef>
#include <vector>

namespace bellcert::gauss {

struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
};

/// Gauss-Hermite rule for the standard Gaussian probability measure
/// dgamma = (2 pi)^{-1/2} exp(-x^2/2) dx; weights sum to 1. Exact for
/// polynomials of degree < 2 order. Rules are built once and cached.
const GaussRule& gauss_hermite(int order);

/// Gauss-Legendre rule on [-1, 1], cached.
const GaussRule& gauss_legendre(int order);

/// Composite Gauss-Legendre on [a, b] with `panels` equal panels.
GaussRule composite_legendre(double a, double b, int panels, int order);

}  // namespace bellcert::gauss
