#pragma once

#include <cstddef>
#include <vector>

namespace bregret {

struct QuadratureRule {
  std::vector<double> nodes;    // ascending
  std::vector<double> weights;  // positive
};

// n-point Gauss-Jacobi rule on [-1, 1] for the weight (1 - x)^a (1 + x)^b,
// a, b > -1. Exact for polynomials of degree <= 2n - 1; the weights sum to the
// total mass 2^(a+b+1) B(a+1, b+1).
QuadratureRule gauss_jacobi(std::size_t n, double a, double b);

}  // namespace bregret
