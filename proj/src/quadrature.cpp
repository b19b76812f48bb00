#include "bregret/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <string>

#include "bregret/error.hpp"

namespace bregret {
namespace {

struct JacobiValue {
  double value;
  double derivative;
};

// P_n^{(a,b)}(x) by the three-term recurrence, derivative from P_n and P_{n-1}.
JacobiValue jacobi(std::size_t n, double a, double b, double x) {
  double prev = 1.0;
  double curr = (a + 1.0) + 0.5 * (a + b + 2.0) * (x - 1.0);
  if (n == 1) {
    return {curr, 0.5 * (a + b + 2.0)};
  }
  for (std::size_t k = 2; k <= n; ++k) {
    const double kk = static_cast<double>(k);
    const double s = 2.0 * kk + a + b;
    const double c0 = 2.0 * kk * (kk + a + b) * (s - 2.0);
    const double c1 = (s - 1.0) * (s * (s - 2.0) * x + a * a - b * b);
    const double c2 = 2.0 * (kk + a - 1.0) * (kk + b - 1.0) * s;
    const double next = (c1 * curr - c2 * prev) / c0;
    prev = curr;
    curr = next;
  }
  const double nn = static_cast<double>(n);
  const double s = 2.0 * nn + a + b;
  const double derivative =
      (nn * ((a - b) - s * x) * curr + 2.0 * (nn + a) * (nn + b) * prev) / (s * (1.0 - x * x));
  return {curr, derivative};
}

}  // namespace

QuadratureRule gauss_jacobi(std::size_t n, double a, double b) {
  if (n == 0) throw DomainError("gauss_jacobi: need at least one node");
  if (!(a > -1.0) || !(b > -1.0)) {
    throw DomainError("gauss_jacobi: exponents must exceed -1");
  }

  const double log_mass = (a + b + 1.0) * std::log(2.0) + std::lgamma(a + 1.0) +
                          std::lgamma(b + 1.0) - std::lgamma(a + b + 2.0);
  const double mass = std::exp(log_mass);
  if (n == 1) {
    return {{(b - a) / (a + b + 2.0)}, {mass}};
  }

  // Golub-Welsch: nodes are the eigenvalues of the symmetric Jacobi matrix.
  Eigen::VectorXd diag(static_cast<Eigen::Index>(n));
  Eigen::VectorXd sub(static_cast<Eigen::Index>(n - 1));
  for (std::size_t k = 0; k < n; ++k) {
    const double kk = static_cast<double>(k);
    const double s = 2.0 * kk + a + b;
    diag[static_cast<Eigen::Index>(k)] = k == 0 ? (b - a) / (a + b + 2.0)
                                                : (b * b - a * a) / (s * (s + 2.0));
  }
  for (std::size_t k = 1; k < n; ++k) {
    const double kk = static_cast<double>(k);
    const double s = 2.0 * kk + a + b;
    const double squared =
        k == 1 ? 4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + a + b) * (2.0 + a + b) * (3.0 + a + b))
               : 4.0 * kk * (kk + a) * (kk + b) * (kk + a + b) / (s * s * (s + 1.0) * (s - 1.0));
    sub[static_cast<Eigen::Index>(k - 1)] = std::sqrt(squared);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw DomainError("gauss_jacobi: eigenvalue iteration failed for n=" + std::to_string(n));
  }

  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double x = solver.eigenvalues()[static_cast<Eigen::Index>(i)];
    JacobiValue p = jacobi(n, a, b, x);
    // Newton polish; the eigenvalues are already within a few ulps.
    for (int iter = 0; iter < 3; ++iter) {
      const double step = p.value / p.derivative;
      x = std::clamp(x - step, -1.0 + 1e-300, 1.0 - 1e-300);
      p = jacobi(n, a, b, x);
      if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(x))) break;
    }
    rule.nodes[i] = x;
    rule.weights[i] = 1.0 / ((1.0 - x * x) * p.derivative * p.derivative);
    total += rule.weights[i];
  }
  for (double& w : rule.weights) w *= mass / total;
  return rule;
}

}  // namespace bregret
