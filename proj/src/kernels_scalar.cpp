#include <cmath>
#include <limits>

#include "bregret/kernels.hpp"

namespace bregret::kernels {
namespace {

void add_scaled_scalar(double* out, const double* x, double scale, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) {
    out[k] += x[k] == 0.0 ? 0.0 : scale * x[k];
  }
}

double reduce_max_scalar(const double* x, std::size_t n) {
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < n; ++k) {
    if (x[k] > best) best = x[k];
  }
  return best;
}

double sum_exp_shifted_scalar(const double* x, double shift, std::size_t n) {
  double sum = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    if (x[k] != -std::numeric_limits<double>::infinity()) sum += std::exp(x[k] - shift);
  }
  return sum;
}

double exp_dot_scalar(const double* log_weights, const double* values, double shift,
                      std::size_t n) {
  double sum = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    if (log_weights[k] != -std::numeric_limits<double>::infinity()) {
      sum += std::exp(log_weights[k] - shift) * values[k];
    }
  }
  return sum;
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{"scalar", &add_scaled_scalar, &reduce_max_scalar,
                                 &sum_exp_shifted_scalar, &exp_dot_scalar};
  return table;
}

}  // namespace bregret::kernels
