#pragma once

// Data-parallel inner loops shared by the log-domain code.
//
// Every kernel has a scalar reference implementation and, where the build and
// the CPU allow it, an AVX2/FMA variant. The variant is chosen once at first
// use; BREGRET_KERNELS=scalar in the environment forces the reference path.
// Variants agree to a few ulps (add_scaled and reduce_max bit-for-bit).

#include <cstddef>
#include <span>

namespace bregret::kernels {

struct KernelTable {
  const char* name;
  // out[k] += (x[k] == 0 ? 0 : scale * x[k]); keeps 0 * (-inf) == 0.
  void (*add_scaled)(double* out, const double* x, double scale, std::size_t n);
  // max_k x[k]; -inf for n == 0.
  double (*reduce_max)(const double* x, std::size_t n);
  // sum_k exp(x[k] - shift); entries equal to -inf contribute 0.
  double (*sum_exp_shifted)(const double* x, double shift, std::size_t n);
  // sum over k with log_weights[k] > -inf of exp(log_weights[k] - shift) * values[k].
  // values[k] must be finite wherever log_weights[k] is finite.
  double (*exp_dot)(const double* log_weights, const double* values, double shift,
                    std::size_t n);
};

const KernelTable& scalar_table();

// nullptr when the AVX2 variant was not compiled in or the CPU lacks AVX2/FMA.
const KernelTable* avx2_table();

// Table used by the span wrappers below.
const KernelTable& active();

// Swaps the active table for the lifetime of the object. Not thread-safe;
// intended for equivalence tests and benchmarks.
class ScopedKernelOverride {
 public:
  explicit ScopedKernelOverride(const KernelTable& table);
  ~ScopedKernelOverride();
  ScopedKernelOverride(const ScopedKernelOverride&) = delete;
  ScopedKernelOverride& operator=(const ScopedKernelOverride&) = delete;

 private:
  const KernelTable* previous_;
};

inline void add_scaled(std::span<double> out, std::span<const double> x, double scale) {
  active().add_scaled(out.data(), x.data(), scale, out.size());
}

inline double reduce_max(std::span<const double> x) {
  return active().reduce_max(x.data(), x.size());
}

inline double sum_exp_shifted(std::span<const double> x, double shift) {
  return active().sum_exp_shifted(x.data(), shift, x.size());
}

inline double exp_dot(std::span<const double> log_weights, std::span<const double> values,
                      double shift) {
  return active().exp_dot(log_weights.data(), values.data(), shift, log_weights.size());
}

}  // namespace bregret::kernels
