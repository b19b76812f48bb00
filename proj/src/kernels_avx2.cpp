// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.

#include <immintrin.h>

#include <cmath>
#include <limits>

#include "kernels_internal.hpp"

namespace bregret::kernels::detail {
namespace {

inline double horizontal_sum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d swapped = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, swapped));
}

inline double horizontal_max(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_max_pd(lo, hi);
  __m128d swapped = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_max_sd(lo, swapped));
}

// exp(x) for four doubles, Cephes rational approximation after range
// reduction by ln 2. Inputs below -708.39 (including -inf) flush to zero.
inline __m256d exp_pd(__m256d x) {
  const __m256d lower = _mm256_set1_pd(-708.3964185322641);
  const __m256d upper = _mm256_set1_pd(709.782712893384);
  const __m256d underflow = _mm256_cmp_pd(x, lower, _CMP_LT_OQ);
  x = _mm256_min_pd(_mm256_max_pd(x, lower), upper);

  const __m256d fx = _mm256_round_pd(_mm256_mul_pd(x, _mm256_set1_pd(1.4426950408889634073599)),
                                     _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(fx, _mm256_set1_pd(6.93145751953125E-1), x);
  r = _mm256_fnmadd_pd(fx, _mm256_set1_pd(1.42860682030941723212E-6), r);

  const __m256d rr = _mm256_mul_pd(r, r);
  __m256d p = _mm256_set1_pd(1.26177193074810590878E-4);
  p = _mm256_fmadd_pd(p, rr, _mm256_set1_pd(3.02994407707441961300E-2));
  p = _mm256_fmadd_pd(p, rr, _mm256_set1_pd(9.99999999999999999910E-1));
  p = _mm256_mul_pd(p, r);
  __m256d q = _mm256_set1_pd(3.00198505138664455042E-6);
  q = _mm256_fmadd_pd(q, rr, _mm256_set1_pd(2.52448340349684104192E-3));
  q = _mm256_fmadd_pd(q, rr, _mm256_set1_pd(2.27265548208155028766E-1));
  q = _mm256_fmadd_pd(q, rr, _mm256_set1_pd(2.00000000000000000009E0));
  __m256d e = _mm256_div_pd(p, _mm256_sub_pd(q, p));
  e = _mm256_fmadd_pd(e, _mm256_set1_pd(2.0), _mm256_set1_pd(1.0));

  // 2^fx via the 2^52 + 2^51 rounding trick; fx + 1023 lies in [1, 2046].
  const __m256d biased = _mm256_add_pd(fx, _mm256_set1_pd(1023.0 + 6755399441055744.0));
  const __m256i bits = _mm256_slli_epi64(_mm256_castpd_si256(biased), 52);
  e = _mm256_mul_pd(e, _mm256_castsi256_pd(bits));
  return _mm256_andnot_pd(underflow, e);
}

void add_scaled_avx2(double* out, const double* x, double scale, std::size_t n) {
  const __m256d s = _mm256_set1_pd(scale);
  const __m256d zero = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d xv = _mm256_loadu_pd(x + k);
    const __m256d nonzero = _mm256_cmp_pd(xv, zero, _CMP_NEQ_UQ);
    const __m256d prod = _mm256_and_pd(nonzero, _mm256_mul_pd(s, xv));
    _mm256_storeu_pd(out + k, _mm256_add_pd(_mm256_loadu_pd(out + k), prod));
  }
  for (; k < n; ++k) out[k] += x[k] == 0.0 ? 0.0 : scale * x[k];
}

double reduce_max_avx2(const double* x, std::size_t n) {
  __m256d best = _mm256_set1_pd(-std::numeric_limits<double>::infinity());
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) best = _mm256_max_pd(best, _mm256_loadu_pd(x + k));
  double result = horizontal_max(best);
  for (; k < n; ++k) {
    if (x[k] > result) result = x[k];
  }
  return result;
}

double sum_exp_shifted_avx2(const double* x, double shift, std::size_t n) {
  const __m256d s = _mm256_set1_pd(shift);
  __m256d acc = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    acc = _mm256_add_pd(acc, exp_pd(_mm256_sub_pd(_mm256_loadu_pd(x + k), s)));
  }
  double sum = horizontal_sum(acc);
  for (; k < n; ++k) {
    if (x[k] != -std::numeric_limits<double>::infinity()) sum += std::exp(x[k] - shift);
  }
  return sum;
}

double exp_dot_avx2(const double* log_weights, const double* values, double shift,
                    std::size_t n) {
  const __m256d s = _mm256_set1_pd(shift);
  const __m256d neg_inf = _mm256_set1_pd(-std::numeric_limits<double>::infinity());
  __m256d acc = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d lw = _mm256_loadu_pd(log_weights + k);
    const __m256d live = _mm256_cmp_pd(lw, neg_inf, _CMP_NEQ_UQ);
    const __m256d w = exp_pd(_mm256_sub_pd(lw, s));
    // Masking the product (not only w) keeps NaN/inf values of dead entries out.
    const __m256d term = _mm256_and_pd(live, _mm256_mul_pd(w, _mm256_loadu_pd(values + k)));
    acc = _mm256_add_pd(acc, term);
  }
  double sum = horizontal_sum(acc);
  for (; k < n; ++k) {
    if (log_weights[k] != -std::numeric_limits<double>::infinity()) {
      sum += std::exp(log_weights[k] - shift) * values[k];
    }
  }
  return sum;
}

}  // namespace

const KernelTable& avx2_table_unchecked() {
  static const KernelTable table{"avx2", &add_scaled_avx2, &reduce_max_avx2,
                                 &sum_exp_shifted_avx2, &exp_dot_avx2};
  return table;
}

}  // namespace bregret::kernels::detail
