#include <immintrin.h>

#include <cmath>

#include "variants.hpp"

namespace quip::kernels::detail {
namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d shuf = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, shuf));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double sum_avx2(const double* x, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
  double s = hsum(acc);
  for (; i < n; ++i) s += x[i];
  return s;
}

double sum_sq_dev_avx2(const double* x, std::size_t n, double center) {
  const __m256d c = _mm256_set1_pd(center);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x + i), c);
    acc = _mm256_fmadd_pd(d, d, acc);
  }
  double s = hsum(acc);
  for (; i < n; ++i) {
    double d = x[i] - center;
    s += d * d;
  }
  return s;
}

void abs_diff_avx2(const double* x, std::size_t n, double* out) {
  if (n < 2) return;
  const std::size_t m = n - 1;
  const __m256d sign = _mm256_set1_pd(-0.0);
  std::size_t i = 0;
  for (; i + 4 <= m; i += 4) {
    __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x + i + 1), _mm256_loadu_pd(x + i));
    _mm256_storeu_pd(out + i, _mm256_andnot_pd(sign, d));
  }
  for (; i < m; ++i) out[i] = std::fabs(x[i + 1] - x[i]);
}

void dot_rows_avx2(const double* rows, std::size_t count, std::size_t dim, const double* query,
                   double* out) {
  for (std::size_t r = 0; r < count; ++r) out[r] = dot_avx2(rows + r * dim, query, dim);
}

}  // namespace

const KernelTable kAvx2Table = {Isa::Avx2,      dot_avx2,      sum_avx2,
                                sum_sq_dev_avx2, abs_diff_avx2, dot_rows_avx2};

}  // namespace quip::kernels::detail
