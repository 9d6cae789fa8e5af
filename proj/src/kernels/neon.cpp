#include <arm_neon.h>

#include <cmath>

#include "variants.hpp"

namespace quip::kernels::detail {
namespace {

double dot_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
  }
  double acc = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double sum_neon(const double* x, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) acc = vaddq_f64(acc, vld1q_f64(x + i));
  double s = vaddvq_f64(acc);
  for (; i < n; ++i) s += x[i];
  return s;
}

double sum_sq_dev_neon(const double* x, std::size_t n, double center) {
  const float64x2_t c = vdupq_n_f64(center);
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t d = vsubq_f64(vld1q_f64(x + i), c);
    acc = vfmaq_f64(acc, d, d);
  }
  double s = vaddvq_f64(acc);
  for (; i < n; ++i) {
    double d = x[i] - center;
    s += d * d;
  }
  return s;
}

void abs_diff_neon(const double* x, std::size_t n, double* out) {
  if (n < 2) return;
  const std::size_t m = n - 1;
  std::size_t i = 0;
  for (; i + 2 <= m; i += 2) {
    vst1q_f64(out + i, vabdq_f64(vld1q_f64(x + i + 1), vld1q_f64(x + i)));
  }
  for (; i < m; ++i) out[i] = std::fabs(x[i + 1] - x[i]);
}

void dot_rows_neon(const double* rows, std::size_t count, std::size_t dim, const double* query,
                   double* out) {
  for (std::size_t r = 0; r < count; ++r) out[r] = dot_neon(rows + r * dim, query, dim);
}

}  // namespace

const KernelTable kNeonTable = {Isa::Neon,      dot_neon,      sum_neon,
                                sum_sq_dev_neon, abs_diff_neon, dot_rows_neon};

}  // namespace quip::kernels::detail
