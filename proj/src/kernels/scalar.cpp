#include <cmath>

#include "variants.hpp"

namespace quip::kernels::detail {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double sum_scalar(const double* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i];
  return acc;
}

double sum_sq_dev_scalar(const double* x, std::size_t n, double center) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double d = x[i] - center;
    acc += d * d;
  }
  return acc;
}

void abs_diff_scalar(const double* x, std::size_t n, double* out) {
  for (std::size_t i = 0; i + 1 < n; ++i) out[i] = std::fabs(x[i + 1] - x[i]);
}

void dot_rows_scalar(const double* rows, std::size_t count, std::size_t dim, const double* query,
                     double* out) {
  for (std::size_t r = 0; r < count; ++r) out[r] = dot_scalar(rows + r * dim, query, dim);
}

}  // namespace

const KernelTable kScalarTable = {Isa::Scalar,      dot_scalar,      sum_scalar,
                                  sum_sq_dev_scalar, abs_diff_scalar, dot_rows_scalar};

}  // namespace quip::kernels::detail
