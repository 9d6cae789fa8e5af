#pragma once

#include <cstddef>
#include <span>
#include <string_view>

// Dense numeric inner loops. Every routine has a scalar reference
// implementation; vector variants are picked once at runtime from what the
// CPU supports. Setting QUIP_KERNELS=scalar forces the reference path.
namespace quip::kernels {

enum class Isa { Scalar, Avx2, Neon };

std::string_view to_string(Isa isa);

struct KernelTable {
  Isa isa;
  double (*dot)(const double* a, const double* b, std::size_t n);
  double (*sum)(const double* x, std::size_t n);
  // Sum of (x[i] - center)^2.
  double (*sum_sq_dev)(const double* x, std::size_t n, double center);
  // out[i] = |x[i + 1] - x[i]| for i < n - 1.
  void (*abs_diff)(const double* x, std::size_t n, double* out);
  // For each of `rows` contiguous rows of length `dim`, out[r] = row . query.
  void (*dot_rows)(const double* rows, std::size_t count, std::size_t dim, const double* query,
                   double* out);
};

const KernelTable& scalar_table();
// nullptr when the variant is not compiled in or the CPU lacks it.
const KernelTable* table_for(Isa isa);
const KernelTable& active();

// Convenience wrappers over active().
double dot(std::span<const double> a, std::span<const double> b);
double sum(std::span<const double> x);
double sum_sq_dev(std::span<const double> x, double center);
void abs_diff(std::span<const double> x, std::span<double> out);
void dot_rows(std::span<const double> rows, std::size_t dim, std::span<const double> query,
              std::span<double> out);

}  // namespace quip::kernels
