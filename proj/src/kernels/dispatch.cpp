#include <cassert>
#include <cstdlib>
#include <string_view>

#include "variants.hpp"

namespace quip::kernels {
namespace {

bool cpu_has(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return true;
    case Isa::Avx2:
#if defined(__x86_64__) || defined(_M_X64)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Isa::Neon:
#if defined(__aarch64__)
      return true;
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& choose() {
  const char* forced = std::getenv("QUIP_KERNELS");
  if (forced && std::string_view(forced) == "scalar") return detail::kScalarTable;
  for (Isa isa : {Isa::Avx2, Isa::Neon}) {
    if (const KernelTable* t = table_for(isa)) return *t;
  }
  return detail::kScalarTable;
}

}  // namespace

std::string_view to_string(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
    case Isa::Neon: return "neon";
  }
  return "?";
}

const KernelTable& scalar_table() { return detail::kScalarTable; }

const KernelTable* table_for(Isa isa) {
  if (!cpu_has(isa)) return nullptr;
  switch (isa) {
    case Isa::Scalar: return &detail::kScalarTable;
    case Isa::Avx2:
#if defined(__x86_64__) || defined(_M_X64)
      return &detail::kAvx2Table;
#else
      return nullptr;
#endif
    case Isa::Neon:
#if defined(__aarch64__)
      return &detail::kNeonTable;
#else
      return nullptr;
#endif
  }
  return nullptr;
}

const KernelTable& active() {
  static const KernelTable& table = choose();
  return table;
}

double dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  return active().dot(a.data(), b.data(), a.size());
}

double sum(std::span<const double> x) { return active().sum(x.data(), x.size()); }

double sum_sq_dev(std::span<const double> x, double center) {
  return active().sum_sq_dev(x.data(), x.size(), center);
}

void abs_diff(std::span<const double> x, std::span<double> out) {
  assert(x.empty() || out.size() + 1 >= x.size());
  active().abs_diff(x.data(), x.size(), out.data());
}

void dot_rows(std::span<const double> rows, std::size_t dim, std::span<const double> query,
              std::span<double> out) {
  assert(dim == query.size());
  assert(dim == 0 || rows.size() == out.size() * dim);
  active().dot_rows(rows.data(), out.size(), dim, query.data(), out.data());
}

}  // namespace quip::kernels
