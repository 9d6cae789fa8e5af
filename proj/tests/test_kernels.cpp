#include <doctest.h>

#include <cmath>
#include <iostream>

#include "quip/kernels.hpp"
#include "support.hpp"

using namespace quip::kernels;

namespace {

// Reordered summation differs from the scalar loop by rounding only; bound
// the gap by a few ulps of the absolute-value sum.
double tolerance(const std::vector<double>& terms) {
  double s = 0;
  for (double t : terms) s += std::fabs(t);
  return 1e-13 * (s + 1.0);
}

std::vector<double> random_vec(qt::Rng& rng, std::size_t n) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform(-100, 100);
  return v;
}

void check_equivalent(const KernelTable& ref, const KernelTable& simd) {
  qt::Rng rng(41);
  for (int trial = 0; trial < 400; ++trial) {
    std::size_t n = rng.range(0, 70);
    auto a = random_vec(rng, n), b = random_vec(rng, n);
    std::vector<double> prods(n);
    for (std::size_t i = 0; i < n; ++i) prods[i] = a[i] * b[i];
    CHECK(std::fabs(ref.dot(a.data(), b.data(), n) - simd.dot(a.data(), b.data(), n)) <= tolerance(prods));
    CHECK(std::fabs(ref.sum(a.data(), n) - simd.sum(a.data(), n)) <= tolerance(a));
    double c = rng.uniform(-5, 5);
    std::vector<double> sq(n);
    for (std::size_t i = 0; i < n; ++i) sq[i] = (a[i] - c) * (a[i] - c);
    CHECK(std::fabs(ref.sum_sq_dev(a.data(), n, c) - simd.sum_sq_dev(a.data(), n, c)) <= tolerance(sq));
    if (n >= 2) {
      std::vector<double> o1(n - 1), o2(n - 1);
      ref.abs_diff(a.data(), n, o1.data());
      simd.abs_diff(a.data(), n, o2.data());
      CHECK(o1 == o2);  // elementwise, no reassociation
    }
    std::size_t dim = rng.range(1, 33), rows = rng.range(0, 9);
    auto m = random_vec(rng, dim * rows), q = random_vec(rng, dim);
    std::vector<double> r1(rows), r2(rows);
    ref.dot_rows(m.data(), rows, dim, q.data(), r1.data());
    simd.dot_rows(m.data(), rows, dim, q.data(), r2.data());
    for (std::size_t r = 0; r < rows; ++r) {
      std::vector<double> p(dim);
      for (std::size_t i = 0; i < dim; ++i) p[i] = m[r * dim + i] * q[i];
      CHECK(std::fabs(r1[r] - r2[r]) <= tolerance(p));
    }
  }
}

}  // namespace

TEST_CASE("scalar reference kernels against hand results") {
  const auto& s = scalar_table();
  double a[] = {1, 2, 3, 4, 5};
  double b[] = {2, 0, -1, 1, 0.5};
  CHECK(s.dot(a, b, 5) == 5.5);
  CHECK(s.sum(a, 5) == 15);
  CHECK(s.sum_sq_dev(a, 5, 3) == 10);
  double out[4];
  s.abs_diff(b, 5, out);
  CHECK(out[0] == 2);
  CHECK(out[1] == 1);
  CHECK(out[2] == 2);
  CHECK(out[3] == 0.5);
  CHECK(s.dot(a, b, 0) == 0);
}

TEST_CASE("vector variants match the scalar reference") {
  bool any = false;
  for (Isa isa : {Isa::Avx2, Isa::Neon}) {
    const KernelTable* t = table_for(isa);
    if (!t) {
      MESSAGE("kernel variant ", std::string(to_string(isa)), " not available here, skipped");
      continue;
    }
    any = true;
    CHECK(t->isa == isa);
    check_equivalent(scalar_table(), *t);
  }
  if (!any) MESSAGE("no vector variant on this CPU; only the scalar path was exercised");
}

TEST_CASE("active table is usable and span wrappers forward to it") {
  const auto& t = active();
  CHECK(table_for(t.isa) != nullptr);
  std::vector<double> a{1, 2, 3}, b{4, 5, 6};
  CHECK(dot(a, b) == doctest::Approx(32));
  CHECK(sum(a) == doctest::Approx(6));
}
