#include <cstring>
#include <random>

#include "doctest.h"
#include "rsbarrier/aligned.hpp"
#include "rsbarrier/simd.hpp"

using namespace rsb;

namespace {

CVector random_vector(std::size_t n, std::mt19937_64& g) {
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  CVector v(n);
  for (auto& z : v) z = cplx(u(g), u(g));
  return v;
}

bool same_bits(const CVector& a, const CVector& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(cplx)) == 0;
}

}  // namespace

TEST_CASE("AVX2 kernels match the scalar kernels bit for bit") {
  const auto& S = simd::scalar_kernels();
  const auto& V = simd::avx2_kernels();
  if (!simd::cpu_has_avx2()) MESSAGE("CPU lacks AVX2; comparing the scalar fallback with itself");
  std::mt19937_64 g(7);
  for (std::size_t n : {0u, 1u, 2u, 3u, 7u, 8u, 64u, 1001u, 4096u}) {
    CVector a = random_vector(n, g), b = random_vector(n, g);
    cplx alpha(0.37, -1.21);

    CVector o1(n), o2(n);
    S.cmul(o1.data(), a.data(), b.data(), n);
    V.cmul(o2.data(), a.data(), b.data(), n);
    CHECK(same_bits(o1, o2));

    CVector y1 = a, y2 = a;
    S.caxpy(y1.data(), alpha, b.data(), n);
    V.caxpy(y2.data(), alpha, b.data(), n);
    CHECK(same_bits(y1, y2));

    y1 = a;
    y2 = a;
    S.scale_real(y1.data(), -0.7, n);
    V.scale_real(y2.data(), -0.7, n);
    CHECK(same_bits(y1, y2));

    y1 = a;
    y2 = a;
    S.cscale_add(y1.data(), alpha, b.data(), n);
    V.cscale_add(y2.data(), alpha, b.data(), n);
    CHECK(same_bits(y1, y2));

    if (n > 0) {
      double d1 = S.max_abs2_diff(a.data(), b.data(), n), d2 = V.max_abs2_diff(a.data(), b.data(), n);
      CHECK(std::memcmp(&d1, &d2, sizeof d1) == 0);
      double m1 = S.min_real_diff(a.data(), b.data(), n), m2 = V.min_real_diff(a.data(), b.data(), n);
      CHECK(std::memcmp(&m1, &m2, sizeof m1) == 0);
    }
  }
}

TEST_CASE("scalar kernels compute what they document") {
  const auto& S = simd::scalar_kernels();
  CVector a{cplx(1, 2), cplx(-3, 0.5)}, b{cplx(0.5, -1), cplx(2, 2)};
  CVector o(2);
  S.cmul(o.data(), a.data(), b.data(), 2);
  CHECK(std::abs(o[0] - a[0] * b[0]) < 1e-15);
  CHECK(std::abs(o[1] - a[1] * b[1]) < 1e-15);
  CHECK(S.max_abs2_diff(a.data(), b.data(), 2) == doctest::Approx(std::norm(a[1] - b[1])));
  CHECK(S.min_real_diff(a.data(), b.data(), 2) == doctest::Approx(-5.0));
  CHECK(std::string(simd::kernels().name).size() > 0);
}
