#include "doctest.h"

#include <cstring>
#include <vector>

#include "ect/kernels.hpp"
#include "ect/rng.hpp"

using namespace ect;

namespace {

std::vector<double> random_vec(Rng& rng, std::size_t n) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.normal() * 3.0;
  return v;
}

double naive_dot(const std::vector<double>& a, const std::vector<double>& b) {
  long double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += static_cast<long double>(a[i]) * b[i];
  return static_cast<double>(s);
}

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("scalar kernels agree with a naive oracle") {
  Rng rng(1);
  for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 7u, 8u, 17u, 64u, 1001u}) {
    const auto a = random_vec(rng, n), b = random_vec(rng, n);
    CHECK(kernels::scalar::dot(a.data(), b.data(), n) == doctest::Approx(naive_dot(a, b)).epsilon(1e-12));
    long double s = 0;
    for (double x : a) s += x;
    CHECK(kernels::scalar::sum(a.data(), n) == doctest::Approx(static_cast<double>(s)).epsilon(1e-12));
    auto y = b;
    kernels::scalar::axpy(0.5, a.data(), y.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(y[i] == b[i] + 0.5 * a[i]);
  }
}

#if defined(ECT_HAVE_AVX2)
TEST_CASE("avx2 kernels are bit-identical to scalar") {
  if (!kernels::isa_available(kernels::Isa::Avx2)) return;
  Rng rng(2);
  for (std::size_t n = 0; n <= 130; ++n) {
    const auto a = random_vec(rng, n), b = random_vec(rng, n);
    const double ds = kernels::scalar::dot(a.data(), b.data(), n);
    const double dv = kernels::avx2::dot(a.data(), b.data(), n);
    CHECK(std::memcmp(&ds, &dv, sizeof ds) == 0);
    const double ss = kernels::scalar::sum(a.data(), n);
    const double sv = kernels::avx2::sum(a.data(), n);
    CHECK(std::memcmp(&ss, &sv, sizeof ss) == 0);
    auto ys = b, yv = b;
    kernels::scalar::axpy(-1.25, a.data(), ys.data(), n);
    kernels::avx2::axpy(-1.25, a.data(), yv.data(), n);
    CHECK(std::memcmp(ys.data(), yv.data(), n * sizeof(double)) == 0);
  }
}
#endif

TEST_CASE("dispatch follows the selected isa") {
  const kernels::Isa before = kernels::active_isa();
  kernels::select_isa(kernels::Isa::Scalar);
  CHECK(kernels::active_isa() == kernels::Isa::Scalar);
  CHECK(kernels::isa_name(kernels::Isa::Scalar) == "scalar");
  const std::vector<double> a{1, 2, 3, 4, 5}, b{5, 4, 3, 2, 1};
  CHECK(kernels::dot(a.data(), b.data(), a.size()) == 35.0);
  CHECK(kernels::sum(a.data(), a.size()) == 15.0);
  if (kernels::isa_available(kernels::Isa::Avx2)) {
    kernels::select_isa(kernels::Isa::Avx2);
    CHECK(kernels::active_isa() == kernels::Isa::Avx2);
    CHECK(kernels::dot(a.data(), b.data(), a.size()) == 35.0);
  }
  kernels::select_isa(before);
}

}  // TEST_SUITE
