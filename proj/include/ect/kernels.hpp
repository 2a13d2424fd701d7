#pragma once

// Dense vector kernels used by the learners. Each has a portable scalar
// variant and, on x86-64, an AVX2 variant picked at first use.

#include <cstddef>
#include <string_view>

namespace ect::kernels {

enum class Isa { Scalar, Avx2 };

double dot(const double* a, const double* b, std::size_t n);
// y += alpha * x
void axpy(double alpha, const double* x, double* y, std::size_t n);
double sum(const double* a, std::size_t n);

// Selected variant. ECT_SIMD=scalar|avx2 overrides detection; asking for
// avx2 on a machine without it falls back to scalar.
Isa active_isa();
std::string_view isa_name(Isa isa);
bool isa_available(Isa isa);
// Forces a variant (tests use this to compare implementations).
void select_isa(Isa isa);

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
double sum(const double* a, std::size_t n);
}  // namespace scalar

#if defined(ECT_HAVE_AVX2)
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
double sum(const double* a, std::size_t n);
}  // namespace avx2
#endif

}  // namespace ect::kernels
