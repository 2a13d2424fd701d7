#include <atomic>
#include <cstdlib>
#include <string>

#include "ect/kernels.hpp"

namespace ect::kernels {

namespace {

struct Table {
  double (*dot)(const double*, const double*, std::size_t);
  void (*axpy)(double, const double*, double*, std::size_t);
  double (*sum)(const double*, std::size_t);
};

constexpr Table kScalar{scalar::dot, scalar::axpy, scalar::sum};
#if defined(ECT_HAVE_AVX2)
constexpr Table kAvx2{avx2::dot, avx2::axpy, avx2::sum};
#endif

Isa detect() {
  Isa want = isa_available(Isa::Avx2) ? Isa::Avx2 : Isa::Scalar;
  if (const char* env = std::getenv("ECT_SIMD")) {
    const std::string v(env);
    if (v == "scalar") want = Isa::Scalar;
    else if (v == "avx2" && isa_available(Isa::Avx2)) want = Isa::Avx2;
  }
  return want;
}

std::atomic<const Table*>& current() {
  static std::atomic<const Table*> table{nullptr};
  return table;
}

const Table* table_for(Isa isa) {
#if defined(ECT_HAVE_AVX2)
  if (isa == Isa::Avx2) return &kAvx2;
#endif
  (void)isa;
  return &kScalar;
}

const Table& get() {
  const Table* t = current().load(std::memory_order_acquire);
  if (!t) {
    t = table_for(detect());
    current().store(t, std::memory_order_release);
  }
  return *t;
}

}  // namespace

bool isa_available(Isa isa) {
  if (isa == Isa::Scalar) return true;
#if defined(ECT_HAVE_AVX2)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Isa active_isa() {
#if defined(ECT_HAVE_AVX2)
  return &get() == &kAvx2 ? Isa::Avx2 : Isa::Scalar;
#else
  return Isa::Scalar;
#endif
}

std::string_view isa_name(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

void select_isa(Isa isa) {
  current().store(table_for(isa_available(isa) ? isa : Isa::Scalar), std::memory_order_release);
}

double dot(const double* a, const double* b, std::size_t n) { return get().dot(a, b, n); }
void axpy(double alpha, const double* x, double* y, std::size_t n) { get().axpy(alpha, x, y, n); }
double sum(const double* a, std::size_t n) { return get().sum(a, n); }

}  // namespace ect::kernels
