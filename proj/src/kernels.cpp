#include "odepth/kernels.hpp"

#include <atomic>

#include "odepth/error.hpp"

namespace odepth::kernels {

namespace {

bool detect_avx2() {
#if defined(__x86_64__) || defined(__i386__)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{detect_avx2() ? Isa::Avx2 : Isa::Scalar};
  return isa;
}

}  // namespace

std::string to_string(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

bool avx2_available() {
  static const bool available = detect_avx2();
  return available;
}

Isa active_isa() { return current().load(std::memory_order_relaxed); }

void set_isa(Isa isa) {
  if (isa == Isa::Avx2 && !avx2_available()) throw DomainError("AVX2 kernels are not supported on this CPU");
  current().store(isa, std::memory_order_relaxed);
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  if (active_isa() == Isa::Avx2) return avx2::axpy(a, x, y, n);
  scalar::axpy(a, x, y, n);
}

double max_scaled_error(const double* err, const double* y0, const double* y1, std::size_t n, double atol,
                        double rtol) {
  if (active_isa() == Isa::Avx2) return avx2::max_scaled_error(err, y0, y1, n, atol, rtol);
  return scalar::max_scaled_error(err, y0, y1, n, atol, rtol);
}

void outer_accumulate(const cplx* a, std::size_t na, const cplx* b, std::size_t nb, cplx* out) {
  if (active_isa() == Isa::Avx2) return avx2::outer_accumulate(a, na, b, nb, out);
  scalar::outer_accumulate(a, na, b, nb, out);
}

}  // namespace odepth::kernels
