#pragma once

#include <complex>
#include <cstddef>
#include <string>

/// Floating-point inner loops of the numeric modules, with a portable scalar
/// implementation and an AVX2 one selected at runtime.
namespace odepth::kernels {

enum class Isa { Scalar, Avx2 };

std::string to_string(Isa isa);

/// True when the CPU supports AVX2 and FMA.
bool avx2_available();

/// The implementation currently used by the dispatching entry points.
Isa active_isa();

/// Selects an implementation; throws DomainError if the CPU lacks it.
void set_isa(Isa isa);

using cplx = std::complex<double>;

/// y += a * x.
void axpy(double a, const double* x, double* y, std::size_t n);

/// max_i |err_i| / (atol + rtol * max(|y0_i|, |y1_i|)).
double max_scaled_error(const double* err, const double* y0, const double* y1, std::size_t n, double atol,
                        double rtol);

/// out[i * nb + j] += a[i] * b[j].
void outer_accumulate(const cplx* a, std::size_t na, const cplx* b, std::size_t nb, cplx* out);

namespace scalar {
void axpy(double a, const double* x, double* y, std::size_t n);
double max_scaled_error(const double* err, const double* y0, const double* y1, std::size_t n, double atol,
                        double rtol);
void outer_accumulate(const cplx* a, std::size_t na, const cplx* b, std::size_t nb, cplx* out);
}  // namespace scalar

namespace avx2 {
void axpy(double a, const double* x, double* y, std::size_t n);
double max_scaled_error(const double* err, const double* y0, const double* y1, std::size_t n, double atol,
                        double rtol);
void outer_accumulate(const cplx* a, std::size_t na, const cplx* b, std::size_t nb, cplx* out);
}  // namespace avx2

}  // namespace odepth::kernels
