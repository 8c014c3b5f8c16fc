#include <algorithm>
#include <cmath>

#include "odepth/kernels.hpp"

namespace odepth::kernels::scalar {

void axpy(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

double max_scaled_error(const double* err, const double* y0, const double* y1, std::size_t n, double atol,
                        double rtol) {
  double out = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double scale = atol + rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
    out = std::max(out, std::abs(err[i]) / scale);
  }
  return out;
}

void outer_accumulate(const cplx* a, std::size_t na, const cplx* b, std::size_t nb, cplx* out) {
  for (std::size_t i = 0; i < na; ++i) {
    const double ar = a[i].real(), ai = a[i].imag();
    if (ar == 0.0 && ai == 0.0) continue;
    cplx* row = out + i * nb;
    for (std::size_t j = 0; j < nb; ++j) {
      const double br = b[j].real(), bi = b[j].imag();
      row[j] = cplx(row[j].real() + (ar * br - ai * bi), row[j].imag() + (ar * bi + ai * br));
    }
  }
}

}  // namespace odepth::kernels::scalar
