#include <immintrin.h>

#include <algorithm>
#include <cmath>

#include "odepth/kernels.hpp"

namespace odepth::kernels::avx2 {

void axpy(double a, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
    _mm256_storeu_pd(y + i, vy);
  }
  for (; i < n; ++i) y[i] = std::fma(a, x[i], y[i]);
}

double max_scaled_error(const double* err, const double* y0, const double* y1, std::size_t n, double atol,
                        double rtol) {
  const __m256d sign = _mm256_set1_pd(-0.0);
  const __m256d va = _mm256_set1_pd(atol), vr = _mm256_set1_pd(rtol);
  __m256d vmax = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d a0 = _mm256_andnot_pd(sign, _mm256_loadu_pd(y0 + i));
    const __m256d a1 = _mm256_andnot_pd(sign, _mm256_loadu_pd(y1 + i));
    const __m256d scale = _mm256_add_pd(va, _mm256_mul_pd(vr, _mm256_max_pd(a0, a1)));
    const __m256d e = _mm256_andnot_pd(sign, _mm256_loadu_pd(err + i));
    vmax = _mm256_max_pd(vmax, _mm256_div_pd(e, scale));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, vmax);
  double out = std::max(std::max(lanes[0], lanes[1]), std::max(lanes[2], lanes[3]));
  for (; i < n; ++i) {
    const double scale = atol + rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
    out = std::max(out, std::abs(err[i]) / scale);
  }
  return out;
}

void outer_accumulate(const cplx* a, std::size_t na, const cplx* b, std::size_t nb, cplx* out) {
  const double* bd = reinterpret_cast<const double*>(b);
  for (std::size_t i = 0; i < na; ++i) {
    const double ar = a[i].real(), ai = a[i].imag();
    if (ar == 0.0 && ai == 0.0) continue;
    double* row = reinterpret_cast<double*>(out + i * nb);
    const __m256d vr = _mm256_set1_pd(ar), vi = _mm256_set1_pd(ai);
    std::size_t j = 0;
    for (; j + 2 <= nb; j += 2) {
      const __m256d vb = _mm256_loadu_pd(bd + 2 * j);
      const __m256d swapped = _mm256_permute_pd(vb, 0b0101);
      // (ar br - ai bi, ar bi + ai br) in each complex lane.
      const __m256d prod = _mm256_addsub_pd(_mm256_mul_pd(vr, vb), _mm256_mul_pd(vi, swapped));
      _mm256_storeu_pd(row + 2 * j, _mm256_add_pd(_mm256_loadu_pd(row + 2 * j), prod));
    }
    for (; j < nb; ++j) {
      const double br = b[j].real(), bi = b[j].imag();
      out[i * nb + j] = cplx(out[i * nb + j].real() + (ar * br - ai * bi), out[i * nb + j].imag() + (ar * bi + ai * br));
    }
  }
}

}  // namespace odepth::kernels::avx2
