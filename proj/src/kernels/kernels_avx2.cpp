// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.
#include "gstate/kernels.hpp"

#include <immintrin.h>

namespace gstate::kernels {
namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4)
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void xpay_avx2(const double* x, double beta, double* y, std::size_t n) {
  const __m256d vb = _mm256_set1_pd(beta);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(vb, _mm256_loadu_pd(y + i), _mm256_loadu_pd(x + i)));
  for (; i < n; ++i) y[i] = x[i] + beta * y[i];
}

void mul_avx2(const double* a, const double* b, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  for (; i < n; ++i) out[i] = a[i] * b[i];
}

void stencil5_avx2(const double* in, const double* diag, const double* off, double* out,
                   std::size_t begin, std::size_t end, std::size_t stride) {
  std::size_t k = begin;
  for (; k + 4 <= end; k += 4) {
    __m256d nb = _mm256_add_pd(_mm256_loadu_pd(in + k - 1), _mm256_loadu_pd(in + k + 1));
    nb = _mm256_add_pd(nb, _mm256_loadu_pd(in + k - stride));
    nb = _mm256_add_pd(nb, _mm256_loadu_pd(in + k + stride));
    const __m256d center = _mm256_mul_pd(_mm256_loadu_pd(diag + k), _mm256_loadu_pd(in + k));
    // diag*in - off*nb, matching the scalar evaluation order up to FMA rounding
    _mm256_storeu_pd(out + k, _mm256_fnmadd_pd(_mm256_loadu_pd(off + k), nb, center));
  }
  for (; k < end; ++k) {
    const double nb = in[k - 1] + in[k + 1] + in[k - stride] + in[k + stride];
    out[k] = diag[k] * in[k] - off[k] * nb;
  }
}

}  // namespace

const KernelTable& avx2_table_impl() {
  static const KernelTable table{"avx2", dot_avx2, axpy_avx2, xpay_avx2, mul_avx2, stencil5_avx2};
  return table;
}

}  // namespace gstate::kernels
