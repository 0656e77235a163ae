#include "gstate/kernels.hpp"

namespace gstate::kernels {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void xpay_scalar(const double* x, double beta, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + beta * y[i];
}

void mul_scalar(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

void stencil5_scalar(const double* in, const double* diag, const double* off, double* out,
                     std::size_t begin, std::size_t end, std::size_t stride) {
  for (std::size_t k = begin; k < end; ++k) {
    const double nb = in[k - 1] + in[k + 1] + in[k - stride] + in[k + stride];
    out[k] = diag[k] * in[k] - off[k] * nb;
  }
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{"scalar", dot_scalar, axpy_scalar, xpay_scalar, mul_scalar,
                                 stencil5_scalar};
  return table;
}

}  // namespace gstate::kernels
