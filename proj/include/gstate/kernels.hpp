#pragma once
// Data-parallel inner loops of the 2D solver.
//
// Every kernel has a scalar reference implementation and, on x86-64, an
// AVX2/FMA variant. The active table is chosen once at startup from CPU
// features; GSTATE_SIMD=scalar|avx2|auto overrides the choice.

#include <cstddef>
#include <span>
#include <string_view>

namespace gstate::kernels {

struct KernelTable {
  std::string_view name;
  // sum a[i]*b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y += alpha*x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // y = x + beta*y
  void (*xpay)(const double* x, double beta, double* y, std::size_t n);
  // out = a*b (elementwise)
  void (*mul)(const double* a, const double* b, double* out, std::size_t n);
  // Five-point stencil on a padded row-major grid of row length `stride`:
  //   out[k] = diag[k]*in[k] - off[k]*(in[k-1] + in[k+1] + in[k-stride] + in[k+stride])
  // for k in [begin, end). Requires begin >= stride and end + stride <= array size.
  void (*stencil5)(const double* in, const double* diag, const double* off, double* out,
                   std::size_t begin, std::size_t end, std::size_t stride);
};

const KernelTable& scalar_table();
// nullptr when the build or the CPU lacks AVX2+FMA.
const KernelTable* avx2_table();

// Table selected for this process (honours GSTATE_SIMD).
const KernelTable& active();

// Convenience wrappers over active().
double dot(std::span<const double> a, std::span<const double> b);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void xpay(std::span<const double> x, double beta, std::span<double> y);
void mul(std::span<const double> a, std::span<const double> b, std::span<double> out);

}  // namespace gstate::kernels
