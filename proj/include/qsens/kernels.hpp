#pragma once

#include <complex>
#include <cstddef>

// Arithmetic kernels behind the dense-matrix layer. Each kernel has a scalar
// reference implementation and, on x86-64 with AVX2+FMA, a vectorized variant;
// the active one is picked once at startup from CPU capabilities and can be
// overridden for equivalence testing.
namespace qsens::kernels {

enum class Backend { scalar, avx2 };

// backend selected at startup (avx2 when the CPU supports it)
Backend active_backend();

// override the dispatch; requesting avx2 on unsupported hardware keeps scalar
void set_backend(Backend b);

// true when the avx2 variants exist in this build and the CPU can run them
bool avx2_available();

// C = A * B for n x n row-major complex matrices; C must not alias A or B.
void cgemm(const std::complex<double>* a, const std::complex<double>* b,
           std::complex<double>* c, int n);

// y += alpha * x over n doubles (complex buffers are viewed as 2n doubles)
void daxpy(double alpha, const double* x, double* y, std::size_t n);

namespace detail {
void cgemm_scalar(const std::complex<double>* a, const std::complex<double>* b,
                  std::complex<double>* c, int n);
void daxpy_scalar(double alpha, const double* x, double* y, std::size_t n);
#ifdef QSENS_HAVE_AVX2
void cgemm_avx2(const std::complex<double>* a, const std::complex<double>* b,
                std::complex<double>* c, int n);
void daxpy_avx2(double alpha, const double* x, double* y, std::size_t n);
#endif
} // namespace detail

} // namespace qsens::kernels
