#include "qsens/kernels.hpp"

#include <atomic>

namespace qsens::kernels {

namespace detail {

void cgemm_scalar(const std::complex<double>* a, const std::complex<double>* b,
                  std::complex<double>* c, int n) {
    for (int i = 0; i < n; ++i) {
        std::complex<double>* crow = c + static_cast<std::size_t>(i) * n;
        for (int j = 0; j < n; ++j) crow[j] = {0.0, 0.0};
        const std::complex<double>* arow = a + static_cast<std::size_t>(i) * n;
        for (int k = 0; k < n; ++k) {
            const std::complex<double> aik = arow[k];
            if (aik.real() == 0.0 && aik.imag() == 0.0) continue;
            const std::complex<double>* brow = b + static_cast<std::size_t>(k) * n;
            for (int j = 0; j < n; ++j) crow[j] += aik * brow[j];
        }
    }
}

void daxpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

} // namespace detail

namespace {

bool detect_avx2() {
#if defined(QSENS_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

std::atomic<Backend> g_backend{detect_avx2() ? Backend::avx2 : Backend::scalar};

} // namespace

bool avx2_available() { return detect_avx2(); }

Backend active_backend() { return g_backend.load(std::memory_order_relaxed); }

void set_backend(Backend b) {
    if (b == Backend::avx2 && !avx2_available()) b = Backend::scalar;
    g_backend.store(b, std::memory_order_relaxed);
}

void cgemm(const std::complex<double>* a, const std::complex<double>* b,
           std::complex<double>* c, int n) {
#ifdef QSENS_HAVE_AVX2
    if (active_backend() == Backend::avx2) {
        detail::cgemm_avx2(a, b, c, n);
        return;
    }
#endif
    detail::cgemm_scalar(a, b, c, n);
}

void daxpy(double alpha, const double* x, double* y, std::size_t n) {
#ifdef QSENS_HAVE_AVX2
    if (active_backend() == Backend::avx2) {
        detail::daxpy_avx2(alpha, x, y, n);
        return;
    }
#endif
    detail::daxpy_scalar(alpha, x, y, n);
}

} // namespace qsens::kernels
