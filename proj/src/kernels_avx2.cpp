// AVX2+FMA variants. This translation unit is the only one compiled with
// -mavx2 -mfma; callers reach it through the dispatch in kernels.cpp.

#include "qsens/kernels.hpp"

#ifdef QSENS_HAVE_AVX2

#include <immintrin.h>

namespace qsens::kernels::detail {

// Complex multiply-accumulate, two complex doubles per vector:
// lanes are [re0, im0, re1, im1]. For w = a * b,
//   re(w) = re(a) re(b) - im(a) im(b)
//   im(w) = re(a) im(b) + im(a) re(b)
// which fmaddsub produces from a broadcast (re_a, im_a) pair and a swapped b.
void cgemm_avx2(const std::complex<double>* a, const std::complex<double>* b,
                std::complex<double>* c, int n) {
    const double* bd = reinterpret_cast<const double*>(b);
    double* cd = reinterpret_cast<double*>(c);
    const int pairs = n / 2;

    for (int i = 0; i < n; ++i) {
        double* crow = cd + static_cast<std::size_t>(2 * i) * n;
        for (int j = 0; j < 2 * n; ++j) crow[j] = 0.0;
        const std::complex<double>* arow = a + static_cast<std::size_t>(i) * n;
        for (int k = 0; k < n; ++k) {
            const double ar = arow[k].real();
            const double ai = arow[k].imag();
            const __m256d var = _mm256_set1_pd(ar);
            const __m256d vai = _mm256_set1_pd(ai);
            const double* brow = bd + static_cast<std::size_t>(2 * k) * n;
            int j = 0;
            for (; j < pairs; ++j) {
                const __m256d vb = _mm256_loadu_pd(brow + 4 * j);
                const __m256d vbsw = _mm256_permute_pd(vb, 0x5); // [im0, re0, im1, re1]
                const __m256d t = _mm256_mul_pd(vai, vbsw);
                const __m256d w = _mm256_fmaddsub_pd(var, vb, t);
                const __m256d acc = _mm256_loadu_pd(crow + 4 * j);
                _mm256_storeu_pd(crow + 4 * j, _mm256_add_pd(acc, w));
            }
            if (n & 1) { // odd trailing complex element
                const double br = brow[2 * n - 2];
                const double bi = brow[2 * n - 1];
                crow[2 * n - 2] += ar * br - ai * bi;
                crow[2 * n - 1] += ar * bi + ai * br;
            }
        }
    }
}

void daxpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d vy = _mm256_loadu_pd(y + i);
        const __m256d vx = _mm256_loadu_pd(x + i);
        _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, vx, vy));
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

} // namespace qsens::kernels::detail

#endif // QSENS_HAVE_AVX2
