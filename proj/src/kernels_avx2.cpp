#include "avi/kernels.hpp"

#if defined(__AVX2__) && defined(__FMA__)
#include <immintrin.h>

namespace avi::kernels::detail {

namespace {
inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d shuf = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, shuf));
}
}  // namespace

void matvec_bias_avx2(const double* W, const double* x, const double* b,
                      double* y, int rows, int cols) {
    int tail = cols & 3;
    int main = cols - tail;
    for (int r = 0; r < rows; ++r) {
        const double* row = W + static_cast<long>(r) * cols;
        __m256d acc = _mm256_setzero_pd();
        for (int c = 0; c < main; c += 4) {
            __m256d wv = _mm256_loadu_pd(row + c);
            __m256d xv = _mm256_loadu_pd(x + c);
            acc = _mm256_fmadd_pd(wv, xv, acc);
        }
        double s = hsum(acc);
        for (int c = main; c < cols; ++c) s += row[c] * x[c];
        y[r] = s + b[r];
    }
}

void axpy_avx2(int n, double a, const double* x, double* y) {
    __m256d av = _mm256_set1_pd(a);
    int main = n & ~3;
    for (int i = 0; i < main; i += 4) {
        __m256d yv = _mm256_loadu_pd(y + i);
        __m256d xv = _mm256_loadu_pd(x + i);
        _mm256_storeu_pd(y + i, _mm256_fmadd_pd(av, xv, yv));
    }
    for (int i = main; i < n; ++i) y[i] += a * x[i];
}

}  // namespace avi::kernels::detail

#else

namespace avi::kernels::detail {

void matvec_bias_avx2(const double* W, const double* x, const double* b,
                      double* y, int rows, int cols) {
    matvec_bias_scalar(W, x, b, y, rows, cols);
}

void axpy_avx2(int n, double a, const double* x, double* y) {
    axpy_scalar(n, a, x, y);
}

}  // namespace avi::kernels::detail

#endif
