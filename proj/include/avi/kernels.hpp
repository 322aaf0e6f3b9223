#pragma once

#include <string_view>

namespace avi::kernels {

// y = W x + b with W row-major (rows x cols).
using MatvecBiasFn = void (*)(const double* W, const double* x, const double* b,
                              double* y, int rows, int cols);
// y += a * x
using AxpyFn = void (*)(int n, double a, const double* x, double* y);

struct Table {
    MatvecBiasFn matvec_bias;
    AxpyFn axpy;
    const char* name;
};

// Active backend, selected once per process: AVI_KERNELS=scalar|avx2|auto
// overrides the CPUID-based default.
const Table& active();

// Forces a backend by name ("scalar", "avx2", "auto"); throws on unknown name
// or unsupported CPU. Intended for tests and benchmarking.
void select(std::string_view name);

bool avx2_available();

namespace detail {
void matvec_bias_scalar(const double* W, const double* x, const double* b,
                        double* y, int rows, int cols);
void axpy_scalar(int n, double a, const double* x, double* y);
void matvec_bias_avx2(const double* W, const double* x, const double* b,
                      double* y, int rows, int cols);
void axpy_avx2(int n, double a, const double* x, double* y);
}  // namespace detail

inline void matvec_bias(const double* W, const double* x, const double* b,
                        double* y, int rows, int cols) {
    active().matvec_bias(W, x, b, y, rows, cols);
}

inline void axpy(int n, double a, const double* x, double* y) {
    active().axpy(n, a, x, y);
}

// tanh stays scalar in every backend so variants differ only by the matvec
// summation order.
void tanh_inplace(double* x, int n);

}  // namespace avi::kernels
