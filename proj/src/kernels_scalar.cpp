#include "avi/kernels.hpp"

namespace avi::kernels::detail {

void matvec_bias_scalar(const double* W, const double* x, const double* b,
                        double* y, int rows, int cols) {
    for (int r = 0; r < rows; ++r) {
        const double* row = W + static_cast<long>(r) * cols;
        double acc = b[r];
        for (int c = 0; c < cols; ++c) acc += row[c] * x[c];
        y[r] = acc;
    }
}

void axpy_scalar(int n, double a, const double* x, double* y) {
    for (int i = 0; i < n; ++i) y[i] += a * x[i];
}

}  // namespace avi::kernels::detail
