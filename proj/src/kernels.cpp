#include "avi/kernels.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace avi::kernels {

bool avx2_available() {
#if defined(AVI_KERNELS_HAVE_AVX2) && (defined(__x86_64__) || defined(__i386__))
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

namespace {

const Table kScalar{detail::matvec_bias_scalar, detail::axpy_scalar, "scalar"};
const Table kAvx2{detail::matvec_bias_avx2, detail::axpy_avx2, "avx2"};

Table g_active = [] {
    const char* env = std::getenv("AVI_KERNELS");
    std::string want = env ? env : "auto";
    if (want == "scalar") return kScalar;
    if (want == "avx2" && avx2_available()) return kAvx2;
    if (want == "avx2") return kScalar;  // requested but unsupported
    return avx2_available() ? kAvx2 : kScalar;
}();

}  // namespace

const Table& active() { return g_active; }

void select(std::string_view name) {
    if (name == "scalar") {
        g_active = kScalar;
    } else if (name == "avx2") {
        if (!avx2_available()) throw std::runtime_error("avx2 kernels not supported on this CPU");
        g_active = kAvx2;
    } else if (name == "auto") {
        g_active = avx2_available() ? kAvx2 : kScalar;
    } else {
        throw std::runtime_error("unknown kernel backend: " + std::string(name));
    }
}

void tanh_inplace(double* x, int n) {
    for (int i = 0; i < n; ++i) x[i] = std::tanh(x[i]);
}

}  // namespace avi::kernels
