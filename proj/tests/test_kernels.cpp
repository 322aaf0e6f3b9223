#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "avi/kernels.hpp"
#include "doctest.h"

using namespace avi;

TEST_CASE("matvec_bias scalar reference") {
    std::vector<double> W{1, 2, 3, 4, 5, 6};
    std::vector<double> x{1, -1, 2};
    std::vector<double> b{0.5, -0.5};
    std::vector<double> y(2, 0.0);
    kernels::detail::matvec_bias_scalar(W.data(), x.data(), b.data(), y.data(), 2, 3);
    CHECK(y[0] == doctest::Approx(1 - 2 + 6 + 0.5));
    CHECK(y[1] == doctest::Approx(4 - 5 + 12 - 0.5));
}

TEST_CASE("avx2 variants match scalar within rounding") {
    if (!kernels::avx2_available()) return;
    std::mt19937_64 rng(7);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        int rows = 1 + static_cast<int>(rng() % 40);
        int cols = 1 + static_cast<int>(rng() % 40);
        std::vector<double> W(rows * cols), x(cols), b(rows);
        for (auto& v : W) v = g(rng);
        for (auto& v : x) v = g(rng);
        for (auto& v : b) v = g(rng);
        std::vector<double> ys(rows), yv(rows);
        kernels::detail::matvec_bias_scalar(W.data(), x.data(), b.data(), ys.data(), rows, cols);
        kernels::detail::matvec_bias_avx2(W.data(), x.data(), b.data(), yv.data(), rows, cols);
        for (int r = 0; r < rows; ++r) CHECK(ys[r] == doctest::Approx(yv[r]).epsilon(1e-12));

        std::vector<double> as(x), av(x);
        double alpha = g(rng);
        std::vector<double> d(cols);
        for (auto& v : d) v = g(rng);
        kernels::detail::axpy_scalar(cols, alpha, d.data(), as.data());
        kernels::detail::axpy_avx2(cols, alpha, d.data(), av.data());
        for (int i = 0; i < cols; ++i) CHECK(as[i] == doctest::Approx(av[i]).epsilon(1e-13));
    }
}

TEST_CASE("backend selection") {
    std::string original = kernels::active().name;
    kernels::select("scalar");
    CHECK(std::string(kernels::active().name) == "scalar");
    if (kernels::avx2_available()) {
        kernels::select("avx2");
        CHECK(std::string(kernels::active().name) == "avx2");
    }
    CHECK_THROWS(kernels::select("sse9"));
    kernels::select(original);
}
