#include "avi/mlp_policy.hpp"

#include <cmath>
#include <stdexcept>

#include "avi/kernels.hpp"

namespace avi {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

MlpPolicy::MlpPolicy(MlpShape shape) : shape_(shape), theta_(shape.param_count(), 0.0) {
    int h = shape_.hidden, in = shape_.in, out = shape_.out;
    w1_ = 0;
    b1_ = w1_ + h * in;
    w2_ = b1_ + h;
    b2_ = w2_ + h * h;
    w3_ = b2_ + h;
    b3_ = w3_ + out * h;
}

void MlpPolicy::forward(std::span<const double> input, std::span<double> out,
                        MlpScratch& scratch) const {
    int h = shape_.hidden;
    if (static_cast<int>(input.size()) != shape_.in || static_cast<int>(out.size()) != shape_.out)
        throw std::invalid_argument("MlpPolicy::forward: dimension mismatch");
    scratch.h1.resize(h);
    scratch.h2.resize(h);
    const double* th = theta_.data();
    kernels::matvec_bias(th + w1_, input.data(), th + b1_, scratch.h1.data(), h, shape_.in);
    kernels::tanh_inplace(scratch.h1.data(), h);
    kernels::matvec_bias(th + w2_, scratch.h1.data(), th + b2_, scratch.h2.data(), h, h);
    kernels::tanh_inplace(scratch.h2.data(), h);
    kernels::matvec_bias(th + w3_, scratch.h2.data(), th + b3_, out.data(), shape_.out, h);
}

void RunningNorm::observe(std::span<const double> x) {
    if (static_cast<int>(x.size()) != dim())
        throw std::invalid_argument("RunningNorm::observe: dimension mismatch");
    ++count;
    for (int i = 0; i < dim(); ++i) {
        double delta = x[i] - mean[i];
        mean[i] += delta / static_cast<double>(count);
        m2[i] += delta * (x[i] - mean[i]);
    }
}

void RunningNorm::apply(std::span<const double> x, std::span<double> out) const {
    if (count < 2) {
        for (size_t i = 0; i < x.size(); ++i) out[i] = x[i];
        return;
    }
    for (int i = 0; i < dim(); ++i) {
        double var = m2[i] / static_cast<double>(count);
        out[i] = (x[i] - mean[i]) / std::sqrt(var + 1e-8);
    }
}

Action squash_action(double u0, double u1, double max_speed) {
    return {0.5 * max_speed * (std::tanh(u0) + 1.0), kPi * std::tanh(u1)};
}

Action act(const MlpPolicy& policy, Vec2 s, const RunningNorm* norm, double max_speed,
           MlpScratch& scratch) {
    double raw[2] = {s.x, s.y};
    double obs[2];
    if (norm) {
        norm->apply(std::span<const double>(raw, 2), std::span<double>(obs, 2));
    } else {
        obs[0] = raw[0];
        obs[1] = raw[1];
    }
    double u[2];
    policy.forward(std::span<const double>(obs, 2), std::span<double>(u, 2), scratch);
    return squash_action(u[0], u[1], max_speed);
}

Action act(const MlpPolicy& policy, Vec2 s, const RunningNorm* norm, double max_speed) {
    MlpScratch scratch;
    return act(policy, s, norm, max_speed, scratch);
}

int option_index(const OptionSet& options, int src, int dst) {
    for (size_t i = 0; i < options.size(); ++i)
        if (options[i].edge.src == src && options[i].edge.dst == dst) return static_cast<int>(i);
    return -1;
}

}  // namespace avi
