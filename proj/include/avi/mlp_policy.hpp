#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "avi/abstraction.hpp"
#include "avi/env.hpp"
#include "avi/geometry.hpp"

namespace avi {

struct MlpShape {
    int in = 2;
    int hidden = 30;
    int out = 2;

    int param_count() const {
        return hidden * in + hidden + hidden * hidden + hidden + out * hidden + out;
    }
    bool operator==(const MlpShape&) const = default;
};

// Scratch buffers for forward passes; one per worker thread.
struct MlpScratch {
    std::vector<double> x, h1, h2;
};

// Fully connected in -> hidden -> hidden -> out with tanh hidden units.
// Parameters live in one flat vector (layer by layer, weights row-major, then
// bias) so random-search perturbations are a single axpy.
class MlpPolicy {
  public:
    explicit MlpPolicy(MlpShape shape = {});

    const MlpShape& shape() const { return shape_; }
    std::span<double> params() { return theta_; }
    std::span<const double> params() const { return theta_; }

    // Raw network outputs (before action squashing).
    void forward(std::span<const double> input, std::span<double> out, MlpScratch& scratch) const;

  private:
    MlpShape shape_;
    std::vector<double> theta_;
    // offsets into theta_
    int w1_, b1_, w2_, b2_, w3_, b3_;
};

// Per-dimension running mean/variance (Welford). Applied to observations when
// normalization is enabled; identity until two samples have been seen.
struct RunningNorm {
    int64_t count = 0;
    std::vector<double> mean;
    std::vector<double> m2;

    explicit RunningNorm(int dim = 0) : mean(dim, 0.0), m2(dim, 0.0) {}
    int dim() const { return static_cast<int>(mean.size()); }
    void observe(std::span<const double> x);
    void apply(std::span<const double> x, std::span<double> out) const;
};

// Maps raw outputs to (speed in [0, max_speed], heading in [-pi, pi]).
Action squash_action(double u0, double u1, double max_speed);

Action act(const MlpPolicy& policy, Vec2 s, const RunningNorm* norm, double max_speed,
           MlpScratch& scratch);

// Convenience overload with its own scratch.
Action act(const MlpPolicy& policy, Vec2 s, const RunningNorm* norm, double max_speed);

// One trained option: the policy for a directed edge plus its observation
// statistics. Initiation set is the source region; termination is entry into
// any other region.
struct TrainedOption {
    Edge edge;
    MlpPolicy policy;
    RunningNorm norm;
};

using OptionSet = std::vector<TrainedOption>;

int option_index(const OptionSet& options, int src, int dst);

}  // namespace avi
