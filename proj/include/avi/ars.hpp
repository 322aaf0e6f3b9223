#pragma once

#include <span>
#include <vector>

#include "avi/abstraction.hpp"
#include "avi/distribution.hpp"
#include "avi/env.hpp"
#include "avi/mlp_policy.hpp"

namespace avi {

// Augmented random search, version V2-t: antithetic Gaussian parameter
// perturbations, top-b direction selection, reward-std step normalization and
// online observation normalization.
struct ArsConfig {
    double step_size = 0.3;   // alpha
    double noise = 0.05;      // nu
    int n_directions = 30;
    int top_b = 15;
    int iterations_per_round = 300;
    int episode_horizon = 100;
    bool normalize_obs = true;
    double distance_scale = 8.0;  // shaped-return divisor, room_size by default
};

// Training episodes start from the source region's pool and terminate upon
// entering any other subgoal region.
struct SubMdpTask {
    int source_id = -1;
    int target_id = -1;
    Vec2 target_center;
};

struct TrainStats {
    double mean_return = 0.0;  // over the final iteration's episodes
    long env_steps = 0;
    int iterations = 0;
    int skipped_updates = 0;  // iterations with zero return spread
};

// Undiscounted shaped return of a trajectory of post-step states: sum of
// -(distance to the target center) / distance_scale.
double shaped_return(std::span<const Vec2> next_states, Vec2 target_center, double distance_scale);

// Trainer for one edge's option. Policy parameters and observation statistics
// persist across rounds; each round consumes an independent seed stream so
// edge trainers can run in parallel.
class OptionTrainer {
  public:
    OptionTrainer(Edge edge, MlpShape shape = {});

    const TrainedOption& option() const { return option_; }
    TrainedOption& option() { return option_; }
    const Edge& edge() const { return option_.edge; }

    TrainStats run_round(const ConcreteEnv& env, const AbstractSpec& spec,
                         const std::vector<WeightedState>& start_pool, const ArsConfig& config,
                         uint64_t round_seed);

  private:
    struct Episode {
        double shaped = 0.0;
        int steps = 0;
    };
    Episode run_episode(const ConcreteEnv& env, const AbstractSpec& spec, const MlpPolicy& policy,
                        Vec2 start, const ArsConfig& config);

    TrainedOption option_;
    Vec2 target_center_;
    MlpScratch scratch_;
};

}  // namespace avi
