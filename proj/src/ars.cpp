#include "avi/ars.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "avi/kernels.hpp"

namespace avi {

double shaped_return(std::span<const Vec2> next_states, Vec2 target_center,
                     double distance_scale) {
    double total = 0.0;
    for (Vec2 s : next_states) total -= (s - target_center).norm() / distance_scale;
    return total;
}

OptionTrainer::OptionTrainer(Edge edge, MlpShape shape) {
    option_.edge = edge;
    option_.policy = MlpPolicy(shape);
    option_.norm = RunningNorm(shape.in);
}

OptionTrainer::Episode OptionTrainer::run_episode(const ConcreteEnv& env,
                                                  const AbstractSpec& spec,
                                                  const MlpPolicy& policy, Vec2 start,
                                                  const ArsConfig& config) {
    Episode ep;
    Vec2 s = start;
    int src = option_.edge.src;
    double dist = (s - target_center_).norm();
    for (int t = 0; t < config.episode_horizon; ++t) {
        double raw[2] = {s.x, s.y};
        double obs[2] = {s.x, s.y};
        if (config.normalize_obs) {
            option_.norm.observe(std::span<const double>(raw, 2));
            option_.norm.apply(std::span<const double>(raw, 2), std::span<double>(obs, 2));
        }
        double u[2];
        policy.forward(std::span<const double>(obs, 2), std::span<double>(u, 2), scratch_);
        Action a = squash_action(u[0], u[1], env.max_speed());
        s = env.step(s, a);
        ++ep.steps;
        dist = (s - target_center_).norm();
        ep.shaped -= dist / config.distance_scale;
        int region = spec.region_containing(s);
        if (region >= 0 && region != src) break;
    }
    // In the reduced MDP the other subgoal regions are sinks, not exits: the
    // simulation stops early but the state stays put for the remaining
    // horizon, so the frozen distance keeps accruing.
    ep.shaped -= (config.episode_horizon - ep.steps) * dist / config.distance_scale;
    return ep;
}

TrainStats OptionTrainer::run_round(const ConcreteEnv& env, const AbstractSpec& spec,
                                    const std::vector<WeightedState>& start_pool,
                                    const ArsConfig& config, uint64_t round_seed) {
    if (start_pool.empty()) throw std::runtime_error("ars: empty start pool");
    if (config.top_b > config.n_directions || config.top_b <= 0)
        throw std::runtime_error("ars: top_b must be in [1, n_directions]");
    const SubgoalRegion* target = spec.find(option_.edge.dst);
    if (!target) throw std::runtime_error("ars: unknown target region");
    target_center_ = target->center;

    Rng rng(round_seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    int p = static_cast<int>(option_.policy.params().size());
    int nd = config.n_directions;
    std::vector<double> deltas(static_cast<size_t>(nd) * p);
    std::vector<double> r_plus(nd), r_minus(nd);
    MlpPolicy perturbed = option_.policy;

    TrainStats stats;
    for (int it = 0; it < config.iterations_per_round; ++it) {
        for (double& d : deltas) d = gauss(rng);
        double iteration_return = 0.0;
        for (int k = 0; k < nd; ++k) {
            const double* delta = deltas.data() + static_cast<size_t>(k) * p;
            // Both signs of a direction start from the same state; with
            // deterministic dynamics the return difference then isolates the
            // perturbation's effect.
            Vec2 start = sample_pool(start_pool, rng);
            for (int sign = 0; sign < 2; ++sign) {
                std::copy(option_.policy.params().begin(), option_.policy.params().end(),
                          perturbed.params().begin());
                kernels::axpy(p, sign == 0 ? config.noise : -config.noise, delta,
                              perturbed.params().data());
                Episode ep = run_episode(env, spec, perturbed, start, config);
                stats.env_steps += ep.steps;
                iteration_return += ep.shaped;
                (sign == 0 ? r_plus[k] : r_minus[k]) = ep.shaped;
            }
        }
        stats.mean_return = iteration_return / (2.0 * nd);

        std::vector<int> order(nd);
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            return std::max(r_plus[a], r_minus[a]) > std::max(r_plus[b], r_minus[b]);
        });

        double mean = 0.0;
        for (int k = 0; k < config.top_b; ++k) mean += r_plus[order[k]] + r_minus[order[k]];
        mean /= 2.0 * config.top_b;
        double var = 0.0;
        for (int k = 0; k < config.top_b; ++k) {
            var += (r_plus[order[k]] - mean) * (r_plus[order[k]] - mean);
            var += (r_minus[order[k]] - mean) * (r_minus[order[k]] - mean);
        }
        double sigma = std::sqrt(var / (2.0 * config.top_b));
        if (sigma < 1e-12) {
            ++stats.skipped_updates;  // all selected directions tied
            continue;
        }
        double scale = config.step_size / (config.top_b * sigma);
        for (int k = 0; k < config.top_b; ++k) {
            int idx = order[k];
            kernels::axpy(p, scale * (r_plus[idx] - r_minus[idx]),
                          deltas.data() + static_cast<size_t>(idx) * p,
                          option_.policy.params().data());
        }
    }
    stats.iterations = config.iterations_per_round;
    return stats;
}

}  // namespace avi
