#pragma once

#include <functional>
#include <vector>

#include "avi/adp.hpp"
#include "avi/ars.hpp"
#include "avi/distribution.hpp"
#include "avi/planner.hpp"

namespace avi {

// Uniform pools over a small square centered in each region; the square's
// half-width is init_fraction of the region half-width per dimension.
RegionDistribution initial_distribution(const AbstractSpec& spec, int pool_capacity,
                                        double init_fraction, uint64_t seed);

// New per-region pool of pool_capacity samples: ceil(alpha * capacity) drawn
// from d_bar (falling back to d when d_bar has nothing for that region), the
// remainder from d. Regions empty in both pools are skipped.
RegionDistribution aggregate(const RegionDistribution& d, const RegionDistribution& d_bar,
                             double alpha, uint64_t seed);

struct ExecutionResult {
    bool reached_goal = false;
    double disc_reward = 0.0;
    long steps = 0;
    std::vector<int> regions_entered;
};

// Runs the chosen option to termination, re-consults the abstract policy at
// the new region, and stops at the goal, at a region without a choice, at an
// option that times out outside every region, or after max_option_steps
// option invocations.
ExecutionResult execute_hierarchical(const ConcreteEnv& env, const AbstractSpec& spec,
                                     const OptionSet& options, const AbstractPolicy& policy,
                                     Vec2 s0, int max_option_steps, int option_horizon,
                                     MlpScratch& scratch);

// D-bar: pools of region-entry states observed while rolling the hierarchical
// policy from the initial distribution.
RegionDistribution induce_distribution(const ConcreteEnv& env, const AbstractSpec& spec,
                                       const OptionSet& options, const AbstractPolicy& policy,
                                       int n_episodes, int max_option_steps, int option_horizon,
                                       int pool_capacity, uint64_t seed, long* env_steps_out);

struct EvalReport {
    double success_probability = 0.0;
    double mean_disc_reward = 0.0;
    int episodes = 0;
    long env_steps = 0;
};

EvalReport evaluate_policy(const ConcreteEnv& env, const AbstractSpec& spec,
                           const OptionSet& options, const AbstractPolicy& policy, int episodes,
                           int max_option_steps, int option_horizon, uint64_t seed,
                           int threads = 0);

struct AggregationConfig {
    double alpha = 0.5;
    bool harmonic = false;  // alpha_i = 1 / (i + 1) instead of the constant
    int pool_capacity = 200;
    double init_fraction = 0.25;
};

struct AaviConfig {
    int iterations = 6;
    ArsConfig ars;
    AggregationConfig agg;
    int est_starts = 10;       // draws from D per region for the expected tables
    int est_rollouts = 1;
    int induction_episodes = 50;
    int max_option_steps = 0;  // 0: 2 * |regions|
    int eval_episodes = 100;
    long budget = 0;           // 0: unlimited; else training pauses once exceeded
    int threads = 0;           // 0: hardware concurrency
};

struct IterationRecord {
    int iteration = 0;
    long env_steps = 0;  // cumulative training + estimation + induction
    double success_prob = 0.0;
    double disc_reward = 0.0;
    double wall_secs = 0.0;
    std::vector<int> plan;
};

struct AaviResult {
    OptionSet options;
    AbstractPolicy policy;
    std::vector<IterationRecord> curve;
    RegionDistribution dist;
    ExpectedAdp last_adp;
    long steps_training = 0;
    long steps_estimation = 0;
    long steps_induction = 0;
    long steps_eval = 0;
    long total_env_steps = 0;  // training + estimation + induction
};

using IterationCallback = std::function<void(const AaviResult&, const IterationRecord&)>;

// Alternation loop: train every edge's option against D, estimate the
// expected tables, plan, roll the plan out to induce D-bar, and aggregate.
// With iterations = 1 the loop is a single train/estimate/plan pass and D is
// never updated.
AaviResult run_aavi(const ConcreteEnv& env, const AbstractSpec& spec, const AaviConfig& config,
                    uint64_t seed, const IterationCallback& on_iteration = {});

}  // namespace avi
