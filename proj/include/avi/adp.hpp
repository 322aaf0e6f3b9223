#pragma once

#include <utility>
#include <vector>

#include "avi/abstraction.hpp"
#include "avi/distribution.hpp"
#include "avi/env.hpp"
#include "avi/mlp_policy.hpp"

namespace avi {

// One option execution from a start state: the region it terminated in (-1 if
// the horizon was hit outside every region), the number of env steps, and the
// discounted true reward collected before termination.
struct RolloutOutcome {
    Vec2 start;
    int terminal_region = -1;
    int steps = 0;
    double disc_reward = 0.0;
    Vec2 final_state;
};

// Runs the option policy from `start` (inside its source region) until the
// state enters any other region or the horizon is reached.
RolloutOutcome rollout_option(const ConcreteEnv& env, const AbstractSpec& spec,
                              const TrainedOption& option, Vec2 start, int horizon,
                              MlpScratch& scratch);

// Per-start time-discounted transition values toward every region plus the
// option reward; the building block both table forms reduce over.
struct StartValue {
    std::vector<double> t;  // indexed like spec.regions
    double r = 0.0;
};

StartValue outcome_to_value(const RolloutOutcome& outcome, const AbstractSpec& spec, double gamma);

// Interval tables: per option, min/max over start states of the per-start
// values. Option index is the table row; dst columns follow spec.regions.
struct IntervalAdp {
    double gamma = 0.95;
    std::vector<int> region_ids;
    std::vector<Edge> options;
    std::vector<std::vector<double>> t_inf, t_sup;  // [option][region index]
    std::vector<double> r_inf, r_sup;               // [option]
    std::vector<int> start_counts;                  // [option]

    int n_regions() const { return static_cast<int>(region_ids.size()); }
    int region_index(int id) const {
        for (size_t i = 0; i < region_ids.size(); ++i)
            if (region_ids[i] == id) return static_cast<int>(i);
        return -1;
    }
};

struct ExpectedAdp {
    double gamma = 0.95;
    std::vector<int> region_ids;
    std::vector<Edge> options;
    std::vector<std::vector<double>> t_d;  // [option][region index]
    std::vector<double> r_d;               // [option]
    std::vector<int> start_counts;

    int n_regions() const { return static_cast<int>(region_ids.size()); }
};

IntervalAdp assemble_interval(double gamma, const AbstractSpec& spec,
                              const std::vector<Edge>& options,
                              const std::vector<std::vector<StartValue>>& per_option_starts);

ExpectedAdp assemble_expected(double gamma, const AbstractSpec& spec,
                              const std::vector<Edge>& options,
                              const std::vector<std::vector<StartValue>>& per_option_starts);

// (eps_T, eps_R): worst-case interval widths over all cells.
std::pair<double, double> epsilons(const IntervalAdp& adp);

// Deterministic g x g start grid (plus the center) inside each region box,
// indexed like spec.regions.
std::vector<std::vector<Vec2>> grid_starts(const AbstractSpec& spec, int g);

struct IntervalEstimate {
    IntervalAdp adp;
    long env_steps = 0;
};

// Monte-Carlo interval tables from explicit per-region start states.
// m_rollouts repeats are averaged per start (1 suffices when the env is
// deterministic).
IntervalEstimate estimate_interval(const ConcreteEnv& env, const AbstractSpec& spec,
                                   const OptionSet& options,
                                   const std::vector<std::vector<Vec2>>& starts_per_region,
                                   int m_rollouts, int horizon, int threads = 0);

struct ExpectedEstimate {
    ExpectedAdp adp;
    long env_steps = 0;
};

// Expected tables under D: sample means over m_starts draws from each
// region's conditional pool.
ExpectedEstimate estimate_expected(const ConcreteEnv& env, const AbstractSpec& spec,
                                   const OptionSet& options, const RegionDistribution& dist,
                                   int m_starts, int m_rollouts, int horizon, uint64_t seed,
                                   int threads = 0);

}  // namespace avi
