#pragma once

#include <optional>
#include <string>
#include <vector>

#include "avi/aavi.hpp"
#include "avi/config.hpp"
#include "avi/env.hpp"

namespace avi {

// A fully resolved experiment: environment, abstraction choice, algorithm
// settings, seeds and output location.
struct ExperimentConfig {
    std::string env_name = "nine_rooms";
    EnvConfig env;
    std::string regions = "doorways";  // doorways | room_centers | full_rooms | random | file
    std::string spec_file;
    int random_n = 20;
    int random_k = 7;
    double random_half_width = 1.0;
    AaviConfig aavi;
    std::vector<uint64_t> seeds{0, 1, 2, 3, 4};
    std::string out_dir;
    bool write_checkpoints = true;
};

// Rooms preset sized so a full run fits the experiment step budgets; the
// ArsConfig type itself defaults to the plain ARS hyperparameters.
ArsConfig rooms_ars_preset(double room_size);

// Applies a config file (and defaults) to an ExperimentConfig; CLI layers its
// own overrides on top by mutating the struct afterwards.
ExperimentConfig experiment_from_config(const KeyValueConfig& cfg);
KeyValueConfig experiment_to_config(const ExperimentConfig& cfg);

ConcreteEnv make_env(const ExperimentConfig& cfg);
// Builds the spec and, when the abstraction redefines the endpoints, rebinds
// the env's start/goal boxes to the spec's.
std::pair<ConcreteEnv, AbstractSpec> make_task(const ExperimentConfig& cfg, uint64_t seed);

struct SeedRunResult {
    uint64_t seed = 0;
    AaviResult result;
};

struct ExperimentResult {
    std::vector<SeedRunResult> per_seed;
    std::vector<double> mean_success_by_iter;
    std::vector<double> mean_reward_by_iter;
};

// Runs every seed, writes per-seed curves/checkpoints and the aggregated mean
// curve when out_dir is set.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

struct TransferResult {
    AbstractPolicy policy;
    std::vector<int> plan;
    IntervalAdp adp;
    double eps_t = 0.0, eps_r = 0.0;
    long estimation_steps = 0;
    EvalReport eval;
    bool sup_converged = false;
};

// Frozen-option replanning: re-estimates interval tables on the target env,
// runs interval VI and extracts the conservative policy. Options whose edges
// are missing from the spec are dropped.
TransferResult run_transfer(const ConcreteEnv& target_env, const AbstractSpec& spec,
                            const OptionSet& options, int grid_points, int horizon,
                            int eval_episodes, int max_option_steps, uint64_t seed,
                            int threads = 0);

std::string default_out_root();

}  // namespace avi
