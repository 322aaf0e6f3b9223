#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "avi/abstraction.hpp"
#include "avi/adp.hpp"

namespace avi::oracle {

// Deterministic gridworld with 4-neighborhood moves, sparse goal-entry
// rewards and disjoint cell-box subgoal regions. Small enough to enumerate
// everything exactly.
struct TabularInstance {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> blocked;  // cell index = y * width + x
    std::vector<int> region_of;    // region id per cell, -1 outside
    std::vector<int> region_ids;   // in index order
    std::vector<std::vector<int>> region_cells;  // member cells per region index
    int initial_id = -1;
    int goal_id = -1;
    std::vector<Edge> edges;
    double gamma = 0.5;

    int n_states() const { return width * height; }
    int cell(int x, int y) const { return y * width + x; }
    bool in_bounds(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }
    int region_index(int id) const {
        for (size_t i = 0; i < region_ids.size(); ++i)
            if (region_ids[i] == id) return static_cast<int>(i);
        return -1;
    }
    bool is_goal_cell(int s) const { return region_of[s] == goal_id; }

    // Deterministic transition; goal cells are sinks, blocked moves stay put.
    int transition(int s, int action) const;
    double reward(int s, int action) const {
        return !is_goal_cell(s) && is_goal_cell(transition(s, action)) ? 1.0 : 0.0;
    }
};

// A concrete option policy table over cells for one edge.
struct GridOption {
    Edge edge;
    std::vector<uint8_t> action;  // per cell
};

// Shortest-path policy from the source region to the target region that
// avoids every other subgoal region; exactly optimal per start state on a
// deterministic instance.
GridOption ideal_option(const TabularInstance& inst, Edge edge);
std::vector<GridOption> ideal_options(const TabularInstance& inst);

struct GridRollout {
    int terminal_state = -1;   // -1: never terminates
    int terminal_region = -1;
    int steps = 0;
    double disc_reward = 0.0;
};

// Executes an option from a cell in its source region until another region is
// entered; cycles outside the regions are detected and reported as
// non-terminating.
GridRollout run_option(const TabularInstance& inst, const GridOption& option, int start);

struct OptionViResult {
    std::vector<double> v;               // per cell, 0 off-region
    std::vector<std::vector<double>> q;  // [option][cell]
};

// Fixed point of option value iteration by enumeration of option rollouts.
OptionViResult exact_option_vi(const TabularInstance& inst, const std::vector<GridOption>& options,
                               double tol = 1e-13);

// Exact interval tables: per-cell enumeration of every region member.
IntervalAdp exact_tables(const TabularInstance& inst, const std::vector<GridOption>& options);

// Expected tables under a uniform distribution over each region's cells.
ExpectedAdp exact_expected_tables(const TabularInstance& inst,
                                  const std::vector<GridOption>& options);

struct PolicyValue {
    std::vector<double> v;  // per cell, 0 off-region
    double j = 0.0;         // mean over the initial region's cells
};

// Exact value of the hierarchical policy induced by a region -> option
// choice, computed by following the deterministic option chains.
PolicyValue exact_policy_value(const TabularInstance& inst, const std::vector<GridOption>& options,
                               const std::vector<int>& choice_per_region_index);

// Plain concrete value iteration over primitive actions.
struct ConcreteViResult {
    std::vector<double> v;
    double j = 0.0;
};
ConcreteViResult exact_concrete_vi(const TabularInstance& inst, double tol = 1e-13);

struct InstanceParams {
    int max_side = 12;
    int min_side = 6;
    int min_regions = 3;
    int max_regions = 5;
    double block_prob = 0.10;
    bool singleton_regions = false;
    bool require_contraction = true;  // regenerate until gamma + |S| eps_T < 1
};

// Random instance satisfying the spec invariants; with require_contraction it
// retries (shrinking regions to singletons as a last resort) until the exact
// tables satisfy the contraction condition.
TabularInstance random_instance(uint64_t seed, const InstanceParams& params = {});

// A corridor of chambers joined by single-cell doors; every start-to-goal
// trajectory is forced through the door regions in edge order.
TabularInstance bottleneck_instance(uint64_t seed, int n_chambers = 3);

std::string to_text(const TabularInstance& inst);

}  // namespace avi::oracle
