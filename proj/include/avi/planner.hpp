#pragma once

#include <vector>

#include "avi/adp.hpp"

namespace avi {

// One value-iteration fixed point over an abstract decision process: values
// per region index, Q per option, and the recorded residual trace.
struct ViResult {
    std::vector<double> v;          // [region index]
    std::vector<double> q;          // [option index]
    int iterations = 0;
    bool converged = false;
    std::vector<double> residuals;  // max-norm change per iteration
};

struct IntervalViResult {
    ViResult inf;
    ViResult sup;
};

// Decoupled inf/sup value iterations from the zero vector. The inf recursion
// always contracts (row sums <= gamma); the sup recursion contracts only when
// gamma + |S| eps_T < 1, so it may stop unconverged with the last residual.
IntervalViResult interval_vi(const IntervalAdp& adp, double tol = 1e-8, long max_iters = 100000);

ViResult expected_vi(const ExpectedAdp& adp, double tol = 1e-8, long max_iters = 100000);

enum class PolicyProvenance { conservative, expected };

struct AbstractPolicy {
    std::vector<int> region_ids;  // regions with a choice
    std::vector<int> option;      // option index per entry
    PolicyProvenance provenance = PolicyProvenance::expected;

    int choice_for(int region_id) const {
        for (size_t i = 0; i < region_ids.size(); ++i)
            if (region_ids[i] == region_id) return option[i];
        return -1;
    }
};

// Per-region argmax of Q; ties break toward the lowest option index. Every
// non-goal region must have at least one option.
AbstractPolicy extract_policy(const std::vector<double>& q, const std::vector<Edge>& options,
                              const std::vector<int>& region_ids, int goal_id,
                              PolicyProvenance provenance);

inline AbstractPolicy extract_policy(const std::vector<double>& q,
                                     const std::vector<Edge>& options, const AbstractSpec& spec,
                                     PolicyProvenance provenance) {
    std::vector<int> ids;
    for (const auto& r : spec.regions) ids.push_back(r.id);
    return extract_policy(q, options, ids, spec.goal_id, provenance);
}

struct ContractionCheck {
    bool holds = false;
    double factor = 0.0;  // gamma + n_regions * eps_T
};

ContractionCheck check_contraction(int n_regions, double eps_t, double gamma);

// Closed-form performance gap; +infinity when the contraction condition
// fails.
double suboptimality_bound(int n_regions, double eps_t, double eps_r, double gamma);

// Region-id path from the initial region following the policy's chosen edges,
// ending at the goal, at a region without a choice, or after max_len hops.
std::vector<int> plan_path(const AbstractPolicy& policy, const std::vector<Edge>& options,
                           int initial_id, int goal_id, int max_len = 64);

inline std::vector<int> plan_path(const AbstractPolicy& policy, const std::vector<Edge>& options,
                                  const AbstractSpec& spec, int max_len = 64) {
    return plan_path(policy, options, spec.initial_id, spec.goal_id, max_len);
}

}  // namespace avi
