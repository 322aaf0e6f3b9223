#include "avi/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace avi {

namespace {

// Shared Bellman loop over per-option rows: q[o] = r[o] + sum_j t[o][j] v[j],
// v[i] = max over options rooted at region i (0 if none).
ViResult run_vi(const std::vector<int>& region_ids, const std::vector<Edge>& options,
                const std::vector<std::vector<double>>& t, const std::vector<double>& r,
                double tol, long max_iters) {
    int n = static_cast<int>(region_ids.size());
    int m = static_cast<int>(options.size());
    std::vector<int> src_index(m);
    for (int o = 0; o < m; ++o) {
        src_index[o] = -1;
        for (int i = 0; i < n; ++i)
            if (region_ids[i] == options[o].src) src_index[o] = i;
        if (src_index[o] < 0) throw std::runtime_error("value iteration: option with unknown source");
    }

    ViResult res;
    res.v.assign(n, 0.0);
    res.q.assign(m, 0.0);
    std::vector<double> v_next(n, 0.0);
    for (long it = 0; it < max_iters; ++it) {
        for (int o = 0; o < m; ++o) {
            double acc = r[o];
            const std::vector<double>& row = t[o];
            for (int j = 0; j < n; ++j) acc += row[j] * res.v[j];
            res.q[o] = acc;
        }
        std::fill(v_next.begin(), v_next.end(), 0.0);
        std::vector<bool> has(n, false);
        for (int o = 0; o < m; ++o) {
            int i = src_index[o];
            if (!has[i] || res.q[o] > v_next[i]) {
                v_next[i] = res.q[o];
                has[i] = true;
            }
        }
        double resid = 0.0;
        for (int i = 0; i < n; ++i) resid = std::max(resid, std::fabs(v_next[i] - res.v[i]));
        res.v = v_next;
        res.residuals.push_back(resid);
        res.iterations = static_cast<int>(it) + 1;
        if (resid < tol) {
            res.converged = true;
            break;
        }
        double vmax = 0.0;
        for (double x : res.v) vmax = std::max(vmax, std::fabs(x));
        if (!std::isfinite(resid) || vmax > 1e12) break;  // diverging
    }
    // Final Q against the fixed point.
    for (int o = 0; o < m; ++o) {
        double acc = r[o];
        for (int j = 0; j < n; ++j) acc += t[o][j] * res.v[j];
        res.q[o] = acc;
    }
    return res;
}

}  // namespace

IntervalViResult interval_vi(const IntervalAdp& adp, double tol, long max_iters) {
    IntervalViResult out;
    out.inf = run_vi(adp.region_ids, adp.options, adp.t_inf, adp.r_inf, tol, max_iters);
    out.sup = run_vi(adp.region_ids, adp.options, adp.t_sup, adp.r_sup, tol, max_iters);
    return out;
}

ViResult expected_vi(const ExpectedAdp& adp, double tol, long max_iters) {
    return run_vi(adp.region_ids, adp.options, adp.t_d, adp.r_d, tol, max_iters);
}

AbstractPolicy extract_policy(const std::vector<double>& q, const std::vector<Edge>& options,
                              const std::vector<int>& region_ids, int goal_id,
                              PolicyProvenance provenance) {
    AbstractPolicy policy;
    policy.provenance = provenance;
    for (int id : region_ids) {
        if (id == goal_id) continue;
        int best = -1;
        for (size_t o = 0; o < options.size(); ++o) {
            if (options[o].src != id) continue;
            if (best < 0 || q[o] > q[best]) best = static_cast<int>(o);
        }
        if (best < 0)
            throw std::runtime_error("extract_policy: region " + std::to_string(id) +
                                     " has no options");
        policy.region_ids.push_back(id);
        policy.option.push_back(best);
    }
    return policy;
}

ContractionCheck check_contraction(int n_regions, double eps_t, double gamma) {
    ContractionCheck c;
    c.factor = gamma + n_regions * eps_t;
    c.holds = n_regions * eps_t < 1.0 - gamma;
    return c;
}

double suboptimality_bound(int n_regions, double eps_t, double eps_r, double gamma) {
    ContractionCheck c = check_contraction(n_regions, eps_t, gamma);
    if (!c.holds) return std::numeric_limits<double>::infinity();
    double numerator = (1.0 - gamma) * eps_r + n_regions * eps_t;
    double denominator = (1.0 - gamma) * (1.0 - c.factor);
    return numerator / denominator;
}

std::vector<int> plan_path(const AbstractPolicy& policy, const std::vector<Edge>& options,
                           int initial_id, int goal_id, int max_len) {
    std::vector<int> path{initial_id};
    int current = initial_id;
    for (int hop = 0; hop < max_len; ++hop) {
        if (current == goal_id) break;
        int o = policy.choice_for(current);
        if (o < 0) break;
        current = options[o].dst;
        path.push_back(current);
        if (std::count(path.begin(), path.end(), current) > 1) break;  // cycle
    }
    return path;
}

}  // namespace avi
