#include "avi/adp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "avi/parallel.hpp"

namespace avi {

RolloutOutcome rollout_option(const ConcreteEnv& env, const AbstractSpec& spec,
                              const TrainedOption& option, Vec2 start, int horizon,
                              MlpScratch& scratch) {
    int src = option.edge.src;
    const SubgoalRegion* source = spec.find(src);
    if (!source || !source->box.contains(start))
        throw std::invalid_argument("rollout_option: start outside the option's source region");

    RolloutOutcome out;
    out.start = start;
    Vec2 s = start;
    double discount = 1.0;
    double gamma = env.gamma();
    for (int t = 0; t < horizon; ++t) {
        Action a = act(option.policy, s, &option.norm, env.max_speed(), scratch);
        auto tr = env.transition(s, a);
        out.disc_reward += discount * tr.reward;
        discount *= gamma;
        s = tr.next;
        ++out.steps;
        int region = spec.region_containing(s);
        if (region >= 0 && region != src) {
            out.terminal_region = region;
            break;
        }
    }
    out.final_state = s;
    return out;
}

StartValue outcome_to_value(const RolloutOutcome& outcome, const AbstractSpec& spec,
                            double gamma) {
    StartValue v;
    v.t.assign(spec.regions.size(), 0.0);
    v.r = outcome.disc_reward;
    if (outcome.terminal_region >= 0) {
        int idx = spec.index_of(outcome.terminal_region);
        if (idx >= 0) v.t[idx] = std::pow(gamma, outcome.steps);
    }
    return v;
}

IntervalAdp assemble_interval(double gamma, const AbstractSpec& spec,
                              const std::vector<Edge>& options,
                              const std::vector<std::vector<StartValue>>& per_option_starts) {
    IntervalAdp adp;
    adp.gamma = gamma;
    for (const auto& r : spec.regions) adp.region_ids.push_back(r.id);
    adp.options = options;
    int n = adp.n_regions();
    for (size_t o = 0; o < options.size(); ++o) {
        const auto& starts = per_option_starts[o];
        if (starts.empty()) throw std::runtime_error("assemble_interval: empty start set");
        std::vector<double> lo(n, std::numeric_limits<double>::infinity());
        std::vector<double> hi(n, -std::numeric_limits<double>::infinity());
        double rlo = std::numeric_limits<double>::infinity(), rhi = -rlo;
        for (const auto& sv : starts) {
            for (int j = 0; j < n; ++j) {
                lo[j] = std::min(lo[j], sv.t[j]);
                hi[j] = std::max(hi[j], sv.t[j]);
            }
            rlo = std::min(rlo, sv.r);
            rhi = std::max(rhi, sv.r);
        }
        adp.t_inf.push_back(std::move(lo));
        adp.t_sup.push_back(std::move(hi));
        adp.r_inf.push_back(rlo);
        adp.r_sup.push_back(rhi);
        adp.start_counts.push_back(static_cast<int>(starts.size()));
    }
    return adp;
}

ExpectedAdp assemble_expected(double gamma, const AbstractSpec& spec,
                              const std::vector<Edge>& options,
                              const std::vector<std::vector<StartValue>>& per_option_starts) {
    ExpectedAdp adp;
    adp.gamma = gamma;
    for (const auto& r : spec.regions) adp.region_ids.push_back(r.id);
    adp.options = options;
    int n = adp.n_regions();
    for (size_t o = 0; o < options.size(); ++o) {
        const auto& starts = per_option_starts[o];
        if (starts.empty()) throw std::runtime_error("assemble_expected: empty start set");
        std::vector<double> mean(n, 0.0);
        double rmean = 0.0;
        for (const auto& sv : starts) {
            for (int j = 0; j < n; ++j) mean[j] += sv.t[j];
            rmean += sv.r;
        }
        double inv = 1.0 / static_cast<double>(starts.size());
        for (int j = 0; j < n; ++j) mean[j] *= inv;
        adp.t_d.push_back(std::move(mean));
        adp.r_d.push_back(rmean * inv);
        adp.start_counts.push_back(static_cast<int>(starts.size()));
    }
    return adp;
}

std::pair<double, double> epsilons(const IntervalAdp& adp) {
    if (adp.options.empty()) throw std::runtime_error("epsilons: empty tables");
    double eps_t = 0.0, eps_r = 0.0;
    for (size_t o = 0; o < adp.options.size(); ++o) {
        for (int j = 0; j < adp.n_regions(); ++j)
            eps_t = std::max(eps_t, adp.t_sup[o][j] - adp.t_inf[o][j]);
        eps_r = std::max(eps_r, adp.r_sup[o] - adp.r_inf[o]);
    }
    return {eps_t, eps_r};
}

std::vector<std::vector<Vec2>> grid_starts(const AbstractSpec& spec, int g) {
    std::vector<std::vector<Vec2>> starts;
    for (const auto& r : spec.regions) {
        std::vector<Vec2> pts;
        for (int i = 0; i < g; ++i) {
            for (int j = 0; j < g; ++j) {
                double fx = (i + 0.5) / g, fy = (j + 0.5) / g;
                pts.push_back({r.box.lo.x + fx * r.box.width(), r.box.lo.y + fy * r.box.height()});
            }
        }
        pts.push_back(r.center);
        starts.push_back(std::move(pts));
    }
    return starts;
}

namespace {

// Averaged per-start value over m identical-start rollouts.
StartValue rollout_value(const ConcreteEnv& env, const AbstractSpec& spec,
                         const TrainedOption& option, Vec2 start, int m_rollouts, int horizon,
                         MlpScratch& scratch, long& steps) {
    StartValue acc;
    acc.t.assign(spec.regions.size(), 0.0);
    for (int m = 0; m < m_rollouts; ++m) {
        RolloutOutcome out = rollout_option(env, spec, option, start, horizon, scratch);
        steps += out.steps;
        StartValue v = outcome_to_value(out, spec, env.gamma());
        for (size_t j = 0; j < acc.t.size(); ++j) acc.t[j] += v.t[j];
        acc.r += v.r;
    }
    double inv = 1.0 / m_rollouts;
    for (auto& t : acc.t) t *= inv;
    acc.r *= inv;
    return acc;
}

}  // namespace

IntervalEstimate estimate_interval(const ConcreteEnv& env, const AbstractSpec& spec,
                                   const OptionSet& options,
                                   const std::vector<std::vector<Vec2>>& starts_per_region,
                                   int m_rollouts, int horizon, int threads) {
    std::vector<Edge> edges;
    for (const auto& o : options) edges.push_back(o.edge);
    std::vector<std::vector<StartValue>> per_option(options.size());
    std::vector<long> steps(options.size(), 0);

    for (size_t o = 0; o < options.size(); ++o) {
        int idx = spec.index_of(options[o].edge.src);
        if (idx < 0 || starts_per_region[idx].size() < 1)
            throw std::runtime_error("estimate_interval: no start states for region " +
                                     std::to_string(options[o].edge.src));
    }
    parallel_for(static_cast<int>(options.size()), threads, [&](int o) {
        MlpScratch scratch;
        int idx = spec.index_of(options[o].edge.src);
        for (Vec2 s : starts_per_region[idx])
            per_option[o].push_back(
                rollout_value(env, spec, options[o], s, m_rollouts, horizon, scratch, steps[o]));
    });

    IntervalEstimate result{assemble_interval(env.gamma(), spec, edges, per_option), 0};
    for (long s : steps) result.env_steps += s;
    return result;
}

ExpectedEstimate estimate_expected(const ConcreteEnv& env, const AbstractSpec& spec,
                                   const OptionSet& options, const RegionDistribution& dist,
                                   int m_starts, int m_rollouts, int horizon, uint64_t seed,
                                   int threads) {
    std::vector<Edge> edges;
    for (const auto& o : options) edges.push_back(o.edge);
    std::vector<std::vector<StartValue>> per_option(options.size());
    std::vector<long> steps(options.size(), 0);

    for (const auto& o : options) {
        const auto* pool = dist.pool_for(o.edge.src);
        if (!pool || pool->empty())
            throw std::runtime_error("estimate_expected: empty pool for region " +
                                     std::to_string(o.edge.src));
    }
    parallel_for(static_cast<int>(options.size()), threads, [&](int o) {
        MlpScratch scratch;
        Rng rng = make_rng(seed, {rng_tag::estimation, static_cast<uint64_t>(o)});
        const auto* pool = dist.pool_for(options[o].edge.src);
        for (int k = 0; k < m_starts; ++k) {
            Vec2 s = sample_pool(*pool, rng);
            per_option[o].push_back(
                rollout_value(env, spec, options[o], s, m_rollouts, horizon, scratch, steps[o]));
        }
    });

    ExpectedEstimate result{assemble_expected(env.gamma(), spec, edges, per_option), 0};
    for (long s : steps) result.env_steps += s;
    return result;
}

}  // namespace avi
