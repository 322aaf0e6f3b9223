#include "avi/aavi.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "avi/parallel.hpp"

namespace avi {

RegionDistribution initial_distribution(const AbstractSpec& spec, int pool_capacity,
                                        double init_fraction, uint64_t seed) {
    RegionDistribution dist;
    dist.pool_capacity = pool_capacity;
    for (const auto& region : spec.regions) {
        Rng rng = make_rng(seed, {rng_tag::init_dist, static_cast<uint64_t>(region.id)});
        double hx = init_fraction * 0.5 * region.box.width();
        double hy = init_fraction * 0.5 * region.box.height();
        std::uniform_real_distribution<double> ux(region.center.x - hx, region.center.x + hx);
        std::uniform_real_distribution<double> uy(region.center.y - hy, region.center.y + hy);
        std::vector<WeightedState> pool;
        pool.reserve(pool_capacity);
        for (int i = 0; i < pool_capacity; ++i) {
            double x = ux(rng);
            double y = uy(rng);
            pool.push_back({{x, y}, 1.0});
        }
        dist.region_ids.push_back(region.id);
        dist.pools.push_back(std::move(pool));
    }
    return dist;
}

RegionDistribution aggregate(const RegionDistribution& d, const RegionDistribution& d_bar,
                             double alpha, uint64_t seed) {
    if (alpha < 0.0 || alpha > 1.0) throw std::invalid_argument("aggregate: alpha outside [0, 1]");
    if (alpha == 0.0) {  // degenerate mixture: D unchanged
        RegionDistribution out = d;
        out.alpha_history.push_back(alpha);
        return out;
    }
    RegionDistribution out;
    out.region_ids = d.region_ids;
    out.pool_capacity = d.pool_capacity;
    out.alpha_history = d.alpha_history;
    out.alpha_history.push_back(alpha);
    for (size_t i = 0; i < d.region_ids.size(); ++i) {
        int id = d.region_ids[i];
        Rng rng = make_rng(seed, {rng_tag::aggregate, static_cast<uint64_t>(id)});
        const auto& old_pool = d.pools[i];
        const auto* bar_pool = d_bar.pool_for(id);
        bool bar_empty = !bar_pool || bar_pool->empty();
        if (old_pool.empty() && bar_empty) {
            out.pools.push_back({});  // nothing to draw from; region skipped
            continue;
        }
        int n_bar = static_cast<int>(std::ceil(alpha * d.pool_capacity));
        std::vector<WeightedState> pool;
        pool.reserve(d.pool_capacity);
        for (int k = 0; k < d.pool_capacity; ++k) {
            const auto& source = (k < n_bar && !bar_empty) ? *bar_pool
                                 : (!old_pool.empty() ? old_pool : *bar_pool);
            pool.push_back({sample_pool(source, rng), 1.0});
        }
        out.pools.push_back(std::move(pool));
    }
    return out;
}

ExecutionResult execute_hierarchical(const ConcreteEnv& env, const AbstractSpec& spec,
                                     const OptionSet& options, const AbstractPolicy& policy,
                                     Vec2 s0, int max_option_steps, int option_horizon,
                                     MlpScratch& scratch) {
    ExecutionResult result;
    if (env.in_goal(s0)) {
        result.reached_goal = true;
        return result;
    }
    int region = spec.region_containing(s0);
    Vec2 s = s0;
    double discount = 1.0;
    double gamma = env.gamma();
    for (int k = 0; k < max_option_steps; ++k) {
        if (region < 0) break;
        int o = policy.choice_for(region);
        if (o < 0) break;
        const TrainedOption& option = options[o];
        int terminal = -1;
        for (int t = 0; t < option_horizon; ++t) {
            Action a = act(option.policy, s, &option.norm, env.max_speed(), scratch);
            auto tr = env.transition(s, a);
            result.disc_reward += discount * tr.reward;
            discount *= gamma;
            s = tr.next;
            ++result.steps;
            int r = spec.region_containing(s);
            if (r >= 0 && r != region) {
                terminal = r;
                break;
            }
        }
        if (terminal < 0) break;  // option timed out outside every region
        result.regions_entered.push_back(terminal);
        if (terminal == spec.goal_id) {
            result.reached_goal = true;
            break;
        }
        region = terminal;
    }
    return result;
}

RegionDistribution induce_distribution(const ConcreteEnv& env, const AbstractSpec& spec,
                                       const OptionSet& options, const AbstractPolicy& policy,
                                       int n_episodes, int max_option_steps, int option_horizon,
                                       int pool_capacity, uint64_t seed, long* env_steps_out) {
    RegionDistribution d_bar;
    d_bar.pool_capacity = pool_capacity;
    for (const auto& region : spec.regions) {
        d_bar.region_ids.push_back(region.id);
        d_bar.pools.push_back({});
    }

    long steps = 0;
    MlpScratch scratch;
    for (int ep = 0; ep < n_episodes; ++ep) {
        Rng rng = make_rng(seed, {static_cast<uint64_t>(ep)});
        Vec2 s = env.sample_initial(rng);
        int region = spec.region_containing(s);
        for (int k = 0; k < max_option_steps; ++k) {
            if (region < 0 || region == spec.goal_id) break;
            int o = policy.choice_for(region);
            if (o < 0) break;
            const TrainedOption& option = options[o];
            int terminal = -1;
            Vec2 entry;
            for (int t = 0; t < option_horizon; ++t) {
                Action a = act(option.policy, s, &option.norm, env.max_speed(), scratch);
                s = env.step(s, a);
                ++steps;
                int r = spec.region_containing(s);
                if (r >= 0 && r != region) {
                    terminal = r;
                    entry = s;
                    break;
                }
            }
            if (terminal < 0) break;
            int idx = d_bar.index_of(terminal);
            d_bar.pools[idx].push_back({entry, 1.0});
            region = terminal;
        }
    }
    if (env_steps_out) *env_steps_out = steps;
    return d_bar;
}

EvalReport evaluate_policy(const ConcreteEnv& env, const AbstractSpec& spec,
                           const OptionSet& options, const AbstractPolicy& policy, int episodes,
                           int max_option_steps, int option_horizon, uint64_t seed, int threads) {
    std::vector<int> success(episodes, 0);
    std::vector<double> reward(episodes, 0.0);
    std::vector<long> steps(episodes, 0);
    parallel_for(episodes, threads, [&](int ep) {
        MlpScratch scratch;
        Rng rng = make_rng(seed, {rng_tag::eval, static_cast<uint64_t>(ep)});
        Vec2 s0 = env.sample_initial(rng);
        ExecutionResult r = execute_hierarchical(env, spec, options, policy, s0, max_option_steps,
                                                 option_horizon, scratch);
        success[ep] = r.reached_goal ? 1 : 0;
        reward[ep] = r.disc_reward;
        steps[ep] = r.steps;
    });
    EvalReport report;
    report.episodes = episodes;
    for (int ep = 0; ep < episodes; ++ep) {
        report.success_probability += success[ep];
        report.mean_disc_reward += reward[ep];
        report.env_steps += steps[ep];
    }
    report.success_probability /= episodes;
    report.mean_disc_reward /= episodes;
    return report;
}

AaviResult run_aavi(const ConcreteEnv& env, const AbstractSpec& spec, const AaviConfig& config,
                    uint64_t seed, const IterationCallback& on_iteration) {
    if (config.iterations < 1) throw std::invalid_argument("run_aavi: iterations must be >= 1");
    ValidationReport report = validate(spec);
    if (!report.ok())
        throw std::runtime_error("run_aavi: invalid spec: " + report.violations.front());

    int max_option_steps =
        config.max_option_steps > 0 ? config.max_option_steps : 2 * spec.size();
    int horizon = config.ars.episode_horizon;

    AaviResult result;
    result.dist = initial_distribution(spec, config.agg.pool_capacity, config.agg.init_fraction,
                                       seed);

    std::vector<OptionTrainer> trainers;
    for (const Edge& e : spec.edges) trainers.emplace_back(e, MlpShape{});

    auto t0 = std::chrono::steady_clock::now();
    for (int iter = 1; iter <= config.iterations; ++iter) {
        // (a) train or refine every edge's option against the current D
        bool budget_left = config.budget <= 0 || result.total_env_steps < config.budget;
        if (budget_left) {
            std::vector<long> steps(trainers.size(), 0);
            RegionDistribution& d = result.dist;
            parallel_for(static_cast<int>(trainers.size()), config.threads, [&](int i) {
                const auto* pool = d.pool_for(trainers[i].edge().src);
                if (!pool || pool->empty()) return;  // region never seeded; skip
                uint64_t round_seed = derive_seed(
                    seed, {rng_tag::ars, static_cast<uint64_t>(i), static_cast<uint64_t>(iter)});
                TrainStats stats =
                    trainers[i].run_round(env, spec, *pool, config.ars, round_seed);
                steps[i] = stats.env_steps;
            });
            for (long s : steps) result.steps_training += s;
        }

        OptionSet options;
        options.reserve(trainers.size());
        for (auto& t : trainers) options.push_back(t.option());

        // (b) expected tables under D
        ExpectedEstimate est = estimate_expected(
            env, spec, options, result.dist, config.est_starts, config.est_rollouts, horizon,
            derive_seed(seed, {rng_tag::estimation, static_cast<uint64_t>(iter)}),
            config.threads);
        result.steps_estimation += est.env_steps;
        result.last_adp = est.adp;

        // (c) plan in the expected ADP
        ViResult vi = expected_vi(est.adp);
        AbstractPolicy policy =
            extract_policy(vi.q, est.adp.options, spec, PolicyProvenance::expected);

        // (d, e) induce D-bar and aggregate; pointless on the final iteration
        if (iter < config.iterations) {
            long induction_steps = 0;
            RegionDistribution d_bar = induce_distribution(
                env, spec, options, policy, config.induction_episodes, max_option_steps, horizon,
                config.agg.pool_capacity,
                derive_seed(seed, {rng_tag::induction, static_cast<uint64_t>(iter)}),
                &induction_steps);
            result.steps_induction += induction_steps;
            double alpha = config.agg.harmonic ? 1.0 / (iter + 1.0) : config.agg.alpha;
            result.dist = aggregate(result.dist, d_bar, alpha,
                                    derive_seed(seed, {rng_tag::aggregate,
                                                       static_cast<uint64_t>(iter)}));
        }

        result.total_env_steps =
            result.steps_training + result.steps_estimation + result.steps_induction;
        result.options = std::move(options);
        result.policy = policy;

        EvalReport eval = evaluate_policy(
            env, spec, result.options, policy, config.eval_episodes, max_option_steps, horizon,
            derive_seed(seed, {rng_tag::eval, static_cast<uint64_t>(iter)}), config.threads);
        result.steps_eval += eval.env_steps;

        IterationRecord record;
        record.iteration = iter;
        record.env_steps = result.total_env_steps;
        record.success_prob = eval.success_probability;
        record.disc_reward = eval.mean_disc_reward;
        record.wall_secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        record.plan = plan_path(policy, result.last_adp.options, spec);
        result.curve.push_back(record);
        if (on_iteration) on_iteration(result, record);
    }
    return result;
}

}  // namespace avi
