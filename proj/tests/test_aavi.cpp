#include <cmath>
#include <stdexcept>

#include "avi/aavi.hpp"
#include "doctest.h"
#include "test_helpers.hpp"

using namespace avi;

TEST_CASE("initial distribution: central squares, fixed size, reproducible") {
    AbstractSpec spec;
    spec.regions.push_back({1, {{0, 0}, {2, 2}}, {1, 1}});
    spec.regions.push_back({2, {{4, 0}, {6, 2}}, {5, 1}});
    spec.initial_id = 1;
    spec.goal_id = 2;
    spec.edges = {{1, 2}};

    RegionDistribution d = initial_distribution(spec, 200, 0.25, 9);
    REQUIRE(d.pools.size() == 2);
    CHECK(d.pools[0].size() == 200);
    for (const auto& w : d.pools[0]) {
        CHECK(w.state.x >= 0.75);
        CHECK(w.state.x <= 1.25);
        CHECK(w.state.y >= 0.75);
        CHECK(w.state.y <= 1.25);
    }
    RegionDistribution d2 = initial_distribution(spec, 200, 0.25, 9);
    for (size_t i = 0; i < d.pools[0].size(); ++i) {
        CHECK(d.pools[0][i].state.x == d2.pools[0][i].state.x);
        CHECK(d.pools[0][i].state.y == d2.pools[0][i].state.y);
    }
}

TEST_CASE("aggregation endpoints and mixing counts") {
    RegionDistribution d;
    d.pool_capacity = 200;
    d.region_ids = {1};
    d.pools = {std::vector<WeightedState>(50, {{0.0, 0.0}, 1.0})};
    RegionDistribution d_bar;
    d_bar.region_ids = {1};
    d_bar.pools = {std::vector<WeightedState>(10, {{1.0, 1.0}, 1.0})};

    auto count_at = [](const std::vector<WeightedState>& pool, double x) {
        int n = 0;
        for (const auto& w : pool) n += w.state.x == x ? 1 : 0;
        return n;
    };

    RegionDistribution all_new = aggregate(d, d_bar, 1.0, 3);
    CHECK(all_new.pools[0].size() == 200);
    CHECK(count_at(all_new.pools[0], 1.0) == 200);

    // alpha = 0 is the identity: D comes back untouched
    RegionDistribution all_old = aggregate(d, d_bar, 0.0, 3);
    CHECK(all_old.pools[0].size() == 50);
    CHECK(count_at(all_old.pools[0], 0.0) == 50);

    RegionDistribution half = aggregate(d, d_bar, 0.5, 3);
    CHECK(count_at(half.pools[0], 1.0) == 100);
    CHECK(count_at(half.pools[0], 0.0) == 100);
    CHECK(half.alpha_history.size() == 1);

    // missing induced pool falls back to the old one
    RegionDistribution empty_bar;
    empty_bar.region_ids = {1};
    empty_bar.pools = {{}};
    RegionDistribution fallback = aggregate(d, empty_bar, 0.5, 3);
    CHECK(count_at(fallback.pools[0], 0.0) == 200);

    CHECK_THROWS_AS(aggregate(d, d_bar, 1.5, 3), std::invalid_argument);
}

TEST_CASE("hierarchical execution on the toy corridor") {
    auto toy = testing::make_toy();
    OptionSet options;
    options.push_back(testing::constant_option({1, 2}, 40.0, 0.0));
    AbstractPolicy policy;
    policy.region_ids = {1};
    policy.option = {0};

    MlpScratch scratch;
    Vec2 start{2.0, 6.0};
    ExecutionResult r =
        execute_hierarchical(toy.env, toy.spec, options, policy, start, 4, 100, scratch);
    CHECK(r.reached_goal);
    // concrete reward discounts as gamma^(t-1) for t steps to the goal box
    CHECK(r.disc_reward == doctest::Approx(std::pow(toy.env.gamma(), r.steps - 1)));
    CHECK(r.regions_entered.back() == 2);

    // starting inside the goal is an immediate success with zero reward
    ExecutionResult g = execute_hierarchical(toy.env, toy.spec, options, policy,
                                             toy.spec.find(2)->center, 4, 100, scratch);
    CHECK(g.reached_goal);
    CHECK(g.steps == 0);
    CHECK(g.disc_reward == 0.0);

    // a zero option cap ends immediately without success
    ExecutionResult c = execute_hierarchical(toy.env, toy.spec, options, policy, start, 0, 100,
                                             scratch);
    CHECK_FALSE(c.reached_goal);
    CHECK(c.steps == 0);
}

TEST_CASE("induced distribution collects entry states inside their regions") {
    auto toy = testing::make_toy();
    OptionSet options;
    options.push_back(testing::constant_option({1, 2}, 40.0, 0.0));
    AbstractPolicy policy;
    policy.region_ids = {1};
    policy.option = {0};

    long steps = 0;
    RegionDistribution d_bar =
        induce_distribution(toy.env, toy.spec, options, policy, 20, 4, 100, 200, 5, &steps);
    CHECK(steps > 0);
    int goal_idx = d_bar.index_of(2);
    REQUIRE(d_bar.pools[goal_idx].size() == 20);
    for (const auto& w : d_bar.pools[goal_idx]) CHECK(toy.spec.find(2)->box.contains(w.state));
    // deterministic point entries from a deterministic policy family
    for (const auto& w : d_bar.pools[goal_idx]) CHECK(w.state.y == doctest::Approx(6.0).epsilon(0.2));
}

TEST_CASE("evaluation reports exact success fractions") {
    auto toy = testing::make_toy();
    OptionSet good;
    good.push_back(testing::constant_option({1, 2}, 40.0, 0.0));
    AbstractPolicy policy;
    policy.region_ids = {1};
    policy.option = {0};
    EvalReport r = evaluate_policy(toy.env, toy.spec, good, policy, 50, 4, 100, 7, 1);
    CHECK(r.success_probability == 1.0);
    CHECK(r.episodes == 50);
    CHECK(r.mean_disc_reward > 0.0);

    OptionSet bad;
    bad.push_back(testing::constant_option({1, 2}, -40.0, 0.0));  // speed ~ 0: never leaves
    EvalReport rb = evaluate_policy(toy.env, toy.spec, bad, policy, 20, 4, 60, 7, 1);
    CHECK(rb.success_probability == 0.0);

    EvalReport r2 = evaluate_policy(toy.env, toy.spec, good, policy, 50, 4, 100, 7, 1);
    CHECK(r2.success_probability == r.success_probability);
    CHECK(r2.mean_disc_reward == r.mean_disc_reward);
}

TEST_CASE("single-iteration run never aggregates and accounts its budget") {
    auto toy = testing::make_toy();
    AaviConfig cfg;
    cfg.iterations = 1;
    cfg.ars.n_directions = 4;
    cfg.ars.top_b = 2;
    cfg.ars.iterations_per_round = 6;
    cfg.ars.episode_horizon = 30;
    cfg.ars.distance_scale = 12.0;
    cfg.est_starts = 4;
    cfg.eval_episodes = 10;
    cfg.threads = 1;

    AaviResult r = run_aavi(toy.env, toy.spec, cfg, 21);
    CHECK(r.curve.size() == 1);
    CHECK(r.total_env_steps == r.steps_training + r.steps_estimation + r.steps_induction);
    CHECK(r.steps_induction == 0);  // no aggregation pass on the last iteration
    CHECK(r.curve.back().env_steps == r.total_env_steps);

    // D stayed exactly the initial distribution
    RegionDistribution init = initial_distribution(toy.spec, cfg.agg.pool_capacity,
                                                   cfg.agg.init_fraction, 21);
    REQUIRE(r.dist.pools.size() == init.pools.size());
    for (size_t i = 0; i < init.pools.size(); ++i) {
        REQUIRE(r.dist.pools[i].size() == init.pools[i].size());
        for (size_t j = 0; j < init.pools[i].size(); ++j)
            CHECK(r.dist.pools[i][j].state.x == init.pools[i][j].state.x);
    }
    CHECK(r.dist.alpha_history.empty());
}

TEST_CASE("multi-iteration run keeps pools inside regions and curves monotone in steps") {
    auto toy = testing::make_toy();
    AaviConfig cfg;
    cfg.iterations = 3;
    cfg.ars.n_directions = 4;
    cfg.ars.top_b = 2;
    cfg.ars.iterations_per_round = 8;
    cfg.ars.episode_horizon = 30;
    cfg.ars.distance_scale = 12.0;
    cfg.est_starts = 4;
    cfg.eval_episodes = 10;
    cfg.induction_episodes = 10;
    cfg.threads = 1;

    AaviResult r = run_aavi(toy.env, toy.spec, cfg, 4);
    CHECK(r.curve.size() == 3);
    for (size_t i = 1; i < r.curve.size(); ++i)
        CHECK(r.curve[i].env_steps >= r.curve[i - 1].env_steps);
    CHECK(r.dist.alpha_history.size() == 2);
    for (size_t i = 0; i < r.dist.pools.size(); ++i) {
        const SubgoalRegion* region = toy.spec.find(r.dist.region_ids[i]);
        for (const auto& w : r.dist.pools[i]) CHECK(region->box.contains(w.state, 1e-9));
    }
    CHECK(r.total_env_steps ==
          r.steps_training + r.steps_estimation + r.steps_induction);

    // alpha = 0 keeps D fixed across iterations
    AaviConfig frozen = cfg;
    frozen.agg.alpha = 0.0;
    AaviResult rf = run_aavi(toy.env, toy.spec, frozen, 4);
    RegionDistribution init = initial_distribution(toy.spec, cfg.agg.pool_capacity,
                                                   cfg.agg.init_fraction, 4);
    bool same = true;
    for (size_t i = 0; i < init.pools.size() && same; ++i)
        for (size_t j = 0; j < init.pools[i].size() && same; ++j)
            same = rf.dist.pools[i][j].state.x == init.pools[i][j].state.x;
    CHECK(same);

    // identical seeds reproduce identical curves
    AaviResult r2 = run_aavi(toy.env, toy.spec, cfg, 4);
    for (size_t i = 0; i < r.curve.size(); ++i) {
        CHECK(r.curve[i].env_steps == r2.curve[i].env_steps);
        CHECK(r.curve[i].success_prob == r2.curve[i].success_prob);
        CHECK(r.curve[i].disc_reward == r2.curve[i].disc_reward);
    }
}
