#include <cmath>

#include "avi/oracle.hpp"
#include "avi/planner.hpp"
#include "doctest.h"

using namespace avi;
using namespace avi::oracle;

namespace {

// 1x3 corridor: left cell is the start region, right cell the goal.
TabularInstance corridor(double gamma = 0.95) {
    TabularInstance inst;
    inst.width = 3;
    inst.height = 1;
    inst.gamma = gamma;
    inst.blocked.assign(3, 0);
    inst.region_of = {1, -1, 2};
    inst.region_ids = {1, 2};
    inst.region_cells = {{0}, {2}};
    inst.initial_id = 1;
    inst.goal_id = 2;
    inst.edges = {{1, 2}};
    return inst;
}

std::vector<int> conservative_choice(const TabularInstance& inst,
                                     const std::vector<GridOption>& options) {
    IntervalAdp tables = exact_tables(inst, options);
    IntervalViResult vi = interval_vi(tables);
    AbstractPolicy rho = extract_policy(vi.inf.q, tables.options, tables.region_ids, inst.goal_id,
                                        PolicyProvenance::conservative);
    std::vector<int> choice(inst.region_ids.size(), -1);
    for (size_t i = 0; i < inst.region_ids.size(); ++i) choice[i] = rho.choice_for(inst.region_ids[i]);
    return choice;
}

}  // namespace

TEST_CASE("corridor option value") {
    TabularInstance inst = corridor();
    auto options = ideal_options(inst);
    REQUIRE(options.size() == 1);
    GridRollout roll = run_option(inst, options[0], 0);
    CHECK(roll.steps == 2);
    CHECK(roll.terminal_region == 2);
    CHECK(roll.disc_reward == doctest::Approx(0.95));  // gamma^(t-1) with t = 2

    OptionViResult vi = exact_option_vi(inst, options);
    CHECK(vi.v[0] == doctest::Approx(0.95).epsilon(1e-9));
    CHECK(vi.v[2] == 0.0);  // already at the goal

    // a dominated option that walks away forever leaves the optimum unchanged
    std::vector<GridOption> more = options;
    GridOption dead{{1, 2}, std::vector<uint8_t>(inst.n_states(), 3)};  // walks left forever
    more.push_back(dead);
    OptionViResult vi2 = exact_option_vi(inst, more);
    CHECK(vi2.v[0] == doctest::Approx(vi.v[0]).epsilon(1e-12));
}

TEST_CASE("exact tables: singleton and two-state regions") {
    TabularInstance inst = corridor(0.9);
    auto options = ideal_options(inst);
    IntervalAdp tables = exact_tables(inst, options);
    auto [eps_t, eps_r] = epsilons(tables);
    CHECK(eps_t == 0.0);
    CHECK(eps_r == 0.0);

    // widen the start region to two cells at different distances
    TabularInstance wide;
    wide.width = 4;
    wide.height = 1;
    wide.gamma = 0.9;
    wide.blocked.assign(4, 0);
    wide.region_of = {1, 1, -1, 2};
    wide.region_ids = {1, 2};
    wide.region_cells = {{0, 1}, {3}};
    wide.initial_id = 1;
    wide.goal_id = 2;
    wide.edges = {{1, 2}};
    auto wopt = ideal_options(wide);
    IntervalAdp wt = exact_tables(wide, wopt);
    int goal_idx = wide.region_index(2);
    CHECK(wt.t_inf[0][goal_idx] == doctest::Approx(std::pow(0.9, 3)));
    CHECK(wt.t_sup[0][goal_idx] == doctest::Approx(std::pow(0.9, 2)));
}

TEST_CASE("exact policy value matches the optimum on the corridor") {
    TabularInstance inst = corridor();
    auto options = ideal_options(inst);
    OptionViResult star = exact_option_vi(inst, options);
    PolicyValue rho = exact_policy_value(inst, options, {0, -1});
    CHECK(rho.v[0] == doctest::Approx(star.v[0]).epsilon(1e-12));
    CHECK(rho.j == doctest::Approx(star.v[0]).epsilon(1e-12));

    // a never-terminating option earns nothing
    GridOption stuck{{1, 2}, std::vector<uint8_t>(inst.n_states(), 3)};
    PolicyValue zero = exact_policy_value(inst, {stuck}, {0, -1});
    CHECK(zero.v[0] == 0.0);
    CHECK(zero.j == 0.0);
}

TEST_CASE("random instances are reproducible and satisfy the invariants") {
    TabularInstance a = random_instance(11);
    TabularInstance b = random_instance(11);
    CHECK(a.width == b.width);
    CHECK(a.region_of == b.region_of);
    CHECK(a.edges.size() == b.edges.size());
    CHECK(to_text(a) == to_text(b));

    for (int seed = 0; seed < 10; ++seed) {
        TabularInstance inst = random_instance(seed);
        CHECK(inst.n_states() <= 200);
        CHECK(inst.initial_id != inst.goal_id);
        for (const Edge& e : inst.edges) {
            CHECK(e.src != inst.goal_id);
            CHECK(e.src != e.dst);
        }
        // region cells are mutually exclusive by construction of region_of;
        // goal cells are sinks
        for (int s : inst.region_cells[inst.region_index(inst.goal_id)])
            for (int act = 0; act < 4; ++act) CHECK(inst.transition(s, act) == s);
        // contraction condition holds by generation
        auto options = ideal_options(inst);
        IntervalAdp tables = exact_tables(inst, options);
        auto [eps_t, eps_r] = epsilons(tables);
        CHECK(inst.gamma + inst.region_ids.size() * eps_t < 1.0);
    }
}

TEST_CASE("value bounds sandwich the concrete optimum") {
    for (int seed = 100; seed < 110; ++seed) {
        TabularInstance inst = random_instance(seed);
        auto options = ideal_options(inst);
        IntervalAdp tables = exact_tables(inst, options);
        IntervalViResult vi = interval_vi(tables, 1e-12, 200000);
        REQUIRE(vi.inf.converged);
        REQUIRE(vi.sup.converged);
        OptionViResult star = exact_option_vi(inst, options);
        for (size_t ri = 0; ri < inst.region_ids.size(); ++ri) {
            for (int s : inst.region_cells[ri]) {
                CHECK(vi.inf.v[ri] <= star.v[s] + 1e-9);
                CHECK(vi.sup.v[ri] >= star.v[s] - 1e-9);
            }
        }
    }
}

TEST_CASE("conservative policy achieves the lower value bound") {
    for (int seed = 200; seed < 208; ++seed) {
        TabularInstance inst = random_instance(seed);
        auto options = ideal_options(inst);
        IntervalAdp tables = exact_tables(inst, options);
        IntervalViResult vi = interval_vi(tables, 1e-12, 200000);
        PolicyValue rho = exact_policy_value(inst, options, conservative_choice(inst, options));
        for (size_t ri = 0; ri < inst.region_ids.size(); ++ri)
            for (int s : inst.region_cells[ri]) CHECK(rho.v[s] >= vi.inf.v[ri] - 1e-9);
    }
}

TEST_CASE("bottleneck corridor forces the door sequence") {
    TabularInstance inst = bottleneck_instance(4, 3);
    auto options = ideal_options(inst);
    IntervalAdp tables = exact_tables(inst, options);
    auto [eps_t, eps_r] = epsilons(tables);
    CHECK(eps_t == 0.0);  // all source regions are singletons

    ConcreteViResult star = exact_concrete_vi(inst);
    int s0 = inst.region_cells[inst.region_index(inst.initial_id)][0];
    CHECK(star.v[s0] > 0.0);

    IntervalViResult vi = interval_vi(tables, 1e-12, 200000);
    int init_idx = inst.region_index(inst.initial_id);
    CHECK(star.v[s0] <= vi.sup.v[init_idx] + 1e-9);

    PolicyValue rho = exact_policy_value(inst, options, conservative_choice(inst, options));
    double bound = suboptimality_bound(static_cast<int>(inst.region_ids.size()), eps_t, eps_r,
                                       inst.gamma);
    CHECK(rho.j >= star.j - bound - 1e-9);
}
