#include <cmath>

#include "avi/planner.hpp"
#include "doctest.h"

using namespace avi;

namespace {

// Two-region chain: A (id 1) -> g (id 2).
IntervalAdp one_step_chain(double gamma, double t_lo, double t_hi, double r_lo, double r_hi) {
    IntervalAdp adp;
    adp.gamma = gamma;
    adp.region_ids = {1, 2};
    adp.options = {{1, 2}};
    adp.t_inf = {{0.0, t_lo}};
    adp.t_sup = {{0.0, t_hi}};
    adp.r_inf = {r_lo};
    adp.r_sup = {r_hi};
    adp.start_counts = {1};
    return adp;
}

}  // namespace

TEST_CASE("one-step fixed point") {
    double g = 0.95;
    IntervalAdp adp = one_step_chain(g, g * g, g * g, g, g);
    IntervalViResult vi = interval_vi(adp);
    REQUIRE(vi.inf.converged);
    REQUIRE(vi.sup.converged);
    CHECK(vi.inf.v[0] == doctest::Approx(0.95).epsilon(1e-7));
    CHECK(vi.sup.v[0] == doctest::Approx(0.95).epsilon(1e-7));
    CHECK(vi.inf.v[1] == 0.0);  // goal keeps value zero
}

TEST_CASE("three-region chain fixed points") {
    double g = 0.9;
    IntervalAdp adp;
    adp.gamma = g;
    adp.region_ids = {1, 2, 3};  // A, B, goal
    adp.options = {{1, 2}, {2, 3}};
    adp.t_inf = {{0.0, g * g * g, 0.0}, {0.0, 0.0, g}};
    adp.t_sup = {{0.0, g, 0.0}, {0.0, 0.0, g}};
    adp.r_inf = {0.0, 1.0};
    adp.r_sup = {0.0, 1.0};
    adp.start_counts = {2, 1};
    IntervalViResult vi = interval_vi(adp);
    CHECK(vi.inf.v[1] == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(vi.sup.v[1] == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(vi.sup.v[0] == doctest::Approx(0.9).epsilon(1e-7));
    CHECK(vi.inf.v[0] == doctest::Approx(0.729).epsilon(1e-7));

    // residual decay obeys the contraction factor
    auto [eps_t, eps_r] = epsilons(adp);
    double factor = g + 3 * eps_t;
    for (const ViResult* r : {&vi.inf, &vi.sup}) {
        for (size_t i = 1; i < r->residuals.size(); ++i)
            CHECK(r->residuals[i] <= factor * r->residuals[i - 1] + 1e-12);
    }
}

TEST_CASE("all-zero rewards give the zero fixed point") {
    IntervalAdp adp = one_step_chain(0.95, 0.5, 0.9, 0.0, 0.0);
    IntervalViResult vi = interval_vi(adp);
    CHECK(vi.inf.v[0] == 0.0);
    CHECK(vi.sup.v[0] == 0.0);
    CHECK(vi.inf.iterations <= 2);
}

TEST_CASE("policy extraction: argmax, ties, structural errors") {
    AbstractSpec spec;
    spec.regions.push_back({1, {{0, 0}, {1, 1}}, {0.5, 0.5}});
    spec.regions.push_back({2, {{2, 0}, {3, 1}}, {2.5, 0.5}});
    spec.regions.push_back({3, {{4, 0}, {5, 1}}, {4.5, 0.5}});
    spec.initial_id = 1;
    spec.goal_id = 3;
    std::vector<Edge> options{{1, 2}, {1, 3}, {2, 3}};

    AbstractPolicy p1 = extract_policy({0.5, 0.7, 0.2}, options, spec, PolicyProvenance::expected);
    CHECK(p1.choice_for(1) == 1);
    CHECK(p1.choice_for(2) == 2);
    CHECK(p1.choice_for(3) == -1);

    AbstractPolicy p2 = extract_policy({0.7, 0.7, 0.2}, options, spec, PolicyProvenance::expected);
    CHECK(p2.choice_for(1) == 0);  // exact tie breaks to the lower option index

    std::vector<Edge> missing{{1, 2}};
    CHECK_THROWS(extract_policy({0.5}, missing, spec, PolicyProvenance::expected));

    // scaling rewards does not change the argmax
    AbstractPolicy p3 =
        extract_policy({5 * 0.5, 5 * 0.7, 5 * 0.2}, options, spec, PolicyProvenance::expected);
    CHECK(p3.choice_for(1) == p1.choice_for(1));

    std::vector<int> path = plan_path(p1, options, spec);
    CHECK(path == std::vector<int>{1, 3});
}

TEST_CASE("value scaling is linear in the rewards") {
    double g = 0.9, c = 3.5;
    IntervalAdp adp = one_step_chain(g, g * g, g * g, 0.4, 0.4);
    IntervalAdp scaled = adp;
    scaled.r_inf[0] *= c;
    scaled.r_sup[0] *= c;
    IntervalViResult a = interval_vi(adp);
    IntervalViResult b = interval_vi(scaled);
    CHECK(b.inf.v[0] == doctest::Approx(c * a.inf.v[0]).epsilon(1e-7));
}

TEST_CASE("contraction check arithmetic") {
    ContractionCheck a = check_contraction(9, 0.004, 0.95);
    CHECK(a.holds);
    CHECK(a.factor == doctest::Approx(0.986));
    ContractionCheck b = check_contraction(14, 0.005, 0.95);
    CHECK_FALSE(b.holds);
    ContractionCheck c = check_contraction(30, 0.0, 0.95);
    CHECK(c.holds);
    CHECK(c.factor == doctest::Approx(0.95));
}

TEST_CASE("suboptimality bound arithmetic") {
    CHECK(suboptimality_bound(5, 0.0, 0.0, 0.9) == 0.0);
    CHECK(suboptimality_bound(3, 0.02, 0.05, 0.9) == doctest::Approx(16.25));
    CHECK(std::isinf(suboptimality_bound(14, 0.005, 0.1, 0.95)));
}

TEST_CASE("divergent sup recursion is reported, inf side still converges") {
    // Row sums above 1 on the sup side: three short transitions out of one
    // region.
    IntervalAdp adp;
    adp.gamma = 0.95;
    adp.region_ids = {1, 2, 3, 4};
    adp.options = {{1, 2}, {2, 1}, {3, 1}, {2, 3}};
    adp.t_inf = {{0, 0, 0, 0}, {0, 0, 0, 0}, {0, 0, 0, 0}, {0, 0, 0, 0}};
    adp.t_sup = {{0.9, 0.9, 0.9, 0}, {0.9, 0, 0.9, 0}, {0.9, 0.9, 0, 0}, {0, 0.9, 0.9, 0}};
    adp.r_inf = {0.1, 0.1, 0.1, 0.1};
    adp.r_sup = {0.5, 0.5, 0.5, 0.5};
    adp.start_counts = {1, 1, 1, 1};
    IntervalViResult vi = interval_vi(adp, 1e-8, 3000);
    CHECK(vi.inf.converged);
    CHECK_FALSE(vi.sup.converged);
    CHECK(vi.sup.residuals.back() > 0.0);
}
