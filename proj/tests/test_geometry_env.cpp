#include <cmath>
#include <stdexcept>

#include "avi/env.hpp"
#include "doctest.h"
#include "test_helpers.hpp"

using namespace avi;

namespace {
constexpr double kPi = 3.14159265358979323846;

// Fine-step contact oracle: advances the motion in tiny increments until a
// wall or obstacle would be crossed, independent of the analytic intersection.
Vec2 micro_step(const ConcreteEnv& env, Vec2 s, Action a, int substeps = 200000) {
    double v = std::clamp(a.speed, 0.0, env.max_speed());
    Vec2 d{v * std::cos(a.heading), v * std::sin(a.heading)};
    Vec2 prev = s;
    for (int i = 1; i <= substeps; ++i) {
        Vec2 p = s + d * (static_cast<double>(i) / substeps);
        for (const Segment& w : env.geometry().wall_segments)
            if (segment_hit(prev, p, w)) return prev;
        for (const Box& b : env.geometry().obstacle_boxes)
            if (box_entry(prev, p, b)) return prev;
        prev = p;
    }
    return prev;
}
}  // namespace

TEST_CASE("open-room step follows the kinematics") {
    auto toy = testing::make_toy();
    Vec2 next = toy.env.step({1.0, 1.0}, {0.5, 0.0});
    CHECK(next.x == doctest::Approx(1.5));
    CHECK(next.y == doctest::Approx(1.0));

    // zero speed is a no-op for any heading
    for (double th : {0.0, 1.3, -2.0, 6.0}) {
        Vec2 same = toy.env.step({3.0, 4.0}, {0.0, th});
        CHECK(same.x == doctest::Approx(3.0));
        CHECK(same.y == doctest::Approx(4.0));
    }
}

TEST_CASE("wall contact truncates motion and retracts by contact epsilon") {
    auto toy = testing::make_toy();
    Vec2 next = toy.env.step({0.3, 1.0}, {1.0, kPi});  // heading left into x=0
    CHECK(next.x == doctest::Approx(toy.env.contact_epsilon()).epsilon(1e-3));
    CHECK(next.y == doctest::Approx(1.0));

    // against the micro-simulation oracle on a diagonal contact
    ConcreteEnv env = build_env("nine_rooms");
    Vec2 s{7.4, 10.2};
    Action a{1.0, 0.1};
    Vec2 analytic = env.step(s, a);
    Vec2 micro = micro_step(env, s, a);
    CHECK((analytic - micro).norm() < 1e-4);

    Vec2 s2{9.7, 9.8};
    Action a2{1.0, 3.3};
    CHECK((env.step(s2, a2) - micro_step(env, s2, a2)).norm() < 1e-4);
}

TEST_CASE("non-finite inputs are rejected") {
    auto toy = testing::make_toy();
    CHECK_THROWS_AS(toy.env.step({std::nan(""), 0.0}, {0.5, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(toy.env.step({1.0, 1.0}, {0.5, INFINITY}), std::invalid_argument);
    CHECK_THROWS_AS(toy.env.reward({1.0, 1.0}, {INFINITY, 0.0}), std::invalid_argument);
}

TEST_CASE("goal region is a zero-reward sink") {
    ConcreteEnv env = build_env("nine_rooms");
    Vec2 goal_center = env.geometry().goal_box.center();
    for (double th : {0.0, 1.0, 2.0, 4.0}) {
        Vec2 next = env.step(goal_center, {1.0, th});
        CHECK(next.x == goal_center.x);
        CHECK(next.y == goal_center.y);
        CHECK(env.reward(goal_center, {1.0, th}) == 0.0);
    }
}

TEST_CASE("reward pays exactly on goal entry") {
    auto toy = testing::make_toy();
    Vec2 adjacent{toy.env.geometry().goal_box.lo.x - 0.5, 6.0};
    CHECK(toy.env.reward(adjacent, {1.0, 0.0}) == 1.0);
    CHECK(toy.env.reward({2.0, 2.0}, {1.0, 0.0}) == 0.0);
}

TEST_CASE("deterministic trajectories and workspace containment") {
    ConcreteEnv env = build_env("nine_rooms_obstacle");
    Rng rng = make_rng(3, {rng_tag::env_init});
    Vec2 s = env.sample_initial(rng);
    Vec2 s_copy = s;
    std::uniform_real_distribution<double> uth(0.0, 2 * kPi);
    std::uniform_real_distribution<double> uv(0.0, 1.5);
    Rng action_rng(11);
    std::vector<Action> actions;
    for (int t = 0; t < 500; ++t) actions.push_back({uv(action_rng), uth(action_rng)});

    const RoomGeometry& g = env.geometry();
    for (const Action& a : actions) {
        s = env.step(s, a);
        CHECK(s.x >= -1e-9);
        CHECK(s.y >= -1e-9);
        CHECK(s.x <= g.workspace_width() + 1e-9);
        CHECK(s.y <= g.workspace_height() + 1e-9);
        for (const Box& b : g.obstacle_boxes) {
            bool strictly_inside = s.x > b.lo.x + 1e-9 && s.x < b.hi.x - 1e-9 &&
                                   s.y > b.lo.y + 1e-9 && s.y < b.hi.y - 1e-9;
            CHECK_FALSE(strictly_inside);
        }
    }
    // bitwise identical replay
    Vec2 r = s_copy;
    for (const Action& a : actions) r = env.step(r, a);
    CHECK(r.x == s.x);
    CHECK(r.y == s.y);
}

TEST_CASE("reward sparsity along trajectories") {
    ConcreteEnv env = build_env("nine_rooms");
    Rng rng(5);
    std::uniform_real_distribution<double> uth(0.0, 2 * kPi);
    for (int ep = 0; ep < 20; ++ep) {
        Vec2 s = env.sample_initial(rng);
        double total = 0.0;
        for (int t = 0; t < 300; ++t) {
            Action a{1.0, uth(rng)};
            auto tr = env.transition(s, a);
            total += tr.reward;
            s = tr.next;
        }
        CHECK((total == 0.0 || total == 1.0));
    }
}

TEST_CASE("build_env rejects unknown names and bad config") {
    CHECK_THROWS(build_env("ten_rooms"));
    EnvConfig bad;
    bad.gamma = 1.0;
    CHECK_THROWS(build_env("nine_rooms", bad));
    EnvConfig wide;
    wide.doorway_width = 9.0;
    CHECK_THROWS(build_env("nine_rooms", wide));
}

TEST_CASE("environment layouts") {
    ConcreteEnv nine = build_env("nine_rooms");
    CHECK(nine.geometry().obstacle_boxes.empty());
    CHECK(nine.geometry().grid_rows == 3);

    ConcreteEnv sixteen = build_env("sixteen_rooms");
    CHECK(sixteen.geometry().grid_rows == 4);
    CHECK(sixteen.geometry().obstacle_boxes.empty());

    ConcreteEnv obst = build_env("nine_rooms_obstacle");
    REQUIRE(obst.geometry().obstacle_boxes.size() == 1);
    Box room = obst.geometry().room_rect(1, 1);
    const Box& box = obst.geometry().obstacle_boxes[0];
    CHECK(room.contains(box.lo));
    CHECK(room.contains(box.hi));

    // initial states stay inside the start region
    Rng rng(1);
    for (int i = 0; i < 100; ++i) CHECK(nine.geometry().start_box.contains(nine.sample_initial(rng)));
}
