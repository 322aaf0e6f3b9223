#include <unistd.h>

#include <filesystem>
#include <fstream>

#include "avi/config.hpp"
#include "avi/experiment.hpp"
#include "avi/serial.hpp"
#include "doctest.h"
#include "test_helpers.hpp"

using namespace avi;
namespace fs = std::filesystem;

namespace {
struct TempDir {
    fs::path path;
    TempDir() : path(fs::temp_directory_path() / ("avi_io_" + std::to_string(::getpid()))) {
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string str(const std::string& name) const { return (path / name).string(); }
};
}  // namespace

TEST_CASE("spec round-trip preserves everything") {
    ConcreteEnv env = build_env("nine_rooms");
    AbstractSpec spec = doorway_spec(env);
    TempDir tmp;
    save_spec(spec, tmp.str("spec.txt"));
    AbstractSpec loaded = load_spec(tmp.str("spec.txt"));
    REQUIRE(loaded.regions.size() == spec.regions.size());
    for (size_t i = 0; i < spec.regions.size(); ++i) {
        CHECK(loaded.regions[i].id == spec.regions[i].id);
        CHECK(loaded.regions[i].box.lo.x == spec.regions[i].box.lo.x);
        CHECK(loaded.regions[i].center.y == spec.regions[i].center.y);
    }
    CHECK(loaded.edges.size() == spec.edges.size());
    CHECK(loaded.initial_id == spec.initial_id);
    CHECK(loaded.goal_id == spec.goal_id);
    CHECK(validate(loaded).ok());
}

TEST_CASE("policy and normalizer round-trip bit-exactly") {
    MlpPolicy policy;
    Rng rng(17);
    std::normal_distribution<double> g(0.0, 1.0);
    for (double& p : policy.params()) p = g(rng);
    RunningNorm norm(2);
    for (int i = 0; i < 37; ++i) {
        double x[2] = {g(rng) * 10, g(rng) * 3};
        norm.observe(x);
    }

    TempDir tmp;
    save_policy(policy, tmp.str("p.pol"));
    save_norm(norm, tmp.str("p.norm"));
    MlpPolicy lp = load_policy(tmp.str("p.pol"));
    RunningNorm ln = load_norm(tmp.str("p.norm"));
    auto a = policy.params();
    auto b = lp.params();
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
    CHECK(ln.count == norm.count);
    for (int i = 0; i < 2; ++i) {
        CHECK(ln.mean[i] == doctest::Approx(norm.mean[i]).epsilon(1e-15));
        CHECK(ln.m2[i] == doctest::Approx(norm.m2[i]).epsilon(1e-15));
    }
    // identical behavior after reload
    Action original = act(policy, {3.0, 4.0}, &norm, 1.0);
    Action reloaded = act(lp, {3.0, 4.0}, &ln, 1.0);
    CHECK(original.speed == doctest::Approx(reloaded.speed).epsilon(1e-15));
    CHECK(original.heading == doctest::Approx(reloaded.heading).epsilon(1e-15));

    CHECK_THROWS(load_policy(tmp.str("p.norm")));
}

TEST_CASE("option set round-trip") {
    OptionSet options;
    options.push_back(avi::testing::constant_option({1, 2}, 3.0, -1.0));
    options.push_back(avi::testing::constant_option({2, 5}, -2.0, 0.5));
    TempDir tmp;
    save_options(options, tmp.str("options"));
    OptionSet loaded = load_options(tmp.str("options"));
    REQUIRE(loaded.size() == 2);
    CHECK(loaded[1].edge.src == 2);
    CHECK(loaded[1].edge.dst == 5);
    CHECK(option_index(loaded, 2, 5) == 1);
    auto pa = options[0].policy.params(), pb = loaded[0].policy.params();
    for (size_t i = 0; i < pa.size(); ++i) CHECK(pa[i] == pb[i]);
}

TEST_CASE("distribution round-trip") {
    RegionDistribution d;
    d.pool_capacity = 4;
    d.region_ids = {1, 9};
    d.pools = {{{{0.5, 0.25}, 1.0}, {{0.75, 0.5}, 2.0}}, {}};
    TempDir tmp;
    save_distribution(d, tmp.str("d.txt"));
    RegionDistribution loaded = load_distribution(tmp.str("d.txt"));
    CHECK(loaded.pool_capacity == 4);
    REQUIRE(loaded.pools.size() == 2);
    REQUIRE(loaded.pools[0].size() == 2);
    CHECK(loaded.pools[0][1].state.x == 0.75);
    CHECK(loaded.pools[0][1].weight == 2.0);
    CHECK(loaded.pools[1].empty());
}

TEST_CASE("curve file format") {
    TempDir tmp;
    CurveWriter writer(tmp.str("curve.csv"));
    writer.append(1, 1000, 0.5, 0.25, 1.5);
    writer.append(2, 2000, 0.75, 0.3, 3.0);
    std::ifstream in(tmp.str("curve.csv"));
    std::string header, row1, row2;
    std::getline(in, header);
    std::getline(in, row1);
    std::getline(in, row2);
    CHECK(header == "iteration,env_steps,success_prob,disc_reward,wall_secs");
    CHECK(row1.substr(0, 12) == "1,1000,0.5,0");
    CHECK(row2.rfind("2,2000,0.75", 0) == 0);
}

TEST_CASE("config parsing, sections and overrides") {
    KeyValueConfig cfg = KeyValueConfig::from_string(
        "# comment\n[env]\nname = sixteen_rooms\nroom_size = 6.5\n\n[run]\nseeds = 1, 2, 3\n"
        "budget = 500000\n");
    CHECK(cfg.get_string("env.name", "") == "sixteen_rooms");
    CHECK(cfg.get_double("env.room_size", 0) == 6.5);
    CHECK(cfg.get_long("run.budget", 0) == 500000);
    auto seeds = cfg.get_seed_list("run.seeds", {});
    REQUIRE(seeds.size() == 3);
    CHECK(seeds[2] == 3);
    CHECK(cfg.get_int("missing.key", 42) == 42);
    CHECK_THROWS(KeyValueConfig::from_string("novalue\n"));

    ExperimentConfig e = experiment_from_config(cfg);
    CHECK(e.env_name == "sixteen_rooms");
    CHECK(e.env.room_size == 6.5);
    CHECK(e.aavi.budget == 500000);
    // defaults survive the round trip
    KeyValueConfig back = experiment_to_config(e);
    ExperimentConfig e2 = experiment_from_config(back);
    CHECK(e2.aavi.ars.n_directions == e.aavi.ars.n_directions);
    CHECK(e2.seeds == e.seeds);
}
