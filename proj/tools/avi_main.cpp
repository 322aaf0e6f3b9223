// Command-line front end: train, eval, transfer, bound, regions.

#include <filesystem>
#include <iomanip>
#include <iostream>

#include "CLI11.hpp"
#include "avi/experiment.hpp"
#include "avi/oracle.hpp"
#include "avi/serial.hpp"

namespace fs = std::filesystem;
using namespace avi;

namespace {

struct CommonOpts {
    std::string config_file;
    ExperimentConfig cfg;
};

void add_experiment_options(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_file, "key/value config file; flags override it");
    cmd->add_option("--env", opts.cfg.env_name,
                    "nine_rooms | sixteen_rooms | nine_rooms_obstacle");
    cmd->add_option("--regions", opts.cfg.regions,
                    "doorways | room_centers | full_rooms | random | file");
    cmd->add_option("--spec-file", opts.cfg.spec_file, "abstraction file for --regions file");
    cmd->add_option("--n", opts.cfg.random_n, "random regions: number of sampled centers");
    cmd->add_option("--k", opts.cfg.random_k, "random regions: nearest neighbors per center");
    cmd->add_option("--half-width", opts.cfg.random_half_width, "random regions: box half-width");
    cmd->add_option("--room-size", opts.cfg.env.room_size);
    cmd->add_option("--doorway-width", opts.cfg.env.doorway_width);
    cmd->add_option("--wall-thickness", opts.cfg.env.wall_thickness);
    cmd->add_option("--max-speed", opts.cfg.env.max_speed);
    cmd->add_option("--gamma", opts.cfg.env.gamma);
}

ExperimentConfig resolve(CommonOpts& opts, CLI::App* cmd,
                         const std::function<void(ExperimentConfig&)>& apply_flags) {
    ExperimentConfig cfg;
    if (!opts.config_file.empty()) {
        cfg = experiment_from_config(KeyValueConfig::from_file(opts.config_file));
    } else {
        cfg.aavi.ars = rooms_ars_preset(cfg.env.room_size);
    }
    // CLI flags override file keys.
    auto passed = [&](const std::string& name) { return cmd->count(name) > 0; };
    if (passed("--env")) cfg.env_name = opts.cfg.env_name;
    if (passed("--regions")) cfg.regions = opts.cfg.regions;
    if (passed("--spec-file")) cfg.spec_file = opts.cfg.spec_file;
    if (passed("--n")) cfg.random_n = opts.cfg.random_n;
    if (passed("--k")) cfg.random_k = opts.cfg.random_k;
    if (passed("--half-width")) cfg.random_half_width = opts.cfg.random_half_width;
    if (passed("--room-size")) cfg.env.room_size = opts.cfg.env.room_size;
    if (passed("--doorway-width")) cfg.env.doorway_width = opts.cfg.env.doorway_width;
    if (passed("--wall-thickness")) cfg.env.wall_thickness = opts.cfg.env.wall_thickness;
    if (passed("--max-speed")) cfg.env.max_speed = opts.cfg.env.max_speed;
    if (passed("--gamma")) cfg.env.gamma = opts.cfg.env.gamma;
    if (passed("--room-size") && !passed("--config"))
        cfg.aavi.ars.distance_scale = cfg.env.room_size;
    apply_flags(cfg);
    return cfg;
}

int cmd_train(CommonOpts& opts, CLI::App* cmd, const ExperimentConfig& flags, bool flat_seed,
              uint64_t seed_flag) {
    ExperimentConfig cfg = resolve(opts, cmd, [&](ExperimentConfig& c) {
        auto passed = [&](const std::string& name) { return cmd->count(name) > 0; };
        if (passed("--iterations")) c.aavi.iterations = flags.aavi.iterations;
        if (passed("--ars-iters")) c.aavi.ars.iterations_per_round = flags.aavi.ars.iterations_per_round;
        if (passed("--ars-directions")) c.aavi.ars.n_directions = flags.aavi.ars.n_directions;
        if (passed("--ars-top")) c.aavi.ars.top_b = flags.aavi.ars.top_b;
        if (passed("--ars-step-size")) c.aavi.ars.step_size = flags.aavi.ars.step_size;
        if (passed("--ars-noise")) c.aavi.ars.noise = flags.aavi.ars.noise;
        if (passed("--horizon")) c.aavi.ars.episode_horizon = flags.aavi.ars.episode_horizon;
        if (passed("--alpha")) c.aavi.agg.alpha = flags.aavi.agg.alpha;
        if (passed("--harmonic-alpha")) c.aavi.agg.harmonic = flags.aavi.agg.harmonic;
        if (passed("--budget")) c.aavi.budget = flags.aavi.budget;
        if (passed("--eval-episodes")) c.aavi.eval_episodes = flags.aavi.eval_episodes;
        if (passed("--threads")) c.aavi.threads = flags.aavi.threads;
        if (passed("--seeds")) c.seeds = flags.seeds;
        if (flat_seed) c.seeds = {seed_flag};
        if (passed("--out")) c.out_dir = flags.out_dir;
        if (passed("--no-checkpoints")) c.write_checkpoints = false;
    });
    if (cfg.out_dir.empty())
        cfg.out_dir = default_out_root() + "/" + cfg.env_name + "_" + cfg.regions;

    std::cout << "train: env=" << cfg.env_name << " regions=" << cfg.regions
              << " iterations=" << cfg.aavi.iterations << " seeds=" << cfg.seeds.size()
              << " out=" << cfg.out_dir << "\n";
    ExperimentResult result = run_experiment(cfg);
    for (const auto& s : result.per_seed) {
        const auto& last = s.result.curve.back();
        std::cout << "seed " << s.seed << ": steps=" << last.env_steps
                  << " success=" << last.success_prob << " disc_reward=" << last.disc_reward
                  << " plan=";
        for (size_t i = 0; i < last.plan.size(); ++i)
            std::cout << (i ? "->" : "") << last.plan[i];
        std::cout << "\n";
    }
    if (!result.mean_success_by_iter.empty())
        std::cout << "mean final success: " << result.mean_success_by_iter.back() << "\n";
    return 0;
}

int cmd_eval(const std::string& artifacts, int episodes, uint64_t seed) {
    std::string run_dir = fs::path(artifacts).parent_path().string();
    KeyValueConfig file = KeyValueConfig::from_file(run_dir + "/../config.txt");
    ExperimentConfig cfg = experiment_from_config(file);
    AbstractSpec spec = load_spec(run_dir + "/spec.txt");
    ConcreteEnv env = make_env(cfg);
    const SubgoalRegion* start = spec.find(spec.initial_id);
    const SubgoalRegion* goal = spec.find(spec.goal_id);
    env = env.with_task_boxes(start->box, goal->box);

    OptionSet options = load_options(artifacts + "/options");
    LoadedAbstractPolicy loaded = load_abstract_policy(artifacts + "/policy.txt");
    // remap loaded edges onto the option set
    AbstractPolicy policy;
    policy.provenance = loaded.policy.provenance;
    for (size_t i = 0; i < loaded.policy.region_ids.size(); ++i) {
        const Edge& e = loaded.edges[loaded.policy.option[i]];
        int idx = option_index(options, e.src, e.dst);
        if (idx < 0) throw std::runtime_error("eval: policy references missing option");
        policy.region_ids.push_back(loaded.policy.region_ids[i]);
        policy.option.push_back(idx);
    }
    std::vector<Edge> edges;
    for (const auto& o : options) edges.push_back(o.edge);

    EvalReport report = evaluate_policy(env, spec, options, policy, episodes, 2 * spec.size(),
                                        cfg.aavi.ars.episode_horizon, seed);
    std::cout << "episodes " << report.episodes << "\n";
    std::cout << "success_probability " << report.success_probability << "\n";
    std::cout << "mean_disc_reward " << report.mean_disc_reward << "\n";
    std::cout << "env_steps " << report.env_steps << "\n";
    return 0;
}

int cmd_transfer(const std::string& artifacts, const std::string& env_name, int grid,
                 int episodes, uint64_t seed, const std::string& out_dir) {
    std::string run_dir = fs::path(artifacts).parent_path().string();
    KeyValueConfig file = KeyValueConfig::from_file(run_dir + "/../config.txt");
    ExperimentConfig cfg = experiment_from_config(file);
    cfg.env_name = env_name;
    ConcreteEnv env = make_env(cfg);
    AbstractSpec spec = load_spec(run_dir + "/spec.txt");
    OptionSet options = load_options(artifacts + "/options");

    TransferResult t = run_transfer(env, spec, options, grid, cfg.aavi.ars.episode_horizon,
                                    episodes, 0, seed);
    std::cout << "estimation_steps " << t.estimation_steps << "\n";
    std::cout << "eps_t " << t.eps_t << " eps_r " << t.eps_r << "\n";
    std::cout << "plan ";
    for (size_t i = 0; i < t.plan.size(); ++i) std::cout << (i ? "->" : "") << t.plan[i];
    std::cout << "\nsuccess_probability " << t.eval.success_probability << "\n";
    std::cout << "mean_disc_reward " << t.eval.mean_disc_reward << "\n";
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        save_interval_adp(t.adp, out_dir + "/adp.txt");
        IntervalViResult vi = interval_vi(t.adp);
        save_abstract_policy(t.policy, t.adp.options, vi.inf.v, t.adp.region_ids,
                             out_dir + "/policy.txt");
    }
    return 0;
}

int cmd_bound(int n_regions, double eps_t, double eps_r, double gamma) {
    ContractionCheck check = check_contraction(n_regions, eps_t, gamma);
    std::cout << "contraction_factor " << check.factor << "\n";
    std::cout << "assumption_holds " << (check.holds ? "yes" : "no") << "\n";
    if (check.holds)
        std::cout << "suboptimality_bound " << suboptimality_bound(n_regions, eps_t, eps_r, gamma)
                  << "\n";
    else
        std::cout << "suboptimality_bound unbounded\n";
    return check.holds ? 0 : 2;
}

int cmd_regions(CommonOpts& opts, CLI::App* cmd, const std::string& out, uint64_t seed) {
    ExperimentConfig cfg = resolve(opts, cmd, [](ExperimentConfig&) {});
    auto [env, spec] = make_task(cfg, seed);
    ValidationReport report = validate(spec);
    std::cout << "regions " << spec.regions.size() << " edges " << spec.edges.size() << "\n";
    std::cout << "start " << spec.initial_id << " goal " << spec.goal_id << "\n";
    std::cout << (report.ok() ? "valid" : "INVALID") << "\n";
    for (const auto& v : report.violations) std::cout << "violation: " << v << "\n";
    if (!out.empty()) {
        save_spec(spec, out);
        std::cout << "wrote " << out << "\n";
    }
    return report.ok() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hierarchical RL over subgoal regions: option training and abstract planning"};
    app.require_subcommand(1);
    std::cout << std::setprecision(10);

    CommonOpts train_opts, regions_opts;
    ExperimentConfig train_flags;
    bool no_checkpoints = false;
    uint64_t train_seed = 0;
    std::string seeds_csv;

    CLI::App* train = app.add_subcommand("train", "run the alternation loop and save artifacts");
    add_experiment_options(train, train_opts);
    train->add_option("--iterations", train_flags.aavi.iterations, "alternation iterations");
    train->add_option("--ars-iters", train_flags.aavi.ars.iterations_per_round);
    train->add_option("--ars-directions", train_flags.aavi.ars.n_directions);
    train->add_option("--ars-top", train_flags.aavi.ars.top_b);
    train->add_option("--ars-step-size", train_flags.aavi.ars.step_size);
    train->add_option("--ars-noise", train_flags.aavi.ars.noise);
    train->add_option("--horizon", train_flags.aavi.ars.episode_horizon);
    train->add_option("--alpha", train_flags.aavi.agg.alpha);
    train->add_flag("--harmonic-alpha", train_flags.aavi.agg.harmonic);
    train->add_option("--budget", train_flags.aavi.budget, "env-step cap for training");
    train->add_option("--eval-episodes", train_flags.aavi.eval_episodes);
    train->add_option("--threads", train_flags.aavi.threads);
    auto* seed_opt = train->add_option("--seed", train_seed, "single seed");
    train->add_option("--seeds", [&train_flags](const std::vector<std::string>& vals) {
        train_flags.seeds.clear();
        std::stringstream ss(vals.front());
        std::string tok;
        while (std::getline(ss, tok, ',')) train_flags.seeds.push_back(std::stoull(tok));
        return true;
    }, "comma-separated seed list");
    train->add_option("--out", train_flags.out_dir, "output directory");
    train->add_flag("--no-checkpoints", no_checkpoints, "skip per-iteration checkpoints");

    std::string eval_artifacts;
    int eval_episodes = 100;
    uint64_t eval_seed = 0;
    CLI::App* eval = app.add_subcommand("eval", "evaluate saved artifacts");
    eval->add_option("--artifacts", eval_artifacts, "run artifact dir (e.g. runs/x/seed0/final)")
        ->required();
    eval->add_option("--episodes", eval_episodes);
    eval->add_option("--seed", eval_seed);

    std::string tr_artifacts, tr_env = "nine_rooms_obstacle", tr_out;
    int tr_grid = 4, tr_episodes = 100;
    uint64_t tr_seed = 0;
    CLI::App* transfer = app.add_subcommand(
        "transfer", "replan with frozen options on a new environment (interval tables)");
    transfer->add_option("--artifacts", tr_artifacts)->required();
    transfer->add_option("--env", tr_env);
    transfer->add_option("--grid", tr_grid, "start grid g (g*g + center per region)");
    transfer->add_option("--episodes", tr_episodes);
    transfer->add_option("--seed", tr_seed);
    transfer->add_option("--out", tr_out);

    int b_regions = 0;
    double b_eps_t = 0.0, b_eps_r = 0.0, b_gamma = 0.95;
    CLI::App* bound = app.add_subcommand("bound", "performance-gap calculator");
    bound->add_option("--regions-count", b_regions)->required();
    bound->add_option("--eps-t", b_eps_t)->required();
    bound->add_option("--eps-r", b_eps_r)->required();
    bound->add_option("--gamma", b_gamma);

    std::string regions_out;
    uint64_t regions_seed = 0;
    CLI::App* regions = app.add_subcommand("regions", "generate, validate and print a spec");
    add_experiment_options(regions, regions_opts);
    regions->add_option("--out", regions_out);
    regions->add_option("--seed", regions_seed);

    CLI11_PARSE(app, argc, argv);

    try {
        if (train->parsed()) {
            if (no_checkpoints) train_flags.write_checkpoints = false;
            return cmd_train(train_opts, train, train_flags, seed_opt->count() > 0, train_seed);
        }
        if (eval->parsed()) return cmd_eval(eval_artifacts, eval_episodes, eval_seed);
        if (transfer->parsed())
            return cmd_transfer(tr_artifacts, tr_env, tr_grid, tr_episodes, tr_seed, tr_out);
        if (bound->parsed()) return cmd_bound(b_regions, b_eps_t, b_eps_r, b_gamma);
        if (regions->parsed()) return cmd_regions(regions_opts, regions, regions_out, regions_seed);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
