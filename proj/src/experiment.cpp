#include "avi/experiment.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <stdexcept>

#include "avi/serial.hpp"

namespace avi {

namespace fs = std::filesystem;

ArsConfig rooms_ars_preset(double room_size) {
    ArsConfig ars;
    ars.step_size = 0.02;
    ars.noise = 0.05;
    ars.n_directions = 6;
    ars.top_b = 3;
    ars.iterations_per_round = 30;
    ars.episode_horizon = 60;
    ars.normalize_obs = true;
    ars.distance_scale = room_size;
    return ars;
}

ExperimentConfig experiment_from_config(const KeyValueConfig& cfg) {
    ExperimentConfig e;
    e.env_name = cfg.get_string("env.name", e.env_name);
    e.env.room_size = cfg.get_double("env.room_size", e.env.room_size);
    e.env.doorway_width = cfg.get_double("env.doorway_width", e.env.doorway_width);
    e.env.wall_thickness = cfg.get_double("env.wall_thickness", e.env.wall_thickness);
    e.env.max_speed = cfg.get_double("env.max_speed", e.env.max_speed);
    e.env.gamma = cfg.get_double("env.gamma", e.env.gamma);
    e.env.contact_epsilon = cfg.get_double("env.contact_epsilon", e.env.contact_epsilon);

    e.regions = cfg.get_string("abstraction.kind", e.regions);
    e.spec_file = cfg.get_string("abstraction.file", e.spec_file);
    e.random_n = cfg.get_int("abstraction.n", e.random_n);
    e.random_k = cfg.get_int("abstraction.k", e.random_k);
    e.random_half_width = cfg.get_double("abstraction.half_width", e.random_half_width);

    e.aavi.ars = rooms_ars_preset(e.env.room_size);
    e.aavi.ars.step_size = cfg.get_double("ars.step_size", e.aavi.ars.step_size);
    e.aavi.ars.noise = cfg.get_double("ars.noise", e.aavi.ars.noise);
    e.aavi.ars.n_directions = cfg.get_int("ars.directions", e.aavi.ars.n_directions);
    e.aavi.ars.top_b = cfg.get_int("ars.top_b", e.aavi.ars.top_b);
    e.aavi.ars.iterations_per_round = cfg.get_int("ars.iterations", e.aavi.ars.iterations_per_round);
    e.aavi.ars.episode_horizon = cfg.get_int("ars.horizon", e.aavi.ars.episode_horizon);
    e.aavi.ars.normalize_obs = cfg.get_bool("ars.normalize", e.aavi.ars.normalize_obs);
    e.aavi.ars.distance_scale = cfg.get_double("ars.distance_scale", e.aavi.ars.distance_scale);

    e.aavi.iterations = cfg.get_int("aavi.iterations", e.aavi.iterations);
    e.aavi.agg.alpha = cfg.get_double("aavi.alpha", e.aavi.agg.alpha);
    e.aavi.agg.harmonic = cfg.get_bool("aavi.harmonic_alpha", e.aavi.agg.harmonic);
    e.aavi.agg.pool_capacity = cfg.get_int("aavi.pool_capacity", e.aavi.agg.pool_capacity);
    e.aavi.agg.init_fraction = cfg.get_double("aavi.init_fraction", e.aavi.agg.init_fraction);
    e.aavi.est_starts = cfg.get_int("estimation.starts", e.aavi.est_starts);
    e.aavi.est_rollouts = cfg.get_int("estimation.rollouts", e.aavi.est_rollouts);
    e.aavi.induction_episodes = cfg.get_int("aavi.induction_episodes", e.aavi.induction_episodes);
    e.aavi.max_option_steps = cfg.get_int("aavi.max_option_steps", e.aavi.max_option_steps);
    e.aavi.eval_episodes = cfg.get_int("run.eval_episodes", e.aavi.eval_episodes);
    e.aavi.budget = cfg.get_long("run.budget", e.aavi.budget);
    e.aavi.threads = cfg.get_int("run.threads", e.aavi.threads);

    e.seeds = cfg.get_seed_list("run.seeds", e.seeds);
    e.out_dir = cfg.get_string("run.out", e.out_dir);
    e.write_checkpoints = cfg.get_bool("run.checkpoints", e.write_checkpoints);
    return e;
}

KeyValueConfig experiment_to_config(const ExperimentConfig& e) {
    KeyValueConfig cfg;
    cfg.set("env.name", e.env_name);
    cfg.set("env.room_size", std::to_string(e.env.room_size));
    cfg.set("env.doorway_width", std::to_string(e.env.doorway_width));
    cfg.set("env.wall_thickness", std::to_string(e.env.wall_thickness));
    cfg.set("env.max_speed", std::to_string(e.env.max_speed));
    cfg.set("env.gamma", std::to_string(e.env.gamma));
    cfg.set("env.contact_epsilon", std::to_string(e.env.contact_epsilon));
    cfg.set("abstraction.kind", e.regions);
    if (!e.spec_file.empty()) cfg.set("abstraction.file", e.spec_file);
    cfg.set("abstraction.n", std::to_string(e.random_n));
    cfg.set("abstraction.k", std::to_string(e.random_k));
    cfg.set("abstraction.half_width", std::to_string(e.random_half_width));
    cfg.set("ars.step_size", std::to_string(e.aavi.ars.step_size));
    cfg.set("ars.noise", std::to_string(e.aavi.ars.noise));
    cfg.set("ars.directions", std::to_string(e.aavi.ars.n_directions));
    cfg.set("ars.top_b", std::to_string(e.aavi.ars.top_b));
    cfg.set("ars.iterations", std::to_string(e.aavi.ars.iterations_per_round));
    cfg.set("ars.horizon", std::to_string(e.aavi.ars.episode_horizon));
    cfg.set("ars.normalize", e.aavi.ars.normalize_obs ? "true" : "false");
    cfg.set("ars.distance_scale", std::to_string(e.aavi.ars.distance_scale));
    cfg.set("aavi.iterations", std::to_string(e.aavi.iterations));
    cfg.set("aavi.alpha", std::to_string(e.aavi.agg.alpha));
    cfg.set("aavi.harmonic_alpha", e.aavi.agg.harmonic ? "true" : "false");
    cfg.set("aavi.pool_capacity", std::to_string(e.aavi.agg.pool_capacity));
    cfg.set("aavi.init_fraction", std::to_string(e.aavi.agg.init_fraction));
    cfg.set("aavi.induction_episodes", std::to_string(e.aavi.induction_episodes));
    cfg.set("aavi.max_option_steps", std::to_string(e.aavi.max_option_steps));
    cfg.set("estimation.starts", std::to_string(e.aavi.est_starts));
    cfg.set("estimation.rollouts", std::to_string(e.aavi.est_rollouts));
    cfg.set("run.eval_episodes", std::to_string(e.aavi.eval_episodes));
    cfg.set("run.budget", std::to_string(e.aavi.budget));
    cfg.set("run.threads", std::to_string(e.aavi.threads));
    std::string seeds;
    for (size_t i = 0; i < e.seeds.size(); ++i)
        seeds += (i ? "," : "") + std::to_string(e.seeds[i]);
    cfg.set("run.seeds", seeds);
    if (!e.out_dir.empty()) cfg.set("run.out", e.out_dir);
    cfg.set("run.checkpoints", e.write_checkpoints ? "true" : "false");
    return cfg;
}

ConcreteEnv make_env(const ExperimentConfig& cfg) { return build_env(cfg.env_name, cfg.env); }

std::pair<ConcreteEnv, AbstractSpec> make_task(const ExperimentConfig& cfg, uint64_t seed) {
    ConcreteEnv env = make_env(cfg);
    AbstractSpec spec;
    if (cfg.regions == "doorways") {
        spec = doorway_spec(env);
    } else if (cfg.regions == "room_centers") {
        spec = room_center_spec(env);
    } else if (cfg.regions == "full_rooms") {
        spec = full_room_spec(env);
    } else if (cfg.regions == "random") {
        spec = random_spec(env, cfg.random_n, cfg.random_k, cfg.random_half_width, seed);
    } else if (cfg.regions == "file") {
        if (cfg.spec_file.empty()) throw std::runtime_error("regions=file needs abstraction.file");
        spec = load_spec(cfg.spec_file);
    } else {
        throw std::runtime_error("unknown abstraction kind: " + cfg.regions);
    }
    ValidationReport report = validate(spec);
    if (!report.ok())
        throw std::runtime_error("invalid abstraction: " + report.violations.front());

    const SubgoalRegion* start = spec.find(spec.initial_id);
    const SubgoalRegion* goal = spec.find(spec.goal_id);
    const RoomGeometry& g = env.geometry();
    bool same_boxes = start->box.contains(g.start_box.center()) &&
                      goal->box.contains(g.goal_box.center()) &&
                      g.start_box.contains(start->center) && g.goal_box.contains(goal->center);
    if (!same_boxes) env = env.with_task_boxes(start->box, goal->box);
    return {std::move(env), std::move(spec)};
}

namespace {

void write_checkpoint(const std::string& dir, const AaviResult& result,
                      const IterationRecord& record) {
    save_options(result.options, dir + "/options");
    // region-indexed values of the last expected plan
    ViResult vi = expected_vi(result.last_adp);
    save_abstract_policy(result.policy, result.last_adp.options, vi.v, result.last_adp.region_ids,
                         dir + "/policy.txt");
    save_distribution(result.dist, dir + "/dist.txt");
    save_expected_adp(result.last_adp, dir + "/adp.txt");
    std::ofstream plan(dir + "/plan.txt");
    for (size_t i = 0; i < record.plan.size(); ++i)
        plan << (i ? " " : "") << record.plan[i];
    plan << "\n";
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    ExperimentResult out;
    std::string root = cfg.out_dir;
    if (!root.empty()) {
        fs::create_directories(root);
        KeyValueConfig resolved = experiment_to_config(cfg);
        std::ofstream cfg_out(root + "/config.txt");
        cfg_out << resolved.to_text();
    }

    for (uint64_t seed : cfg.seeds) {
        auto [env, spec] = make_task(cfg, seed);
        std::string seed_dir = root.empty() ? "" : root + "/seed" + std::to_string(seed);
        std::optional<CurveWriter> curve;
        if (!root.empty()) {
            fs::create_directories(seed_dir);
            save_spec(spec, seed_dir + "/spec.txt");
            curve.emplace(seed_dir + "/curve.csv");
        }

        IterationCallback cb = [&](const AaviResult& r, const IterationRecord& rec) {
            if (curve)
                curve->append(rec.iteration, rec.env_steps, rec.success_prob, rec.disc_reward,
                              rec.wall_secs);
            if (!seed_dir.empty() && cfg.write_checkpoints)
                write_checkpoint(seed_dir + "/iter" + std::to_string(rec.iteration), r, rec);
        };
        AaviResult result = run_aavi(env, spec, cfg.aavi, seed, cb);
        if (!seed_dir.empty()) {
            write_checkpoint(seed_dir + "/final", result, result.curve.back());
        }
        out.per_seed.push_back({seed, std::move(result)});
    }

    // aggregated mean curve across seeds, by iteration index
    size_t iters = 0;
    for (const auto& s : out.per_seed) iters = std::max(iters, s.result.curve.size());
    out.mean_success_by_iter.assign(iters, 0.0);
    out.mean_reward_by_iter.assign(iters, 0.0);
    for (size_t i = 0; i < iters; ++i) {
        int n = 0;
        for (const auto& s : out.per_seed) {
            if (i >= s.result.curve.size()) continue;
            out.mean_success_by_iter[i] += s.result.curve[i].success_prob;
            out.mean_reward_by_iter[i] += s.result.curve[i].disc_reward;
            ++n;
        }
        if (n > 0) {
            out.mean_success_by_iter[i] /= n;
            out.mean_reward_by_iter[i] /= n;
        }
    }
    if (!root.empty() && iters > 0) {
        std::ofstream mean(root + "/curve_mean.csv");
        mean << "iteration,mean_env_steps,mean_success_prob,mean_disc_reward\n";
        mean << std::setprecision(10);
        for (size_t i = 0; i < iters; ++i) {
            double steps = 0.0;
            int n = 0;
            for (const auto& s : out.per_seed)
                if (i < s.result.curve.size()) {
                    steps += static_cast<double>(s.result.curve[i].env_steps);
                    ++n;
                }
            mean << (i + 1) << "," << (n ? steps / n : 0.0) << "," << out.mean_success_by_iter[i]
                 << "," << out.mean_reward_by_iter[i] << "\n";
        }
    }
    return out;
}

TransferResult run_transfer(const ConcreteEnv& target_env, const AbstractSpec& spec,
                            const OptionSet& options, int grid_points, int horizon,
                            int eval_episodes, int max_option_steps, uint64_t seed, int threads) {
    OptionSet usable;
    for (const auto& o : options)
        if (spec.has_edge(o.edge.src, o.edge.dst)) usable.push_back(o);

    TransferResult out;
    auto starts = grid_starts(spec, grid_points);
    IntervalEstimate est =
        estimate_interval(target_env, spec, usable, starts, 1, horizon, threads);
    out.adp = std::move(est.adp);
    out.estimation_steps = est.env_steps;
    std::tie(out.eps_t, out.eps_r) = epsilons(out.adp);

    IntervalViResult vi = interval_vi(out.adp);
    out.sup_converged = vi.sup.converged;
    out.policy = extract_policy(vi.inf.q, out.adp.options, spec, PolicyProvenance::conservative);
    out.plan = plan_path(out.policy, out.adp.options, spec);
    if (max_option_steps <= 0) max_option_steps = 2 * spec.size();
    out.eval = evaluate_policy(target_env, spec, usable, out.policy, eval_episodes,
                               max_option_steps, horizon, seed, threads);
    return out;
}

std::string default_out_root() {
    const char* env = std::getenv("AVI_OUT_ROOT");
    return env && *env ? env : "runs";
}

}  // namespace avi
