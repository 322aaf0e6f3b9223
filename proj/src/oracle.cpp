#include "avi/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "avi/rng.hpp"

namespace avi::oracle {

namespace {
// N, E, S, W
constexpr int kDx[4] = {0, 1, 0, -1};
constexpr int kDy[4] = {1, 0, -1, 0};
}  // namespace

int TabularInstance::transition(int s, int action) const {
    if (is_goal_cell(s)) return s;
    int x = s % width, y = s / width;
    int nx = x + kDx[action], ny = y + kDy[action];
    if (!in_bounds(nx, ny)) return s;
    int ns = cell(nx, ny);
    if (blocked[ns]) return s;
    return ns;
}

GridOption ideal_option(const TabularInstance& inst, Edge edge) {
    int src_idx = inst.region_index(edge.src);
    int dst_idx = inst.region_index(edge.dst);
    if (src_idx < 0 || dst_idx < 0) throw std::runtime_error("ideal_option: unknown edge regions");

    // BFS distance to the target region through cells that are not blocked
    // and not inside any other foreign region (entering one would terminate
    // the option early).
    std::vector<int> dist(inst.n_states(), std::numeric_limits<int>::max());
    std::deque<int> queue;
    auto allowed = [&](int s) {
        if (inst.blocked[s]) return false;
        int r = inst.region_of[s];
        return r == -1 || r == edge.src || r == edge.dst;
    };
    for (int s : inst.region_cells[dst_idx]) {
        dist[s] = 0;
        queue.push_back(s);
    }
    while (!queue.empty()) {
        int s = queue.front();
        queue.pop_front();
        int x = s % inst.width, y = s / inst.width;
        for (int a = 0; a < 4; ++a) {
            int nx = x + kDx[a], ny = y + kDy[a];
            if (!inst.in_bounds(nx, ny)) continue;
            int ns = inst.cell(nx, ny);
            if (!allowed(ns) || dist[ns] <= dist[s] + 1) continue;
            if (inst.region_of[ns] == edge.dst) continue;  // target cells are sinks for the BFS
            dist[ns] = dist[s] + 1;
            queue.push_back(ns);
        }
    }

    GridOption opt{edge, std::vector<uint8_t>(inst.n_states(), 0)};
    for (int s = 0; s < inst.n_states(); ++s) {
        if (inst.blocked[s]) continue;
        int best_a = 0, best_d = dist[s];
        int x = s % inst.width, y = s / inst.width;
        for (int a = 0; a < 4; ++a) {
            int nx = x + kDx[a], ny = y + kDy[a];
            if (!inst.in_bounds(nx, ny)) continue;
            int ns = inst.cell(nx, ny);
            if (inst.blocked[ns]) continue;
            if (dist[ns] < best_d) {
                best_d = dist[ns];
                best_a = a;
            }
        }
        opt.action[s] = static_cast<uint8_t>(best_a);
    }
    return opt;
}

std::vector<GridOption> ideal_options(const TabularInstance& inst) {
    std::vector<GridOption> options;
    options.reserve(inst.edges.size());
    for (const Edge& e : inst.edges) options.push_back(ideal_option(inst, e));
    return options;
}

GridRollout run_option(const TabularInstance& inst, const GridOption& option, int start) {
    GridRollout out;
    int s = start;
    double discount = 1.0;
    int cap = inst.n_states() + 1;  // any longer path must repeat a state
    for (int t = 0; t < cap; ++t) {
        int a = option.action[s];
        int ns = inst.transition(s, a);
        out.disc_reward += discount * inst.reward(s, a);
        discount *= inst.gamma;
        ++out.steps;
        s = ns;
        int r = inst.region_of[s];
        if (r != -1 && r != option.edge.src) {
            out.terminal_state = s;
            out.terminal_region = r;
            return out;
        }
    }
    out.terminal_state = -1;
    out.terminal_region = -1;
    out.steps = 0;
    out.disc_reward = 0.0;  // no region entry, so no goal entry either
    return out;
}

namespace {

struct RolloutTable {
    // per option, per cell of its source region: rollout result
    std::vector<std::vector<std::pair<int, GridRollout>>> rows;  // (cell, rollout)
};

RolloutTable enumerate_rollouts(const TabularInstance& inst,
                                const std::vector<GridOption>& options) {
    RolloutTable table;
    table.rows.resize(options.size());
    for (size_t o = 0; o < options.size(); ++o) {
        int src_idx = inst.region_index(options[o].edge.src);
        for (int s : inst.region_cells[src_idx])
            table.rows[o].push_back({s, run_option(inst, options[o], s)});
    }
    return table;
}

}  // namespace

OptionViResult exact_option_vi(const TabularInstance& inst, const std::vector<GridOption>& options,
                               double tol) {
    RolloutTable table = enumerate_rollouts(inst, options);
    OptionViResult res;
    res.v.assign(inst.n_states(), 0.0);
    res.q.assign(options.size(), std::vector<double>(inst.n_states(), 0.0));

    std::vector<double> v_next(inst.n_states(), 0.0);
    for (long it = 0; it < 1000000; ++it) {
        std::copy(res.v.begin(), res.v.end(), v_next.begin());
        // recompute values only on region cells with at least one option
        for (size_t ri = 0; ri < inst.region_ids.size(); ++ri)
            for (int s : inst.region_cells[ri]) v_next[s] = 0.0;
        std::vector<uint8_t> has(inst.n_states(), 0);
        for (size_t o = 0; o < options.size(); ++o) {
            for (const auto& [s, roll] : table.rows[o]) {
                double q = roll.disc_reward;
                if (roll.terminal_state >= 0)
                    q += std::pow(inst.gamma, roll.steps) * res.v[roll.terminal_state];
                res.q[o][s] = q;
                if (!has[s] || q > v_next[s]) {
                    v_next[s] = q;
                    has[s] = 1;
                }
            }
        }
        double resid = 0.0;
        for (int s = 0; s < inst.n_states(); ++s) resid = std::max(resid, std::fabs(v_next[s] - res.v[s]));
        res.v.swap(v_next);
        if (resid < tol) break;
    }
    return res;
}

namespace {

IntervalAdp tables_from_rollouts(const TabularInstance& inst,
                                 const std::vector<GridOption>& options, bool expected,
                                 ExpectedAdp* expected_out) {
    RolloutTable table = enumerate_rollouts(inst, options);
    int n = static_cast<int>(inst.region_ids.size());

    IntervalAdp adp;
    adp.gamma = inst.gamma;
    adp.region_ids = inst.region_ids;
    for (const auto& o : options) adp.options.push_back(o.edge);
    if (expected_out) {
        expected_out->gamma = inst.gamma;
        expected_out->region_ids = inst.region_ids;
        expected_out->options = adp.options;
    }

    for (size_t o = 0; o < options.size(); ++o) {
        std::vector<double> lo(n, std::numeric_limits<double>::infinity());
        std::vector<double> hi(n, -std::numeric_limits<double>::infinity());
        std::vector<double> mean(n, 0.0);
        double rlo = std::numeric_limits<double>::infinity(), rhi = -rlo, rmean = 0.0;
        for (const auto& [s, roll] : table.rows[o]) {
            std::vector<double> t(n, 0.0);
            if (roll.terminal_region >= 0)
                t[inst.region_index(roll.terminal_region)] = std::pow(inst.gamma, roll.steps);
            for (int j = 0; j < n; ++j) {
                lo[j] = std::min(lo[j], t[j]);
                hi[j] = std::max(hi[j], t[j]);
                mean[j] += t[j];
            }
            rlo = std::min(rlo, roll.disc_reward);
            rhi = std::max(rhi, roll.disc_reward);
            rmean += roll.disc_reward;
        }
        int count = static_cast<int>(table.rows[o].size());
        adp.t_inf.push_back(lo);
        adp.t_sup.push_back(hi);
        adp.r_inf.push_back(rlo);
        adp.r_sup.push_back(rhi);
        adp.start_counts.push_back(count);
        if (expected_out) {
            for (int j = 0; j < n; ++j) mean[j] /= count;
            expected_out->t_d.push_back(mean);
            expected_out->r_d.push_back(rmean / count);
            expected_out->start_counts.push_back(count);
        }
    }
    (void)expected;
    return adp;
}

}  // namespace

IntervalAdp exact_tables(const TabularInstance& inst, const std::vector<GridOption>& options) {
    return tables_from_rollouts(inst, options, false, nullptr);
}

ExpectedAdp exact_expected_tables(const TabularInstance& inst,
                                  const std::vector<GridOption>& options) {
    ExpectedAdp out;
    tables_from_rollouts(inst, options, true, &out);
    return out;
}

PolicyValue exact_policy_value(const TabularInstance& inst, const std::vector<GridOption>& options,
                               const std::vector<int>& choice_per_region_index) {
    RolloutTable table = enumerate_rollouts(inst, options);
    // rollout lookup per (region cell) under the chosen option
    std::vector<int> chain_next(inst.n_states(), -1);
    std::vector<double> chain_r(inst.n_states(), 0.0);
    std::vector<double> chain_disc(inst.n_states(), 0.0);
    std::vector<uint8_t> has(inst.n_states(), 0);

    for (size_t ri = 0; ri < inst.region_ids.size(); ++ri) {
        int choice = choice_per_region_index[ri];
        if (choice < 0) continue;
        for (const auto& [s, roll] : table.rows[choice]) {
            has[s] = 1;
            chain_r[s] = roll.disc_reward;
            chain_next[s] = roll.terminal_state;
            chain_disc[s] = roll.terminal_state >= 0 ? std::pow(inst.gamma, roll.steps) : 0.0;
        }
    }

    PolicyValue out;
    out.v.assign(inst.n_states(), 0.0);
    std::vector<int> state_mark(inst.n_states(), -1);
    std::vector<uint8_t> done(inst.n_states(), 0);
    for (size_t ri = 0; ri < inst.region_ids.size(); ++ri) {
        for (int s0 : inst.region_cells[ri]) {
            if (done[s0]) continue;
            // Follow the option chain; values on the path accumulate backward.
            std::vector<int> path;
            int s = s0;
            while (s >= 0 && !done[s] && has[s] && state_mark[s] != s0) {
                state_mark[s] = s0;
                path.push_back(s);
                s = chain_next[s];
            }
            double tail = 0.0;
            if (s >= 0 && done[s]) tail = out.v[s];
            // revisit within this walk means a reward-free cycle: tail stays 0
            for (auto it = path.rbegin(); it != path.rend(); ++it) {
                tail = chain_r[*it] + chain_disc[*it] * tail;
                out.v[*it] = tail;
                done[*it] = 1;
            }
            if (path.empty() && !done[s0]) done[s0] = 1;  // no choice: value 0
        }
    }
    int init_idx = inst.region_index(inst.initial_id);
    double j = 0.0;
    for (int s : inst.region_cells[init_idx]) j += out.v[s];
    out.j = j / static_cast<double>(inst.region_cells[init_idx].size());
    return out;
}

ConcreteViResult exact_concrete_vi(const TabularInstance& inst, double tol) {
    ConcreteViResult res;
    res.v.assign(inst.n_states(), 0.0);
    std::vector<double> next(inst.n_states(), 0.0);
    for (long it = 0; it < 1000000; ++it) {
        double resid = 0.0;
        for (int s = 0; s < inst.n_states(); ++s) {
            if (inst.blocked[s]) continue;
            double best = 0.0;
            if (!inst.is_goal_cell(s)) {
                best = -std::numeric_limits<double>::infinity();
                for (int a = 0; a < 4; ++a) {
                    int ns = inst.transition(s, a);
                    double q = inst.reward(s, a) + inst.gamma * res.v[ns];
                    best = std::max(best, q);
                }
            }
            next[s] = best;
            resid = std::max(resid, std::fabs(next[s] - res.v[s]));
        }
        res.v.swap(next);
        if (resid < tol) break;
    }
    int init_idx = inst.region_index(inst.initial_id);
    double j = 0.0;
    for (int s : inst.region_cells[init_idx]) j += res.v[s];
    res.j = j / static_cast<double>(inst.region_cells[init_idx].size());
    return res;
}

namespace {

void finalize_regions(TabularInstance& inst) {
    inst.region_cells.assign(inst.region_ids.size(), {});
    for (int s = 0; s < inst.n_states(); ++s) {
        int id = inst.region_of[s];
        if (id < 0) continue;
        inst.region_cells[inst.region_index(id)].push_back(s);
    }
}

bool try_place_regions(TabularInstance& inst, Rng& rng, int n_regions, bool singletons) {
    inst.region_of.assign(inst.n_states(), -1);
    inst.region_ids.clear();
    std::uniform_int_distribution<int> ux(0, inst.width - 1), uy(0, inst.height - 1);
    std::uniform_int_distribution<int> usz(1, 2);
    for (int id = 1; id <= n_regions; ++id) {
        bool placed = false;
        for (int attempt = 0; attempt < 80 && !placed; ++attempt) {
            int w = singletons ? 1 : usz(rng), h = singletons ? 1 : usz(rng);
            int x0 = ux(rng), y0 = uy(rng);
            if (x0 + w > inst.width || y0 + h > inst.height) continue;
            bool free = true;
            for (int y = y0; y < y0 + h && free; ++y)
                for (int x = x0; x < x0 + w && free; ++x)
                    if (inst.region_of[inst.cell(x, y)] != -1) free = false;
            if (!free) continue;
            for (int y = y0; y < y0 + h; ++y)
                for (int x = x0; x < x0 + w; ++x) {
                    int c = inst.cell(x, y);
                    inst.region_of[c] = id;
                    inst.blocked[c] = 0;  // region cells stay passable
                }
            placed = true;
        }
        if (!placed) return false;
        inst.region_ids.push_back(id);
    }
    finalize_regions(inst);
    return true;
}

}  // namespace

TabularInstance random_instance(uint64_t seed, const InstanceParams& params) {
    for (int round = 0; round < 200; ++round) {
        Rng rng = make_rng(seed, {0xdead, static_cast<uint64_t>(round)});
        TabularInstance inst;
        std::uniform_int_distribution<int> uside(params.min_side, params.max_side);
        inst.width = uside(rng);
        inst.height = uside(rng);
        std::uniform_real_distribution<double> ug(0.3, 0.65);
        inst.gamma = ug(rng);
        inst.blocked.assign(inst.n_states(), 0);
        std::uniform_real_distribution<double> u01(0.0, 1.0);
        for (auto& b : inst.blocked) b = u01(rng) < params.block_prob ? 1 : 0;

        std::uniform_int_distribution<int> unr(params.min_regions, params.max_regions);
        int n_regions = unr(rng);
        // Late rounds fall back to singleton regions, which always satisfy
        // the contraction condition (zero interval width).
        bool singletons = params.singleton_regions || round >= 60;
        if (!try_place_regions(inst, rng, n_regions, singletons)) continue;

        std::uniform_int_distribution<int> ur(0, n_regions - 1);
        int gi = ur(rng), ii = ur(rng);
        if (gi == ii) continue;
        inst.goal_id = inst.region_ids[gi];
        inst.initial_id = inst.region_ids[ii];

        for (int a : inst.region_ids)
            for (int b : inst.region_ids) {
                if (a == b || a == inst.goal_id) continue;
                if (u01(rng) < 0.75) inst.edges.push_back({a, b});
            }
        // Every non-goal region keeps at least one outgoing edge.
        for (int a : inst.region_ids) {
            if (a == inst.goal_id) continue;
            bool has_out = false;
            for (const Edge& e : inst.edges) has_out |= e.src == a;
            if (!has_out) inst.edges.push_back({a, inst.goal_id});
        }
        if (inst.edges.empty()) continue;

        if (params.require_contraction) {
            auto options = ideal_options(inst);
            IntervalAdp tables = exact_tables(inst, options);
            auto [eps_t, eps_r] = epsilons(tables);
            if (inst.gamma + inst.region_ids.size() * eps_t >= 1.0) continue;
        }
        return inst;
    }
    throw std::runtime_error("random_instance: exhausted retries");
}

TabularInstance bottleneck_instance(uint64_t seed, int n_chambers) {
    Rng rng = make_rng(seed, {0xb0b0});
    TabularInstance inst;
    std::uniform_int_distribution<int> uw(2, 4), uh(3, 5);
    std::vector<int> widths(n_chambers);
    for (auto& w : widths) w = uw(rng);
    inst.height = uh(rng);
    inst.width = 0;
    for (int w : widths) inst.width += w + 1;  // +1 for each wall column
    inst.width -= 1;                           // no wall after the last chamber
    std::uniform_real_distribution<double> ug(0.4, 0.6);
    inst.gamma = ug(rng);
    inst.blocked.assign(inst.n_states(), 0);
    inst.region_of.assign(inst.n_states(), -1);

    // Solid wall columns with one open door cell each.
    std::uniform_int_distribution<int> udoor(0, inst.height - 1);
    std::vector<int> door_cells;
    int x = 0;
    std::vector<int> chamber_x0;
    for (int c = 0; c < n_chambers; ++c) {
        chamber_x0.push_back(x);
        x += widths[c];
        if (c + 1 < n_chambers) {
            int door_y = udoor(rng);
            for (int y = 0; y < inst.height; ++y)
                if (y != door_y) inst.blocked[inst.cell(x, y)] = 1;
            door_cells.push_back(inst.cell(x, door_y));
            x += 1;
        }
    }

    // Regions: start box in the first chamber, door singletons, goal box in
    // the last chamber.
    // Singleton start region keeps every option's source a single state, so
    // the exact tables have zero interval width and the contraction condition
    // holds for any gamma.
    int next_id = 1;
    inst.initial_id = next_id++;
    inst.region_of[inst.cell(0, 0)] = inst.initial_id;
    inst.region_ids.push_back(inst.initial_id);

    std::vector<int> door_ids;
    for (int d : door_cells) {
        int id = next_id++;
        inst.region_of[d] = id;
        inst.region_ids.push_back(id);
        door_ids.push_back(id);
    }

    inst.goal_id = next_id++;
    int gx = chamber_x0.back() + widths.back() - 1;
    inst.region_of[inst.cell(gx, inst.height - 1)] = inst.goal_id;
    if (inst.height > 1) inst.region_of[inst.cell(gx, inst.height - 2)] = inst.goal_id;
    inst.region_ids.push_back(inst.goal_id);
    finalize_regions(inst);

    std::vector<int> order{inst.initial_id};
    order.insert(order.end(), door_ids.begin(), door_ids.end());
    order.push_back(inst.goal_id);
    for (size_t i = 0; i + 1 < order.size(); ++i) {
        inst.edges.push_back({order[i], order[i + 1]});
        if (i > 0) inst.edges.push_back({order[i + 1], order[i]});
    }
    std::erase_if(inst.edges, [&](const Edge& e) { return e.src == inst.goal_id; });
    return inst;
}

std::string to_text(const TabularInstance& inst) {
    std::ostringstream os;
    os << "grid " << inst.width << " " << inst.height << " gamma " << inst.gamma << "\n";
    for (int y = inst.height - 1; y >= 0; --y) {
        for (int x = 0; x < inst.width; ++x) {
            int s = inst.cell(x, y);
            char ch = '.';
            if (inst.blocked[s]) ch = '#';
            else if (inst.region_of[s] == inst.goal_id) ch = 'G';
            else if (inst.region_of[s] == inst.initial_id) ch = 'S';
            else if (inst.region_of[s] >= 0) ch = static_cast<char>('a' + (inst.region_of[s] % 26));
            os << ch;
        }
        os << "\n";
    }
    os << "edges";
    for (const Edge& e : inst.edges) os << " " << e.src << ">" << e.dst;
    os << "\n";
    return os.str();
}

}  // namespace avi::oracle
