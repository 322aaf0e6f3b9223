#include "avi/serial.hpp"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace avi {

namespace fs = std::filesystem;

namespace {

std::ofstream open_out(const std::string& path, std::ios::openmode mode = std::ios::out) {
    fs::path p(path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(path, mode);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << std::setprecision(17);
    return out;
}

std::ifstream open_in(const std::string& path, std::ios::openmode mode = std::ios::in) {
    std::ifstream in(path, mode);
    if (!in) throw std::runtime_error("cannot read " + path);
    return in;
}

void expect_tag(std::istream& in, const std::string& tag, const std::string& path) {
    std::string got;
    in >> got;
    if (got != tag) throw std::runtime_error(path + ": expected '" + tag + "', got '" + got + "'");
}

}  // namespace

void save_spec(const AbstractSpec& spec, const std::string& path) {
    auto out = open_out(path);
    out << "avi-spec 1\n";
    out << "regions " << spec.regions.size() << "\n";
    for (const auto& r : spec.regions)
        out << "region " << r.id << " " << r.box.lo.x << " " << r.box.lo.y << " " << r.box.hi.x
            << " " << r.box.hi.y << " " << r.center.x << " " << r.center.y << "\n";
    out << "edges " << spec.edges.size() << "\n";
    for (const auto& e : spec.edges) out << "edge " << e.src << " " << e.dst << "\n";
    out << "start " << spec.initial_id << "\n";
    out << "goal " << spec.goal_id << "\n";
}

AbstractSpec load_spec(const std::string& path) {
    auto in = open_in(path);
    expect_tag(in, "avi-spec", path);
    int version;
    in >> version;
    AbstractSpec spec;
    expect_tag(in, "regions", path);
    size_t n;
    in >> n;
    for (size_t i = 0; i < n; ++i) {
        expect_tag(in, "region", path);
        SubgoalRegion r;
        in >> r.id >> r.box.lo.x >> r.box.lo.y >> r.box.hi.x >> r.box.hi.y >> r.center.x >>
            r.center.y;
        spec.regions.push_back(r);
    }
    expect_tag(in, "edges", path);
    size_t m;
    in >> m;
    for (size_t i = 0; i < m; ++i) {
        expect_tag(in, "edge", path);
        Edge e;
        in >> e.src >> e.dst;
        spec.edges.push_back(e);
    }
    expect_tag(in, "start", path);
    in >> spec.initial_id;
    expect_tag(in, "goal", path);
    in >> spec.goal_id;
    if (!in) throw std::runtime_error(path + ": truncated spec");
    return spec;
}

void save_policy(const MlpPolicy& policy, const std::string& path) {
    auto out = open_out(path, std::ios::binary);
    const char magic[8] = {'A', 'V', 'I', 'P', 'O', 'L', '1', '\n'};
    out.write(magic, 8);
    const MlpShape& s = policy.shape();
    uint32_t layers = 3;
    uint32_t dims[6] = {static_cast<uint32_t>(s.hidden), static_cast<uint32_t>(s.in),
                        static_cast<uint32_t>(s.hidden), static_cast<uint32_t>(s.hidden),
                        static_cast<uint32_t>(s.out), static_cast<uint32_t>(s.hidden)};
    out.write(reinterpret_cast<const char*>(&layers), 4);
    out.write(reinterpret_cast<const char*>(dims), sizeof(dims));
    auto params = policy.params();
    out.write(reinterpret_cast<const char*>(params.data()),
              static_cast<std::streamsize>(params.size() * sizeof(double)));
}

MlpPolicy load_policy(const std::string& path) {
    auto in = open_in(path, std::ios::binary);
    char magic[8];
    in.read(magic, 8);
    if (!in || std::string(magic, 8) != "AVIPOL1\n")
        throw std::runtime_error(path + ": not a policy file");
    uint32_t layers;
    in.read(reinterpret_cast<char*>(&layers), 4);
    if (layers != 3) throw std::runtime_error(path + ": unsupported layer count");
    uint32_t dims[6];
    in.read(reinterpret_cast<char*>(dims), sizeof(dims));
    MlpShape shape{static_cast<int>(dims[1]), static_cast<int>(dims[0]),
                   static_cast<int>(dims[4])};
    if (static_cast<int>(dims[2]) != shape.hidden || static_cast<int>(dims[3]) != shape.hidden ||
        static_cast<int>(dims[5]) != shape.hidden)
        throw std::runtime_error(path + ": inconsistent layer shapes");
    MlpPolicy policy(shape);
    auto params = policy.params();
    in.read(reinterpret_cast<char*>(params.data()),
            static_cast<std::streamsize>(params.size() * sizeof(double)));
    if (!in) throw std::runtime_error(path + ": truncated parameters");
    return policy;
}

void save_norm(const RunningNorm& norm, const std::string& path) {
    auto out = open_out(path);
    out << "avi-norm 1\n";
    out << "dim " << norm.dim() << "\n";
    out << "count " << norm.count << "\n";
    out << "mean";
    for (double m : norm.mean) out << " " << m;
    out << "\nm2";
    for (double v : norm.m2) out << " " << v;
    out << "\n";
}

RunningNorm load_norm(const std::string& path) {
    auto in = open_in(path);
    expect_tag(in, "avi-norm", path);
    int version, dim;
    in >> version;
    expect_tag(in, "dim", path);
    in >> dim;
    RunningNorm norm(dim);
    expect_tag(in, "count", path);
    in >> norm.count;
    expect_tag(in, "mean", path);
    for (int i = 0; i < dim; ++i) in >> norm.mean[i];
    expect_tag(in, "m2", path);
    for (int i = 0; i < dim; ++i) in >> norm.m2[i];
    if (!in) throw std::runtime_error(path + ": truncated normalizer");
    return norm;
}

namespace {
std::string option_stem(const Edge& e) {
    return "opt_" + std::to_string(e.src) + "_" + std::to_string(e.dst);
}
}  // namespace

void save_options(const OptionSet& options, const std::string& dir) {
    fs::create_directories(dir);
    auto index = open_out(dir + "/options.txt");
    index << "avi-options 1\n";
    index << "count " << options.size() << "\n";
    for (const auto& o : options) {
        index << "option " << o.edge.src << " " << o.edge.dst << "\n";
        save_policy(o.policy, dir + "/" + option_stem(o.edge) + ".pol");
        save_norm(o.norm, dir + "/" + option_stem(o.edge) + ".norm");
    }
}

OptionSet load_options(const std::string& dir) {
    auto index = open_in(dir + "/options.txt");
    expect_tag(index, "avi-options", dir);
    int version;
    index >> version;
    expect_tag(index, "count", dir);
    size_t n;
    index >> n;
    OptionSet options;
    for (size_t i = 0; i < n; ++i) {
        expect_tag(index, "option", dir);
        Edge e;
        index >> e.src >> e.dst;
        TrainedOption opt;
        opt.edge = e;
        opt.policy = load_policy(dir + "/" + option_stem(e) + ".pol");
        opt.norm = load_norm(dir + "/" + option_stem(e) + ".norm");
        options.push_back(std::move(opt));
    }
    return options;
}

void save_abstract_policy(const AbstractPolicy& policy, const std::vector<Edge>& options,
                          const std::vector<double>& values, const std::vector<int>& region_ids,
                          const std::string& path) {
    auto out = open_out(path);
    out << "avi-abstract-policy 1\n";
    out << "provenance "
        << (policy.provenance == PolicyProvenance::conservative ? "conservative" : "expected")
        << "\n";
    out << "choices " << policy.region_ids.size() << "\n";
    for (size_t i = 0; i < policy.region_ids.size(); ++i) {
        int region = policy.region_ids[i];
        double v = 0.0;
        for (size_t j = 0; j < region_ids.size(); ++j)
            if (region_ids[j] == region) v = values[j];
        const Edge& e = options[policy.option[i]];
        out << "choice " << region << " " << v << " " << e.src << " " << e.dst << "\n";
    }
}

LoadedAbstractPolicy load_abstract_policy(const std::string& path) {
    auto in = open_in(path);
    expect_tag(in, "avi-abstract-policy", path);
    int version;
    in >> version;
    expect_tag(in, "provenance", path);
    std::string prov;
    in >> prov;
    LoadedAbstractPolicy loaded;
    loaded.policy.provenance =
        prov == "conservative" ? PolicyProvenance::conservative : PolicyProvenance::expected;
    expect_tag(in, "choices", path);
    size_t n;
    in >> n;
    for (size_t i = 0; i < n; ++i) {
        expect_tag(in, "choice", path);
        int region, src, dst;
        double v;
        in >> region >> v >> src >> dst;
        loaded.policy.region_ids.push_back(region);
        loaded.policy.option.push_back(static_cast<int>(loaded.edges.size()));
        loaded.edges.push_back({src, dst});
    }
    if (!in) throw std::runtime_error(path + ": truncated policy");
    return loaded;
}

namespace {
void write_adp_header(std::ostream& out, double gamma, int n_regions, double eps_t, double eps_r) {
    out << "gamma " << gamma << "\n";
    out << "n_regions " << n_regions << "\n";
    out << "eps_t " << eps_t << "\n";
    out << "eps_r " << eps_r << "\n";
}
}  // namespace

void save_interval_adp(const IntervalAdp& adp, const std::string& path) {
    auto out = open_out(path);
    out << "avi-interval-adp 1\n";
    auto [eps_t, eps_r] = epsilons(adp);
    write_adp_header(out, adp.gamma, adp.n_regions(), eps_t, eps_r);
    for (size_t o = 0; o < adp.options.size(); ++o) {
        out << "reward " << adp.options[o].src << " " << adp.options[o].dst << " " << adp.r_inf[o]
            << " " << adp.r_sup[o] << " " << adp.start_counts[o] << "\n";
        for (int j = 0; j < adp.n_regions(); ++j) {
            if (adp.t_sup[o][j] == 0.0) continue;
            out << "t " << adp.options[o].src << " " << adp.options[o].dst << " "
                << adp.region_ids[j] << " " << adp.t_inf[o][j] << " " << adp.t_sup[o][j] << "\n";
        }
    }
}

void save_expected_adp(const ExpectedAdp& adp, const std::string& path) {
    auto out = open_out(path);
    out << "avi-expected-adp 1\n";
    write_adp_header(out, adp.gamma, adp.n_regions(), 0.0, 0.0);
    for (size_t o = 0; o < adp.options.size(); ++o) {
        out << "reward " << adp.options[o].src << " " << adp.options[o].dst << " " << adp.r_d[o]
            << " " << adp.r_d[o] << " " << adp.start_counts[o] << "\n";
        for (int j = 0; j < adp.n_regions(); ++j) {
            if (adp.t_d[o][j] == 0.0) continue;
            out << "t " << adp.options[o].src << " " << adp.options[o].dst << " "
                << adp.region_ids[j] << " " << adp.t_d[o][j] << " " << adp.t_d[o][j] << "\n";
        }
    }
}

void save_distribution(const RegionDistribution& dist, const std::string& path) {
    auto out = open_out(path);
    out << "avi-distribution 1\n";
    out << "capacity " << dist.pool_capacity << "\n";
    out << "regions " << dist.region_ids.size() << "\n";
    for (size_t i = 0; i < dist.region_ids.size(); ++i) {
        out << "pool " << dist.region_ids[i] << " " << dist.pools[i].size() << "\n";
        for (const auto& w : dist.pools[i])
            out << w.state.x << " " << w.state.y << " " << w.weight << "\n";
    }
}

RegionDistribution load_distribution(const std::string& path) {
    auto in = open_in(path);
    expect_tag(in, "avi-distribution", path);
    int version;
    in >> version;
    RegionDistribution dist;
    expect_tag(in, "capacity", path);
    in >> dist.pool_capacity;
    expect_tag(in, "regions", path);
    size_t n;
    in >> n;
    for (size_t i = 0; i < n; ++i) {
        expect_tag(in, "pool", path);
        int id;
        size_t count;
        in >> id >> count;
        std::vector<WeightedState> pool(count);
        for (auto& w : pool) in >> w.state.x >> w.state.y >> w.weight;
        dist.region_ids.push_back(id);
        dist.pools.push_back(std::move(pool));
    }
    if (!in) throw std::runtime_error(path + ": truncated distribution");
    return dist;
}

CurveWriter::CurveWriter(const std::string& path) : path_(path) {
    auto out = open_out(path);
    out << "iteration,env_steps,success_prob,disc_reward,wall_secs\n";
}

void CurveWriter::append(int iteration, long env_steps, double success_prob, double disc_reward,
                         double wall_secs) {
    std::ofstream out(path_, std::ios::app);
    if (!out) throw std::runtime_error("cannot append " + path_);
    out << iteration << "," << env_steps << "," << std::setprecision(10) << success_prob << ","
        << disc_reward << "," << wall_secs << "\n";
}

}  // namespace avi
