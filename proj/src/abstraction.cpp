#include "avi/abstraction.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "avi/rng.hpp"

namespace avi {

const SubgoalRegion* AbstractSpec::find(int id) const {
    for (const auto& r : regions)
        if (r.id == id) return &r;
    return nullptr;
}

int AbstractSpec::index_of(int id) const {
    for (size_t i = 0; i < regions.size(); ++i)
        if (regions[i].id == id) return static_cast<int>(i);
    return -1;
}

int AbstractSpec::region_containing(Vec2 p, double tol) const {
    for (const auto& r : regions)
        if (r.box.contains(p, tol)) return r.id;
    return -1;
}

bool AbstractSpec::has_edge(int src, int dst) const {
    return std::find(edges.begin(), edges.end(), Edge{src, dst}) != edges.end();
}

namespace {

void sort_and_dedup(std::vector<Edge>& edges) {
    std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
        return a.src != b.src ? a.src < b.src : a.dst < b.dst;
    });
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
}

void sort_regions(std::vector<SubgoalRegion>& regions) {
    std::sort(regions.begin(), regions.end(),
              [](const SubgoalRegion& a, const SubgoalRegion& b) { return a.id < b.id; });
}

// Regions sharing a room are connected both ways; nothing leaves the goal.
std::vector<Edge> room_sharing_edges(const RoomGeometry& g,
                                     const std::vector<SubgoalRegion>& regions, int goal_id) {
    std::vector<Edge> edges;
    for (int row = 0; row < g.grid_rows; ++row) {
        for (int col = 0; col < g.grid_cols; ++col) {
            Box room = g.room_rect(row, col);
            // Strict interior overlap, so a box touching a wall line from the
            // other side does not count as a member of this room.
            std::vector<int> members;
            for (const auto& r : regions) {
                bool overlap = r.box.lo.x < room.hi.x && r.box.hi.x > room.lo.x &&
                               r.box.lo.y < room.hi.y && r.box.hi.y > room.lo.y;
                if (overlap) members.push_back(r.id);
            }
            for (int a : members)
                for (int b : members)
                    if (a != b && a != goal_id) edges.push_back({a, b});
        }
    }
    sort_and_dedup(edges);
    return edges;
}

}  // namespace

AbstractSpec doorway_spec(const ConcreteEnv& env) {
    const RoomGeometry& g = env.geometry();
    if (g.start_region_id < 0 || g.goal_region_id < 0)
        throw std::runtime_error("doorway_spec: environment has no region layout");
    AbstractSpec spec;
    double half = g.doorway_width * 0.5;
    for (const auto& slot : g.slots) {
        if (!slot.open || slot.doorway_region_id < 0) continue;
        SubgoalRegion r;
        r.id = slot.doorway_region_id;
        r.box = box_around(slot.center, half, half);
        r.center = slot.center;
        spec.regions.push_back(r);
    }
    spec.regions.push_back({g.start_region_id, g.start_box, g.start_box.center()});
    spec.regions.push_back({g.goal_region_id, g.goal_box, g.goal_box.center()});
    sort_regions(spec.regions);
    spec.initial_id = g.start_region_id;
    spec.goal_id = g.goal_region_id;
    spec.edges = room_sharing_edges(g, spec.regions, spec.goal_id);
    return spec;
}

AbstractSpec room_center_spec(const ConcreteEnv& env) {
    const RoomGeometry& g = env.geometry();
    AbstractSpec spec;
    double half = g.doorway_width * 0.5;
    int id = 1;
    for (int row = 0; row < g.grid_rows; ++row) {
        for (int col = 0; col < g.grid_cols; ++col) {
            Vec2 c = g.room_rect(row, col).center();
            spec.regions.push_back({id++, box_around(c, half, half), c});
        }
    }
    spec.initial_id = 1;
    spec.goal_id = g.grid_rows * g.grid_cols;
    auto room_id = [&](int row, int col) { return row * g.grid_cols + col + 1; };
    for (int row = 0; row < g.grid_rows; ++row) {
        for (int col = 0; col < g.grid_cols; ++col) {
            int a = room_id(row, col);
            if (a == spec.goal_id) continue;
            if (col + 1 < g.grid_cols) spec.edges.push_back({a, room_id(row, col + 1)});
            if (col > 0) spec.edges.push_back({a, room_id(row, col - 1)});
            if (row + 1 < g.grid_rows) spec.edges.push_back({a, room_id(row + 1, col)});
            if (row > 0) spec.edges.push_back({a, room_id(row - 1, col)});
        }
    }
    // Drop edges into nothing and edges leaving the goal; symmetry of the grid
    // already gives every remaining pair both directions.
    std::erase_if(spec.edges, [&](const Edge& e) { return e.src == spec.goal_id; });
    sort_and_dedup(spec.edges);
    return spec;
}

AbstractSpec full_room_spec(const ConcreteEnv& env) {
    const RoomGeometry& g = env.geometry();
    AbstractSpec spec;
    // shrink by the wall half-thickness so boxes across a wall stay disjoint
    const double margin = 0.5 * g.wall_thickness + 0.1;
    int id = 1;
    for (int row = 0; row < g.grid_rows; ++row) {
        for (int col = 0; col < g.grid_cols; ++col) {
            Box room = g.room_rect(row, col);
            Box shrunk{{room.lo.x + margin, room.lo.y + margin},
                       {room.hi.x - margin, room.hi.y - margin}};
            spec.regions.push_back({id++, shrunk, shrunk.center()});
        }
    }
    spec.initial_id = 1;
    spec.goal_id = g.grid_rows * g.grid_cols;
    AbstractSpec grid = room_center_spec(env);
    spec.edges = grid.edges;
    return spec;
}

std::vector<Edge> knn_edges(const std::vector<Vec2>& points, int k) {
    int n = static_cast<int>(points.size());
    if (k >= n) throw std::runtime_error("knn_edges: k must be < number of points");
    std::vector<Edge> edges;
    std::vector<std::pair<double, int>> dist;
    for (int i = 0; i < n; ++i) {
        dist.clear();
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            dist.push_back({(points[j] - points[i]).norm(), j});
        }
        std::sort(dist.begin(), dist.end());
        for (int m = 0; m < k; ++m) edges.push_back({i, dist[m].second});
    }
    return edges;
}

AbstractSpec random_spec(const ConcreteEnv& env, int n_points, int k_neighbors,
                         double region_half_width, uint64_t seed) {
    if (n_points < 2) throw std::runtime_error("random_spec: need at least 2 points");
    if (k_neighbors >= n_points) throw std::runtime_error("random_spec: k must be < n");
    const RoomGeometry& g = env.geometry();
    Rng rng = make_rng(seed, {rng_tag::spec});
    double hw = region_half_width;

    std::vector<Box> fixed = {g.start_box, g.goal_box};
    auto clashes = [&](const Box& b, const std::vector<Box>& others) {
        for (const auto& o : others)
            if (boxes_overlap(b, o)) return true;
        for (const auto& obs : g.obstacle_boxes)
            if (boxes_overlap(b, obs)) return true;
        return false;
    };

    std::vector<Vec2> centers;
    std::vector<Box> boxes;
    for (int i = 0; i < n_points; ++i) {
        double h = hw;
        Box b;
        Vec2 c;
        bool placed = false;
        for (int attempt = 0; attempt < 200 && !placed; ++attempt) {
            if (attempt > 0 && attempt % 50 == 0) h *= 0.5;  // shrink after repeated overlap
            std::uniform_real_distribution<double> ux(h, g.workspace_width() - h);
            std::uniform_real_distribution<double> uy(h, g.workspace_height() - h);
            c = {ux(rng), uy(rng)};
            b = box_around(c, h, h);
            std::vector<Box> taken = fixed;
            taken.insert(taken.end(), boxes.begin(), boxes.end());
            placed = !clashes(b, taken);
        }
        if (!placed) throw std::runtime_error("random_spec: could not place disjoint regions");
        centers.push_back(c);
        boxes.push_back(b);
    }

    AbstractSpec spec;
    for (int i = 0; i < n_points; ++i)
        spec.regions.push_back({i + 1, boxes[i], centers[i]});
    int start_id = n_points + 1, goal_id = n_points + 2;
    spec.regions.push_back({start_id, g.start_box, g.start_box.center()});
    spec.regions.push_back({goal_id, g.goal_box, g.goal_box.center()});
    spec.initial_id = start_id;
    spec.goal_id = goal_id;

    std::vector<Edge> edges;
    for (const Edge& e : knn_edges(centers, k_neighbors)) {
        edges.push_back({e.src + 1, e.dst + 1});
        edges.push_back({e.dst + 1, e.src + 1});
    }
    // Wire start and goal to their k nearest sampled centers.
    std::vector<std::pair<double, int>> dist;
    for (auto [endpoint_id, endpoint] :
         {std::pair{start_id, g.start_box.center()}, std::pair{goal_id, g.goal_box.center()}}) {
        dist.clear();
        for (int j = 0; j < n_points; ++j)
            dist.push_back({(centers[j] - endpoint).norm(), j + 1});
        std::sort(dist.begin(), dist.end());
        for (int m = 0; m < k_neighbors; ++m) {
            edges.push_back({dist[m].second, endpoint_id});
            edges.push_back({endpoint_id, dist[m].second});
        }
    }
    std::erase_if(edges, [&](const Edge& e) { return e.src == goal_id || e.src == e.dst; });
    sort_and_dedup(edges);
    spec.edges = std::move(edges);
    return spec;
}

ValidationReport validate(const AbstractSpec& spec) {
    ValidationReport report;
    auto add = [&](std::string msg) { report.violations.push_back(std::move(msg)); };

    std::set<int> ids;
    for (const auto& r : spec.regions) {
        if (!ids.insert(r.id).second) add("duplicate region id " + std::to_string(r.id));
        if (!r.box.valid()) add("empty box for region " + std::to_string(r.id));
        if (!r.box.contains(r.center)) add("center outside box for region " + std::to_string(r.id));
    }
    for (size_t i = 0; i < spec.regions.size(); ++i) {
        for (size_t j = i + 1; j < spec.regions.size(); ++j) {
            if (boxes_overlap(spec.regions[i].box, spec.regions[j].box))
                add("regions " + std::to_string(spec.regions[i].id) + " and " +
                    std::to_string(spec.regions[j].id) + " overlap");
        }
    }
    if (!ids.count(spec.initial_id)) add("initial region id missing");
    if (!ids.count(spec.goal_id)) add("goal region id missing");
    if (spec.initial_id == spec.goal_id) add("initial region equals goal region");
    for (const auto& e : spec.edges) {
        if (!ids.count(e.src) || !ids.count(e.dst))
            add("edge references unknown region (" + std::to_string(e.src) + ", " +
                std::to_string(e.dst) + ")");
        if (e.src == e.dst) add("self edge at region " + std::to_string(e.src));
        if (e.src == spec.goal_id) add("edge leaves the goal region");
    }
    return report;
}

}  // namespace avi
