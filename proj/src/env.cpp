#include "avi/env.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace avi {

namespace {

constexpr double kPi = 3.14159265358979323846;

void add_boundary(RoomGeometry& g) {
    double w = g.workspace_width(), h = g.workspace_height();
    g.wall_segments.push_back({{0, 0}, {w, 0}});
    g.wall_segments.push_back({{w, 0}, {w, h}});
    g.wall_segments.push_back({{w, h}, {0, h}});
    g.wall_segments.push_back({{0, h}, {0, 0}});
}

// Emits the wall segments of an internal slot. Walls are slabs of
// wall_thickness centered on the shared room edge, built from their two face
// lines; an open slot leaves a doorway_width tunnel through the slab, sealed
// along its sides by two short lip segments. Faces span the full room edge so
// adjacent slabs seal the junction squares where walls cross.
void add_slot_walls(RoomGeometry& g, const WallSlot& slot) {
    double half = g.doorway_width * 0.5;
    double ht = g.wall_thickness * 0.5;
    double r = g.room_size;
    if (slot.vertical) {
        double y0 = slot.room_a_row * r, y1 = y0 + r;
        for (double x : {slot.center.x - ht, slot.center.x + ht}) {
            if (!slot.open) {
                g.wall_segments.push_back({{x, y0}, {x, y1}});
            } else {
                g.wall_segments.push_back({{x, y0}, {x, slot.center.y - half}});
                g.wall_segments.push_back({{x, slot.center.y + half}, {x, y1}});
            }
        }
        if (slot.open) {
            for (double y : {slot.center.y - half, slot.center.y + half})
                g.wall_segments.push_back(
                    {{slot.center.x - ht, y}, {slot.center.x + ht, y}});
        }
    } else {
        double x0 = slot.room_a_col * r, x1 = x0 + r;
        for (double y : {slot.center.y - ht, slot.center.y + ht}) {
            if (!slot.open) {
                g.wall_segments.push_back({{x0, y}, {x1, y}});
            } else {
                g.wall_segments.push_back({{x0, y}, {slot.center.x - half, y}});
                g.wall_segments.push_back({{slot.center.x + half, y}, {x1, y}});
            }
        }
        if (slot.open) {
            for (double x : {slot.center.x - half, slot.center.x + half})
                g.wall_segments.push_back(
                    {{x, slot.center.y - ht}, {x, slot.center.y + ht}});
        }
    }
}

struct SlotKey {
    bool vertical;
    int row, col;  // lower-left room of the pair
};

WallSlot make_slot(const RoomGeometry& g, SlotKey k) {
    WallSlot s;
    s.vertical = k.vertical;
    double r = g.room_size;
    if (k.vertical) {
        s.room_a_row = k.row;
        s.room_a_col = k.col;
        s.room_b_row = k.row;
        s.room_b_col = k.col + 1;
        s.center = {(k.col + 1) * r, (k.row + 0.5) * r};
    } else {
        s.room_a_row = k.row;
        s.room_a_col = k.col;
        s.room_b_row = k.row + 1;
        s.room_b_col = k.col;
        s.center = {(k.col + 0.5) * r, (k.row + 1) * r};
    }
    return s;
}

int find_slot(const RoomGeometry& g, SlotKey k) {
    for (size_t i = 0; i < g.slots.size(); ++i) {
        const WallSlot& s = g.slots[i];
        if (s.vertical == k.vertical && s.room_a_row == k.row && s.room_a_col == k.col)
            return static_cast<int>(i);
    }
    throw std::runtime_error("internal: wall slot not found");
}

// The published 9-Rooms layout. Rooms are a 3x3 grid; the wall between the
// bottom-left and bottom-middle rooms is solid, the goal region occupies the
// slot between the middle-right and top-right rooms, and all other slots are
// doorways. Region ids follow the figure numbering; the resulting optimal
// plan from the start room is 3 -> 1 -> 4 -> 7 -> 9.
RoomGeometry nine_rooms_geometry(const EnvConfig& cfg) {
    RoomGeometry g;
    g.grid_rows = 3;
    g.grid_cols = 3;
    g.room_size = cfg.room_size;
    g.doorway_width = cfg.doorway_width;
    g.wall_thickness = cfg.wall_thickness;

    for (int row = 0; row < 3; ++row)
        for (int col = 0; col < 2; ++col)
            g.slots.push_back(make_slot(g, {true, row, col}));
    for (int row = 0; row < 2; ++row)
        for (int col = 0; col < 3; ++col)
            g.slots.push_back(make_slot(g, {false, row, col}));

    g.slots[find_slot(g, {true, 0, 0})].open = false;  // solid wall

    struct IdEntry {
        SlotKey key;
        int id;
    };
    const IdEntry ids[] = {
        {{false, 0, 0}, 1}, {{false, 1, 0}, 2}, {{true, 1, 0}, 4},
        {{true, 2, 0}, 5},  {{false, 0, 1}, 6}, {{true, 1, 1}, 7},
        {{true, 2, 1}, 8},  {{false, 1, 1}, 10}, {{true, 0, 1}, 11},
        {{false, 0, 2}, 12},
    };
    for (const auto& e : ids) g.slots[find_slot(g, e.key)].doorway_region_id = e.id;

    double half = cfg.doorway_width * 0.5;
    int goal_slot = find_slot(g, {false, 1, 2});
    g.goal_box = box_around(g.slots[goal_slot].center, half, half);
    g.goal_region_id = 9;
    g.start_box = box_around(g.room_rect(0, 0).center(), half, half);
    g.start_region_id = 3;

    for (const auto& s : g.slots) add_slot_walls(g, s);
    add_boundary(g);
    return g;
}

// 16-Rooms: 4x4 grid, all internal walls open, goal region on the slot below
// the top-right room, start in the bottom-left room. Doorway ids run in
// (y, x) order of the slot centers; start and goal take the last two ids.
RoomGeometry sixteen_rooms_geometry(const EnvConfig& cfg) {
    RoomGeometry g;
    g.grid_rows = 4;
    g.grid_cols = 4;
    g.room_size = cfg.room_size;
    g.doorway_width = cfg.doorway_width;
    g.wall_thickness = cfg.wall_thickness;

    for (int row = 0; row < 4; ++row)
        for (int col = 0; col < 3; ++col)
            g.slots.push_back(make_slot(g, {true, row, col}));
    for (int row = 0; row < 3; ++row)
        for (int col = 0; col < 4; ++col)
            g.slots.push_back(make_slot(g, {false, row, col}));

    int goal_slot = find_slot(g, {false, 2, 3});

    std::vector<int> order;
    for (size_t i = 0; i < g.slots.size(); ++i)
        if (static_cast<int>(i) != goal_slot) order.push_back(static_cast<int>(i));
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        const Vec2 ca = g.slots[a].center, cb = g.slots[b].center;
        return ca.y != cb.y ? ca.y < cb.y : ca.x < cb.x;
    });
    int next_id = 1;
    for (int idx : order) g.slots[idx].doorway_region_id = next_id++;

    double half = cfg.doorway_width * 0.5;
    g.goal_box = box_around(g.slots[goal_slot].center, half, half);
    g.goal_region_id = next_id + 1;
    g.start_box = box_around(g.room_rect(0, 0).center(), half, half);
    g.start_region_id = next_id;

    for (const auto& s : g.slots) add_slot_walls(g, s);
    add_boundary(g);
    return g;
}

}  // namespace

ConcreteEnv::ConcreteEnv(RoomGeometry geometry, EnvConfig config, std::string name)
    : geometry_(std::move(geometry)), config_(config), name_(std::move(name)) {
    if (!(config_.gamma >= 0.0 && config_.gamma < 1.0))
        throw std::runtime_error("env config: gamma must be in [0, 1)");
    if (config_.max_speed <= 0.0) throw std::runtime_error("env config: max_speed must be > 0");
    if (!(config_.doorway_width > 0.0 && config_.doorway_width < config_.room_size))
        throw std::runtime_error("env config: doorway_width must be in (0, room_size)");
    if (config_.wall_thickness < 0.0 || config_.wall_thickness > config_.doorway_width)
        throw std::runtime_error("env config: wall_thickness must be in [0, doorway_width]");
}

Vec2 ConcreteEnv::step(Vec2 s, Action a) const {
    if (!finite(s) || !std::isfinite(a.speed) || !std::isfinite(a.heading))
        throw std::invalid_argument("step: non-finite state or action");
    if (in_goal(s)) return s;

    double v = std::clamp(a.speed, 0.0, config_.max_speed);
    double th = std::fmod(a.heading, 2.0 * kPi);
    Vec2 d{v * std::cos(th), v * std::sin(th)};
    double len = d.norm();
    if (len < 1e-300) return s;
    Vec2 target = s + d;

    double t_hit = 2.0;  // > 1 means no contact
    for (const Segment& w : geometry_.wall_segments)
        if (auto t = segment_hit(s, target, w)) t_hit = std::min(t_hit, *t);
    for (const Box& b : geometry_.obstacle_boxes)
        if (auto t = box_entry(s, target, b)) t_hit = std::min(t_hit, *t);

    if (t_hit > 1.0) return target;
    double back = config_.contact_epsilon / len;
    double t = std::max(0.0, t_hit - back);
    return s + d * t;
}

double ConcreteEnv::reward(Vec2 s, Action a) const {
    if (in_goal(s)) return 0.0;
    return in_goal(step(s, a)) ? 1.0 : 0.0;
}

ConcreteEnv::Transition ConcreteEnv::transition(Vec2 s, Action a) const {
    if (in_goal(s)) return {s, 0.0};
    Vec2 next = step(s, a);
    return {next, in_goal(next) ? 1.0 : 0.0};
}

Vec2 ConcreteEnv::sample_initial(Rng& rng) const {
    std::uniform_real_distribution<double> ux(geometry_.start_box.lo.x, geometry_.start_box.hi.x);
    std::uniform_real_distribution<double> uy(geometry_.start_box.lo.y, geometry_.start_box.hi.y);
    double x = ux(rng);
    double y = uy(rng);
    return {x, y};
}

ConcreteEnv ConcreteEnv::with_task_boxes(Box start_box, Box goal_box) const {
    RoomGeometry g = geometry_;
    g.start_box = start_box;
    g.goal_box = goal_box;
    return ConcreteEnv(std::move(g), config_, name_);
}

ConcreteEnv build_env(const std::string& name, const EnvConfig& config) {
    if (name == "nine_rooms") {
        return ConcreteEnv(nine_rooms_geometry(config), config, name);
    }
    if (name == "sixteen_rooms") {
        return ConcreteEnv(sixteen_rooms_geometry(config), config, name);
    }
    if (name == "nine_rooms_obstacle") {
        RoomGeometry g = nine_rooms_geometry(config);
        // Centered block in the middle room, sized to cut every straight
        // crossing while staying clear of the doorway regions.
        Vec2 c = g.room_rect(1, 1).center();
        double half = 0.3125 * config.room_size;
        g.obstacle_boxes.push_back(box_around(c, half, half));
        return ConcreteEnv(std::move(g), config, name);
    }
    throw std::runtime_error("unknown environment: " + name);
}

}  // namespace avi
