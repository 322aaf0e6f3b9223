#pragma once

#include <string>
#include <vector>

#include "avi/geometry.hpp"
#include "avi/rng.hpp"

namespace avi {

struct Action {
    double speed = 0.0;
    double heading = 0.0;
};

// One internal wall slot of the room grid. A slot is either open (a doorway
// gap of doorway_width centered on the shared edge) or a solid wall. The goal
// region may sit on an open slot, in which case the slot carries no doorway
// region of its own.
struct WallSlot {
    bool vertical = false;  // vertical wall between horizontally adjacent rooms
    int room_a_row = 0, room_a_col = 0;
    int room_b_row = 0, room_b_col = 0;
    Vec2 center;
    bool open = true;
    int doorway_region_id = -1;  // -1: closed slot or goal slot
};

struct RoomGeometry {
    int grid_rows = 3;
    int grid_cols = 3;
    double room_size = 8.0;
    double doorway_width = 2.0;
    double wall_thickness = 0.5;
    std::vector<Segment> wall_segments;
    std::vector<Box> obstacle_boxes;
    std::vector<WallSlot> slots;
    Box start_box;
    Box goal_box;
    int start_region_id = -1;
    int goal_region_id = -1;

    double workspace_width() const { return grid_cols * room_size; }
    double workspace_height() const { return grid_rows * room_size; }
    Box room_rect(int row, int col) const {
        return Box{{col * room_size, row * room_size},
                   {(col + 1) * room_size, (row + 1) * room_size}};
    }
};

struct EnvConfig {
    double room_size = 8.0;
    double doorway_width = 2.0;
    double wall_thickness = 0.5;
    double max_speed = 1.0;
    double gamma = 0.95;
    double contact_epsilon = 1e-6;
};

// Deterministic kinematic point robot in a maze of rooms. Immutable after
// construction; step/reward are pure functions, so instances can be shared
// across threads freely.
class ConcreteEnv {
  public:
    ConcreteEnv(RoomGeometry geometry, EnvConfig config, std::string name);

    int state_dim() const { return 2; }
    int action_dim() const { return 2; }
    double gamma() const { return config_.gamma; }
    double max_speed() const { return config_.max_speed; }
    double contact_epsilon() const { return config_.contact_epsilon; }
    const RoomGeometry& geometry() const { return geometry_; }
    const std::string& name() const { return name_; }

    bool in_goal(Vec2 s) const { return geometry_.goal_box.contains(s); }

    // s' = s + (v cos th, v sin th), truncated at the first wall or obstacle
    // contact and retracted by contact_epsilon. Goal states are sinks.
    Vec2 step(Vec2 s, Action a) const;

    // 1 iff the step from a non-goal state lands in the goal box.
    double reward(Vec2 s, Action a) const;

    struct Transition {
        Vec2 next;
        double reward;
    };
    Transition transition(Vec2 s, Action a) const;

    Vec2 sample_initial(Rng& rng) const;

    // Same walls and obstacles, different start/goal boxes. Used when an
    // abstraction choice redefines the task endpoints.
    ConcreteEnv with_task_boxes(Box start_box, Box goal_box) const;

  private:
    RoomGeometry geometry_;
    EnvConfig config_;
    std::string name_;
};

// Environments: nine_rooms, sixteen_rooms, nine_rooms_obstacle.
ConcreteEnv build_env(const std::string& name, const EnvConfig& config = {});

}  // namespace avi
