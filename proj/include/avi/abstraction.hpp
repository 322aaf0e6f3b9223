#pragma once

#include <string>
#include <vector>

#include "avi/env.hpp"
#include "avi/geometry.hpp"

namespace avi {

struct SubgoalRegion {
    int id = -1;
    Box box;
    Vec2 center;
};

struct Edge {
    int src = -1;
    int dst = -1;
    bool operator==(const Edge&) const = default;
};

// Subgoal regions, edges and the start/goal designation. Regions are disjoint
// axis-aligned boxes; edges never leave the goal region. Immutable once built.
struct AbstractSpec {
    std::vector<SubgoalRegion> regions;
    std::vector<Edge> edges;  // ordered (src, dst) region-id pairs, deduplicated
    int initial_id = -1;
    int goal_id = -1;

    int size() const { return static_cast<int>(regions.size()); }
    const SubgoalRegion* find(int id) const;
    // Index of a region id in `regions`, or -1.
    int index_of(int id) const;
    // Region id containing p, or -1. Disjointness makes the answer unique.
    int region_containing(Vec2 p, double tol = 0.0) const;
    bool has_edge(int src, int dst) const;
};

AbstractSpec doorway_spec(const ConcreteEnv& env);
AbstractSpec room_center_spec(const ConcreteEnv& env);
AbstractSpec full_room_spec(const ConcreteEnv& env);
// N region centers sampled uniformly from the free workspace, square regions
// of the given half-width, symmetrized K-nearest-neighbor edges; start and
// goal regions are appended and wired to their k nearest centers.
AbstractSpec random_spec(const ConcreteEnv& env, int n_points, int k_neighbors,
                         double region_half_width, uint64_t seed);

// Directed K-nearest-neighbor edges over point indices (no symmetrization).
std::vector<Edge> knn_edges(const std::vector<Vec2>& points, int k);

struct ValidationReport {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};

ValidationReport validate(const AbstractSpec& spec);

}  // namespace avi
