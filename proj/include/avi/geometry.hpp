#pragma once

#include <cmath>
#include <optional>

namespace avi {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double c) const { return {x * c, y * c}; }
    double dot(Vec2 o) const { return x * o.x + y * o.y; }
    double cross(Vec2 o) const { return x * o.y - y * o.x; }
    double norm() const { return std::hypot(x, y); }
};

inline bool finite(Vec2 v) { return std::isfinite(v.x) && std::isfinite(v.y); }

struct Box {
    Vec2 lo;
    Vec2 hi;

    bool contains(Vec2 p, double tol = 0.0) const {
        return p.x >= lo.x - tol && p.x <= hi.x + tol &&
               p.y >= lo.y - tol && p.y <= hi.y + tol;
    }
    Vec2 center() const { return {(lo.x + hi.x) * 0.5, (lo.y + hi.y) * 0.5}; }
    double width() const { return hi.x - lo.x; }
    double height() const { return hi.y - lo.y; }
    bool valid() const { return hi.x > lo.x && hi.y > lo.y; }
};

inline Box box_around(Vec2 c, double half_w, double half_h) {
    return Box{{c.x - half_w, c.y - half_h}, {c.x + half_w, c.y + half_h}};
}

// Closed-box overlap on exact bounds; touching boundaries count as overlap.
inline bool boxes_overlap(const Box& a, const Box& b) {
    return a.lo.x <= b.hi.x && a.hi.x >= b.lo.x &&
           a.lo.y <= b.hi.y && a.hi.y >= b.lo.y;
}

struct Segment {
    Vec2 a;
    Vec2 b;
};

// Earliest parameter t in (0, 1] at which the motion p -> q crosses the wall
// segment, or nullopt. Collinear motion never registers a hit; walls are thin
// and sliding along one is legal.
inline std::optional<double> segment_hit(Vec2 p, Vec2 q, const Segment& w) {
    Vec2 d = q - p;
    Vec2 e = w.b - w.a;
    double denom = d.cross(e);
    if (std::fabs(denom) < 1e-15) return std::nullopt;
    Vec2 pa = w.a - p;
    double t = pa.cross(e) / denom;
    double u = pa.cross(d) / denom;
    if (t > 0.0 && t <= 1.0 && u >= 0.0 && u <= 1.0) return t;
    return std::nullopt;
}

// Earliest parameter t in (0, 1] at which the motion p -> q enters the box
// (slab test). Assumes p is outside the box.
inline std::optional<double> box_entry(Vec2 p, Vec2 q, const Box& b) {
    Vec2 d = q - p;
    double t0 = 0.0, t1 = 1.0;
    for (int axis = 0; axis < 2; ++axis) {
        double pc = axis == 0 ? p.x : p.y;
        double dc = axis == 0 ? d.x : d.y;
        double lo = axis == 0 ? b.lo.x : b.lo.y;
        double hi = axis == 0 ? b.hi.x : b.hi.y;
        if (std::fabs(dc) < 1e-15) {
            if (pc < lo || pc > hi) return std::nullopt;
            continue;
        }
        double ta = (lo - pc) / dc;
        double tb = (hi - pc) / dc;
        if (ta > tb) std::swap(ta, tb);
        t0 = std::max(t0, ta);
        t1 = std::min(t1, tb);
        if (t0 > t1) return std::nullopt;
    }
    if (t0 > 0.0 && t0 <= 1.0) return t0;
    return std::nullopt;
}

}  // namespace avi
