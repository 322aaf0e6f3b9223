#pragma once

#include <vector>

#include "avi/geometry.hpp"
#include "avi/rng.hpp"

namespace avi {

struct WeightedState {
    Vec2 state;
    double weight = 1.0;
};

// Per-region weighted sample pools. Pools are indexed in region-id order of
// the spec they were built for; every pooled state lies inside its region box.
struct RegionDistribution {
    std::vector<int> region_ids;              // parallel to pools
    std::vector<std::vector<WeightedState>> pools;
    int pool_capacity = 200;
    std::vector<double> alpha_history;

    int index_of(int region_id) const {
        for (size_t i = 0; i < region_ids.size(); ++i)
            if (region_ids[i] == region_id) return static_cast<int>(i);
        return -1;
    }
    const std::vector<WeightedState>* pool_for(int region_id) const {
        int i = index_of(region_id);
        return i < 0 ? nullptr : &pools[i];
    }
};

// Weighted draw from a pool.
inline Vec2 sample_pool(const std::vector<WeightedState>& pool, Rng& rng) {
    double total = 0.0;
    for (const auto& w : pool) total += w.weight;
    std::uniform_real_distribution<double> u(0.0, total);
    double r = u(rng);
    for (const auto& w : pool) {
        r -= w.weight;
        if (r <= 0.0) return w.state;
    }
    return pool.back().state;
}

}  // namespace avi
