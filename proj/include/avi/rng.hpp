#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace avi {

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Derives an independent stream seed from a master seed and a path of tags.
// Every random draw in the toolkit goes through a stream derived this way, so
// results do not depend on thread scheduling.
inline uint64_t derive_seed(uint64_t master, std::initializer_list<uint64_t> path) {
    uint64_t h = splitmix64(master ^ 0xa5a5a5a5a5a5a5a5ULL);
    for (uint64_t p : path) h = splitmix64(h ^ p);
    return h;
}

using Rng = std::mt19937_64;

inline Rng make_rng(uint64_t master, std::initializer_list<uint64_t> path) {
    return Rng(derive_seed(master, path));
}

// Stream tags (arbitrary distinct constants).
namespace rng_tag {
constexpr uint64_t init_dist = 101;
constexpr uint64_t ars = 102;
constexpr uint64_t estimation = 103;
constexpr uint64_t induction = 104;
constexpr uint64_t aggregate = 105;
constexpr uint64_t eval = 106;
constexpr uint64_t spec = 107;
constexpr uint64_t env_init = 108;
}  // namespace rng_tag

}  // namespace avi
