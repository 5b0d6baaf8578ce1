#include "mesochaos/rng.hpp"

namespace mesochaos {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

Stream::Stream(std::uint64_t seed, std::uint64_t trial, std::uint64_t lane) {
    std::uint64_t k = splitmix64(seed);
    k = splitmix64(k ^ splitmix64(trial + 0x632be59bd9b4e019ULL));
    k = splitmix64(k ^ splitmix64(lane + 0x8cb92ba72f3d8dd7ULL));
    std::seed_seq seq{static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32),
                      static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(lane)};
    engine_.seed(seq);
}

}  // namespace mesochaos
