#pragma once

#include <cstdint>
#include <random>

#include <boost/random/normal_distribution.hpp>

namespace mesochaos {

std::uint64_t splitmix64(std::uint64_t x);

// Per-trial random stream keyed by (seed, trial, lane). Two runs that visit the same keys
// see the same numbers regardless of scheduling, which is the whole RNG contract.
class Stream {
public:
    Stream(std::uint64_t seed, std::uint64_t trial, std::uint64_t lane = 0);

    double normal() { return normal_(engine_); }
    double uniform() { return uniform_(engine_); }
    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
    boost::random::normal_distribution<double> normal_{0.0, 1.0};  // ziggurat
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace mesochaos
