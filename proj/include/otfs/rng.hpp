#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

#include "otfs/linalg.hpp"

namespace otfs {

// splitmix64 finalizer, used to derive independent sub-streams from a base seed.
std::uint64_t mix64(std::uint64_t x);

// Deterministic random stream. All draws are hand-rolled on top of the raw
// 64-bit generator output so that sequences are identical across standard
// library implementations.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(mix64(seed + 0x9e3779b97f4a7c15ULL)) {}

    // Sub-stream keyed on (seed, path components); e.g. derive(seed, {epoch, batch, sample}).
    static Rng derive(std::uint64_t seed, std::initializer_list<std::uint64_t> path);

    std::uint64_t next_u64() { return gen_(); }

    double uniform01();                         // [0, 1)
    double uniform(double lo, double hi);       // [lo, hi)
    std::uint64_t below(std::uint64_t n);       // unbiased integer in [0, n)
    long integer(long lo, long hi);             // inclusive range

    double gaussian();                          // standard normal (Box-Muller)
    cplx cgaussian(double variance);            // circularly symmetric, E|z|^2 = variance

  private:
    std::mt19937_64 gen_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace otfs
