#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "otfs/config.hpp"
#include "otfs/linalg.hpp"
#include "otfs/rng.hpp"

namespace otfs {

struct PropagationPath {
    cplx gain;
    int delay_index = 0;    // l in [0, l_max]
    int doppler_index = 0;  // k in [-k_max, k_max]
};

// P-path delay-Doppler channel. Path i has delay l_i*T_s/L seconds and
// Doppler shift k_i*delta_f/K Hz; (l_i, k_i) pairs are pairwise distinct and
// the first path sits at zero delay.
struct ChannelRealization {
    std::vector<PropagationPath> paths;

    int path_count() const { return static_cast<int>(paths.size()); }
    double delay_s(const SystemConfig& cfg, int i) const;
    double doppler_hz(const SystemConfig& cfg, int i) const;
};

// Capacity of the delay-Doppler placement grid: (2*k_max + 1) * l_max.
int max_path_count(const SystemConfig& cfg);

// Gains are circularly-symmetric complex Gaussian with variance 1/P; placements
// are uniform without replacement over the valid grid.
ChannelRealization sample_channel(const SystemConfig& cfg, int path_count, Rng& rng);

// Time-domain KL x KL matrix: sum over paths of (cyclic delay) * (Doppler phase diagonal).
CMat build_time_channel(const ChannelRealization& r, const SystemConfig& cfg);

struct EffectiveChannel {
    CMat time_domain;   // KL x KL
    CMat effective;     // KL x KL, unitarily similar to time_domain
};

// Conjugates the time-domain matrix by the block DFT (F_K kron I_L).
EffectiveChannel build_effective_channel(CMat time_channel, const SystemConfig& cfg);

// y = H_eff * x + w with w circularly-symmetric Gaussian, covariance sigma2 * I.
CVec transmit(const CVec& x, const EffectiveChannel& ec, double sigma2, Rng& rng);

// One CSV record per realization: seed, P, then (Re h, Im h, l, k) per path.
void append_channel_dump(std::ostream& out, std::uint64_t seed, const ChannelRealization& r);

}  // namespace otfs
