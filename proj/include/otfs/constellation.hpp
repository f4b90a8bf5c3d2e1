#pragma once

#include <cstdint>
#include <vector>

#include "otfs/linalg.hpp"

namespace otfs {

// Gray-mapped square QAM with unit average symbol energy. `points` is indexed
// by bit label: the high half of the label selects the in-phase level, the low
// half the quadrature level, each through a Gray decode.
struct Constellation {
    std::vector<cplx> points;
    std::vector<double> real_levels;  // sorted per-axis amplitudes, size sqrt(M)
    int bits_per_symbol = 0;

    int order() const { return static_cast<int>(points.size()); }
};

Constellation make_constellation(int mod_order);  // supports 4, 16, 64

// One complex symbol per bits_per_symbol bits, MSB first within a symbol.
CVec map_bits(const std::vector<std::uint8_t>& bits, const Constellation& c);

// Nearest-point labels back to bits; exact inverse of map_bits on noiseless input.
std::vector<std::uint8_t> demap_symbols(const CVec& symbols, const Constellation& c);

// Index of the closest constellation point; ties go to the smaller index.
int nearest_point(cplx v, const Constellation& c);

}  // namespace otfs
