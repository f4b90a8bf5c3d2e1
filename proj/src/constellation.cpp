#include "otfs/constellation.hpp"

#include <cmath>
#include <stdexcept>

namespace otfs {

namespace {

// gray(i) = i ^ (i >> 1); this inverts it.
int gray_decode(int g) {
    int b = g;
    while (g >>= 1) b ^= g;
    return b;
}

}  // namespace

Constellation make_constellation(int mod_order) {
    if (mod_order != 4 && mod_order != 16 && mod_order != 64)
        throw std::invalid_argument("constellation: unsupported modulation order " +
                                    std::to_string(mod_order));
    int side = 2;
    while (side * side < mod_order) side *= 2;
    int bpa = 0;  // bits per axis
    for (int s = side; s > 1; s >>= 1) ++bpa;

    // Levels -(side-1), ..., -1, 1, ..., side-1 scaled to unit average symbol
    // energy: E|p|^2 = 2 * mean(level^2) = 1.
    double mean_sq = 0.0;
    for (int i = 0; i < side; ++i) {
        const double amp = 2.0 * i - (side - 1);
        mean_sq += amp * amp;
    }
    mean_sq /= side;
    const double scale = 1.0 / std::sqrt(2.0 * mean_sq);

    Constellation c;
    c.bits_per_symbol = 2 * bpa;
    c.real_levels.resize(side);
    for (int i = 0; i < side; ++i) c.real_levels[i] = (2.0 * i - (side - 1)) * scale;

    c.points.resize(mod_order);
    for (int label = 0; label < mod_order; ++label) {
        const int gi = label >> bpa;            // high bits -> in-phase axis
        const int gq = label & (side - 1);      // low bits -> quadrature axis
        const double re = c.real_levels[gray_decode(gi)];
        const double im = c.real_levels[gray_decode(gq)];
        c.points[label] = {re, im};
    }
    return c;
}

CVec map_bits(const std::vector<std::uint8_t>& bits, const Constellation& c) {
    const auto bps = static_cast<std::size_t>(c.bits_per_symbol);
    if (bits.size() % bps != 0)
        throw std::invalid_argument("map_bits: bit count not divisible by bits per symbol");
    CVec out(bits.size() / bps);
    for (std::size_t s = 0; s < out.size(); ++s) {
        int label = 0;
        for (std::size_t b = 0; b < bps; ++b) label = (label << 1) | (bits[s * bps + b] & 1);
        out[s] = c.points[label];
    }
    return out;
}

int nearest_point(cplx v, const Constellation& c) {
    int best = 0;
    double best_d = std::norm(v - c.points[0]);
    for (int i = 1; i < c.order(); ++i) {
        const double d = std::norm(v - c.points[i]);
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    return best;
}

std::vector<std::uint8_t> demap_symbols(const CVec& symbols, const Constellation& c) {
    const auto bps = static_cast<std::size_t>(c.bits_per_symbol);
    std::vector<std::uint8_t> bits(symbols.size() * bps);
    for (std::size_t s = 0; s < symbols.size(); ++s) {
        const int label = nearest_point(symbols[s], c);
        for (std::size_t b = 0; b < bps; ++b)
            bits[s * bps + b] = static_cast<std::uint8_t>((label >> (bps - 1 - b)) & 1);
    }
    return bits;
}

}  // namespace otfs
