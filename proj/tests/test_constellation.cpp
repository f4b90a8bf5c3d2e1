#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "otfs/constellation.hpp"
#include "otfs/rng.hpp"

using namespace otfs;

TEST_SUITE("constellation") {

TEST_CASE("unit average energy for every supported order") {
    for (int m : {4, 16, 64}) {
        const Constellation c = make_constellation(m);
        REQUIRE(c.order() == m);
        double energy = 0.0;
        for (const cplx& p : c.points) energy += std::norm(p);
        energy /= m;
        CHECK(std::fabs(energy - 1.0) < 1e-12);
        CHECK(c.real_levels.size() == static_cast<std::size_t>(std::lround(std::sqrt(m))));
        CHECK(std::is_sorted(c.real_levels.begin(), c.real_levels.end()));
    }
}

TEST_CASE("4-QAM points and real alphabet") {
    const Constellation c = make_constellation(4);
    const double s = 1.0 / std::sqrt(2.0);
    std::set<std::pair<double, double>> expect = {{-s, -s}, {-s, s}, {s, -s}, {s, s}};
    for (const cplx& p : c.points) {
        bool found = false;
        for (const auto& e : expect)
            if (std::fabs(p.real() - e.first) < 1e-15 && std::fabs(p.imag() - e.second) < 1e-15)
                found = true;
        CHECK(found);
    }
    CHECK(c.real_levels[0] == doctest::Approx(-s).epsilon(1e-14));
    CHECK(c.real_levels[1] == doctest::Approx(s).epsilon(1e-14));
}

TEST_CASE("unsupported order is rejected") {
    CHECK_THROWS(make_constellation(8));
    CHECK_THROWS(make_constellation(32));
    CHECK_THROWS(make_constellation(2));
}

TEST_CASE("map_bits basics") {
    const Constellation c = make_constellation(4);
    const std::vector<std::uint8_t> bits = {0, 0, 0, 1, 1, 1, 1, 0};
    const CVec syms = map_bits(bits, c);
    REQUIRE(syms.size() == 4);
    std::set<std::pair<double, double>> distinct;
    for (const cplx& p : syms) distinct.insert({p.real(), p.imag()});
    CHECK(distinct.size() == 4);

    CHECK(map_bits({}, c).empty());
    CHECK_THROWS(map_bits({0, 1, 0}, c));
}

TEST_CASE("map/demap round trip is exact over every label") {
    for (int m : {4, 16, 64}) {
        const Constellation c = make_constellation(m);
        std::vector<std::uint8_t> bits;
        for (int label = 0; label < m; ++label)
            for (int b = c.bits_per_symbol - 1; b >= 0; --b)
                bits.push_back(static_cast<std::uint8_t>((label >> b) & 1));
        const CVec syms = map_bits(bits, c);
        const std::vector<std::uint8_t> back = demap_symbols(syms, c);
        CHECK(back == bits);
    }
}

TEST_CASE("random payload round trip") {
    const Constellation c = make_constellation(16);
    Rng rng(11);
    std::vector<std::uint8_t> bits(2 * 84 * 2);
    for (auto& b : bits) b = static_cast<std::uint8_t>(rng.below(2));
    CHECK(demap_symbols(map_bits(bits, c), c) == bits);
}

TEST_CASE("gray neighbours differ in one bit per axis") {
    const Constellation c = make_constellation(16);
    // Walk the in-phase axis at fixed quadrature bits: adjacent amplitude
    // levels must differ in exactly one label bit.
    for (int i = 0; i + 1 < 4; ++i) {
        int label_a = -1, label_b = -1;
        for (int label = 0; label < 16; ++label) {
            if ((label & 3) != 0) continue;  // fix quadrature bits
            const double re = c.points[label].real();
            if (std::fabs(re - c.real_levels[i]) < 1e-12) label_a = label;
            if (std::fabs(re - c.real_levels[i + 1]) < 1e-12) label_b = label;
        }
        REQUIRE(label_a >= 0);
        REQUIRE(label_b >= 0);
        CHECK(__builtin_popcount(static_cast<unsigned>(label_a ^ label_b)) == 1);
    }
}

}  // TEST_SUITE
