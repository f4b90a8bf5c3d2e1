#include <doctest.h>

#include <cmath>

#include "otfs/model.hpp"
#include "otfs/rng.hpp"
#include "support/oracles.hpp"

using namespace otfs;

namespace {

CMat random_cmat(std::size_t n, Rng& rng) {
    CMat m(n, n);
    for (auto& v : m.a) v = {rng.gaussian(), rng.gaussian()};
    return m;
}

}  // namespace

TEST_SUITE("model") {

TEST_CASE("identity embeds to identity") {
    const CMat h = CMat::identity(2);
    const CVec y = {cplx(1, 0), cplx(0, 1)};
    const RealModel m = to_real_model(h, y, 0.1);
    REQUIRE(m.h.rows == 4);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) CHECK(m.h(i, j) == (i == j ? 1.0 : 0.0));
    CHECK(m.y[0] == 1.0);
    CHECK(m.y[1] == 0.0);
    CHECK(m.y[2] == 0.0);
    CHECK(m.y[3] == 1.0);
    CHECK(m.noise_var_real() == doctest::Approx(0.05));
}

TEST_CASE("j*I embeds to the rotation block") {
    CMat h(2, 2);
    h(0, 0) = cplx(0, 1);
    h(1, 1) = cplx(0, 1);
    const Mat r = real_embed(h);
    // [[0, -I], [I, 0]]
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(r(i, i) == 0.0);
        CHECK(r(i, i + 2) == -1.0);
        CHECK(r(i + 2, i) == 1.0);
        CHECK(r(i + 2, i + 2) == 0.0);
    }
}

TEST_CASE("complex product maps to the embedded product exactly") {
    Rng rng(5);
    const std::size_t n = 12;
    const CMat h = random_cmat(n, rng);
    CVec x(n);
    for (auto& v : x) v = {rng.gaussian(), rng.gaussian()};

    const CVec direct = test::naive_cmatvec(h, x);
    const Vec embedded = linalg::matvec(real_embed(h), real_embed(x));
    const Vec direct_r = real_embed(direct);
    CHECK(test::max_abs_diff(embedded, direct_r) < 1e-12);
}

TEST_CASE("embedding is a ring homomorphism") {
    Rng rng(6);
    const std::size_t n = 8;
    const CMat a = random_cmat(n, rng);
    const CMat b = random_cmat(n, rng);
    const Mat lhs = real_embed(test::naive_cmul(a, b));
    const Mat rhs = test::naive_mul(real_embed(a), real_embed(b));
    double m = 0.0;
    for (std::size_t i = 0; i < lhs.a.size(); ++i)
        m = std::max(m, std::fabs(lhs.a[i] - rhs.a[i]));
    CHECK(m < 1e-10);
}

TEST_CASE("to_real_model rejects mismatched shapes") {
    const CMat h = CMat::identity(3);
    CHECK_THROWS(to_real_model(h, CVec(2), 0.1));
    CMat rect(2, 3);
    CHECK_THROWS(to_real_model(rect, CVec(2), 0.1));
}

TEST_CASE("vec stacks columns") {
    CMat x(2, 2);
    x(0, 0) = 1;
    x(1, 0) = 2;
    x(0, 1) = 3;
    x(1, 1) = 4;
    const CVec v = vec_columns(x);
    CHECK(v[0] == cplx(1, 0));
    CHECK(v[1] == cplx(2, 0));
    CHECK(v[2] == cplx(3, 0));
    CHECK(v[3] == cplx(4, 0));
}

TEST_CASE("unvec inverts vec") {
    Rng rng(9);
    CMat x(3, 2);
    for (auto& v : x.a) v = {rng.gaussian(), rng.gaussian()};
    const CMat back = unvec_columns(vec_columns(x), 3, 2);
    CHECK(test::max_abs_diff(x, back) == 0.0);
    CHECK_THROWS(unvec_columns(CVec(5), 3, 2));
}

TEST_CASE("vec of a triple product matches the kronecker identity") {
    Rng rng(10);
    for (int rep = 0; rep < 5; ++rep) {
        const CMat a = random_cmat(2, rng);
        const CMat x = random_cmat(2, rng);
        const CMat b = random_cmat(2, rng);
        const CVec lhs = vec_columns(test::naive_cmul(test::naive_cmul(a, x), b));

        CMat bt(2, 2);
        for (std::size_t i = 0; i < 2; ++i)
            for (std::size_t j = 0; j < 2; ++j) bt(i, j) = b(j, i);
        const CVec rhs = test::naive_cmatvec(test::kronecker(bt, a), vec_columns(x));
        for (std::size_t i = 0; i < lhs.size(); ++i) CHECK(std::abs(lhs[i] - rhs[i]) < 1e-12);
    }
}

}  // TEST_SUITE
