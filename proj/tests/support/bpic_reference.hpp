#pragma once

// Independent classical BPIC: a straightforward translation of the detector
// equations with every tunable scalar removed, written against (H, y) directly.
// Used as the oracle for the all-ones reduction of the unfolded detector.
// Shares only the spec'd numerical floors (variance clamps at 1e-13) and the
// max-subtracted posterior exponentials.

#include <cmath>
#include <vector>

#include "otfs/linalg.hpp"
#include "otfs/model.hpp"

namespace otfs::test {

inline Vec classic_bpic(const RealModel& m, const std::vector<double>& alphabet, int layers) {
    constexpr double floor_var = 1e-13;
    const std::size_t n = m.dim();
    const double noise_var = 0.5 * m.sigma2;  // per real dimension

    // Column dot products and matched filter, accumulated in ascending row order.
    Mat g(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < n; ++k) acc += m.h(k, i) * m.h(k, j);
            g(i, j) = acc;
            g(j, i) = acc;
        }
    }
    Vec b(n);
    for (std::size_t q = 0; q < n; ++q) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) acc += m.h(i, q) * m.y[i];
        b[q] = acc;
    }

    // MMSE start: (G + sigma2 I) x = b by textbook Cholesky.
    Mat reg = g;
    for (std::size_t q = 0; q < n; ++q) reg(q, q) += m.sigma2;
    Mat low(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double diag = reg(j, j);
        for (std::size_t k = 0; k < j; ++k) diag -= low(j, k) * low(j, k);
        const double ljj = std::sqrt(diag);
        low(j, j) = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            double acc = reg(i, j);
            for (std::size_t k = 0; k < j; ++k) acc -= low(i, k) * low(j, k);
            low(i, j) = acc / ljj;
        }
    }
    Vec z(n), x(n);
    for (std::size_t i = 0; i < n; ++i) {
        double acc = b[i];
        for (std::size_t k = 0; k < i; ++k) acc -= low(i, k) * z[k];
        z[i] = acc / low(i, i);
    }
    for (std::size_t ii = n; ii-- > 0;) {
        double acc = z[ii];
        for (std::size_t k = ii + 1; k < n; ++k) acc -= low(k, ii) * x[k];
        x[ii] = acc / low(ii, ii);
    }

    Vec v(n, 1.0);
    Vec e(n);
    {
        Vec gx(n, 0.0);
        for (std::size_t q = 0; q < n; ++q) {
            double acc = 0.0;
            for (std::size_t j = 0; j < n; ++j) acc += g(q, j) * x[j];
            gx[q] = acc;
        }
        for (std::size_t q = 0; q < n; ++q) {
            const double r = b[q] - gx[q];
            e[q] = r * r;
        }
    }

    const std::size_t na = alphabet.size();
    Vec mu(n), sig(n), xb(n), vb(n), gx(n), post(na);
    for (int t = 0; t < layers; ++t) {
        // observation step
        for (std::size_t q = 0; q < n; ++q) {
            double acc = 0.0;
            for (std::size_t j = 0; j < n; ++j) acc += g(q, j) * x[j];
            gx[q] = acc;
        }
        for (std::size_t q = 0; q < n; ++q) {
            const double d = g(q, q);
            const double residual = b[q] - gx[q];
            mu[q] = x[q] + residual / d;
            double interference = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                if (j == q) continue;
                interference += g(q, j) * g(q, j) * v[j];
            }
            const double raw = (interference + d * noise_var) / (d * d);
            sig[q] = raw > floor_var ? raw : floor_var;
        }
        // estimation step
        for (std::size_t q = 0; q < n; ++q) {
            double zmax = -1e300;
            for (std::size_t a = 0; a < na; ++a) {
                const double dd = alphabet[a] - mu[q];
                const double zz = -(dd * dd) / (2.0 * sig[q]);
                post[a] = zz;
                if (zz > zmax) zmax = zz;
            }
            double total = 0.0;
            for (std::size_t a = 0; a < na; ++a) {
                post[a] = std::exp(post[a] - zmax);
                total += post[a];
            }
            double m1 = 0.0, m2 = 0.0;
            for (std::size_t a = 0; a < na; ++a) {
                const double w = post[a] / total;
                m1 += alphabet[a] * w;
                m2 += alphabet[a] * alphabet[a] * w;
            }
            xb[q] = m1;
            const double var = m2 - m1 * m1;
            vb[q] = var > floor_var ? var : floor_var;
        }
        // combining step
        for (std::size_t q = 0; q < n; ++q) {
            double acc = 0.0;
            for (std::size_t j = 0; j < n; ++j) acc += g(q, j) * xb[j];
            gx[q] = acc;
        }
        for (std::size_t q = 0; q < n; ++q) {
            const double r = b[q] - gx[q];
            const double e_new = r * r;
            const double total = e_new + e[q];
            const double rho = total > 0.0 ? e[q] / total : 0.5;
            x[q] = (1.0 - rho) * x[q] + rho * xb[q];
            v[q] = (1.0 - rho) * v[q] + rho * vb[q];
            e[q] = e_new;
        }
    }
    return x;
}

}  // namespace otfs::test
