#include "otfs/detector.hpp"

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace otfs {

namespace {
constexpr double kVarFloor = 1e-13;
}

DetectorParams DetectorParams::ones(int layers) {
    DetectorParams p;
    p.theta1.assign(layers, 1.0);
    p.theta2.assign(layers, 1.0);
    p.theta3.assign(layers, 1.0);
    return p;
}

void DetectorParams::validate() const {
    if (theta2.size() != theta1.size() || theta3.size() != theta1.size())
        throw std::invalid_argument("detector params: layer count mismatch across thetas");
    if (theta1.empty()) throw std::invalid_argument("detector params: no layers");
    for (double v : theta2)
        if (!(v > 0.0)) throw std::invalid_argument("detector params: theta2 must be positive");
    for (double v : theta3)
        if (!(v > 0.0)) throw std::invalid_argument("detector params: theta3 must be positive");
}

PreparedModel prepare_model(const RealModel& m, const Constellation& c) {
    const std::size_t n = m.dim();
    if (m.h.rows != n || m.h.cols != n)
        throw std::invalid_argument("prepare_model: model dimensions inconsistent");
    PreparedModel pm;
    pm.dim = n;
    pm.sigma2 = m.sigma2;
    pm.noise_var_real = m.noise_var_real();
    pm.alphabet = c.real_levels;
    pm.x_true = m.x_true;

    pm.gram = linalg::gram(m.h);
    pm.gram_sq = Mat(n, n);
    for (std::size_t i = 0; i < n * n; ++i) pm.gram_sq.a[i] = pm.gram.a[i] * pm.gram.a[i];

    pm.col_energy.resize(n);
    for (std::size_t q = 0; q < n; ++q) {
        pm.col_energy[q] = pm.gram(q, q);
        if (!(pm.col_energy[q] > 0.0))
            throw std::runtime_error("prepare_model: zero-energy channel column " +
                                     std::to_string(q));
    }

    pm.matched.resize(n);
    for (std::size_t q = 0; q < n; ++q) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) acc += m.h(i, q) * m.y[i];
        pm.matched[q] = acc;
    }

    Mat reg = pm.gram;
    for (std::size_t q = 0; q < n; ++q) reg(q, q) += m.sigma2;
    Mat chol;
    try {
        chol = linalg::cholesky_factor(reg);
    } catch (const std::runtime_error&) {
        throw std::runtime_error("prepare_model: regularized Gram matrix is singular "
                                 "(sigma2 = 0 with rank-deficient channel)");
    }
    pm.mmse = linalg::cholesky_solve(chol, pm.matched);

    // e(0): unweighted squared matched-filter residual of the initial estimate.
    pm.init_error.resize(n);
    Vec gx = linalg::matvec(pm.gram, pm.mmse);
    for (std::size_t q = 0; q < n; ++q) {
        const double r = pm.matched[q] - gx[q];
        pm.init_error[q] = r * r;
    }
    return pm;
}

Vec mmse_init(const RealModel& m) {
    const std::size_t n = m.dim();
    Mat reg = linalg::gram(m.h);
    for (std::size_t q = 0; q < n; ++q) reg(q, q) += m.sigma2;
    Vec b(n);
    for (std::size_t q = 0; q < n; ++q) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) acc += m.h(i, q) * m.y[i];
        b[q] = acc;
    }
    Mat chol;
    try {
        chol = linalg::cholesky_factor(reg);
    } catch (const std::runtime_error&) {
        throw std::runtime_error("mmse_init: regularized Gram matrix is singular");
    }
    return linalg::cholesky_solve(chol, b);
}

LayerState initial_state(const PreparedModel& pm) {
    LayerState s;
    s.x_hat = pm.mmse;
    s.v.assign(pm.dim, 1.0);
    s.e = pm.init_error;
    return s;
}

void bso(const PreparedModel& pm, const LayerState& prev, double theta1, double theta2,
         Vec& mu, Vec& sigma) {
    const std::size_t n = pm.dim;
    if (!(theta2 > 0.0)) throw std::invalid_argument("bso: theta2 must be positive");
    mu.resize(n);
    sigma.resize(n);
    Vec gx = linalg::matvec(pm.gram, prev.x_hat);
    for (std::size_t q = 0; q < n; ++q) {
        const double d = pm.col_energy[q];
        const double residual = pm.matched[q] - gx[q];
        mu[q] = prev.x_hat[q] + theta1 * (residual / d);

        double interference = 0.0;
        const double* wrow = &pm.gram_sq.a[q * n];
        for (std::size_t j = 0; j < n; ++j) {
            if (j == q) continue;
            interference += wrow[j] * prev.v[j];
        }
        const double raw = (interference + d * pm.noise_var_real) / (d * d);
        const double scaled = theta2 * raw;
        sigma[q] = scaled > kVarFloor ? scaled : kVarFloor;
    }
}

void bse(const Vec& mu, const Vec& sigma, const std::vector<double>& alphabet,
         Vec& x_hat, Vec& v) {
    const std::size_t n = mu.size();
    const std::size_t m = alphabet.size();
    x_hat.resize(n);
    v.resize(n);
    std::vector<double> p(m);
    for (std::size_t q = 0; q < n; ++q) {
        if (!(sigma[q] > 0.0)) throw std::invalid_argument("bse: nonpositive variance");
        double zmax = -1e300;
        for (std::size_t a = 0; a < m; ++a) {
            const double d = alphabet[a] - mu[q];
            const double z = -(d * d) / (2.0 * sigma[q]);
            p[a] = z;
            if (z > zmax) zmax = z;
        }
        double total = 0.0;
        for (std::size_t a = 0; a < m; ++a) {
            p[a] = std::exp(p[a] - zmax);
            total += p[a];
        }
        double m1 = 0.0, m2 = 0.0;
        for (std::size_t a = 0; a < m; ++a) {
            const double w = p[a] / total;
            m1 += alphabet[a] * w;
            m2 += alphabet[a] * alphabet[a] * w;
        }
        x_hat[q] = m1;
        const double var = m2 - m1 * m1;
        v[q] = var > kVarFloor ? var : kVarFloor;
    }
}

LayerState dsc(const PreparedModel& pm, const LayerState& prev, const LayerState& curr,
               double theta3) {
    const std::size_t n = pm.dim;
    if (!(theta3 > 0.0)) throw std::invalid_argument("dsc: theta3 must be positive");
    LayerState out;
    out.mu = curr.mu;
    out.sigma = curr.sigma;
    out.x_hat.resize(n);
    out.v.resize(n);
    out.e.resize(n);
    out.rho.resize(n);

    Vec gx = linalg::matvec(pm.gram, curr.x_hat);
    for (std::size_t q = 0; q < n; ++q) {
        const double r = pm.matched[q] - gx[q];
        out.e[q] = theta3 * (r * r);
        const double total = out.e[q] + prev.e[q];
        const double rho = total > 0.0 ? prev.e[q] / total : 0.5;
        out.rho[q] = rho;
        out.x_hat[q] = (1.0 - rho) * prev.x_hat[q] + rho * curr.x_hat[q];
        out.v[q] = (1.0 - rho) * prev.v[q] + rho * curr.v[q];
    }
    return out;
}

DetectResult detect(const PreparedModel& pm, const DetectorParams& params, bool want_trace) {
    params.validate();
    const int layers = params.layers();
    DetectResult result;
    if (want_trace) result.trace.reserve(layers);

    LayerState state = initial_state(pm);
    LayerState curr;
    for (int t = 0; t < layers; ++t) {
        bso(pm, state, params.theta1[t], params.theta2[t], curr.mu, curr.sigma);
        bse(curr.mu, curr.sigma, pm.alphabet, curr.x_hat, curr.v);
        state = dsc(pm, state, curr, params.theta3[t]);
        if (want_trace) result.trace.push_back(state);
    }
    result.x_hat = std::move(state.x_hat);
    return result;
}

DetectResult detect(const RealModel& m, const DetectorParams& params, const Constellation& c) {
    return detect(prepare_model(m, c), params, true);
}

CVec ml_oracle(const RealModel& m, const Constellation& c) {
    const std::size_t n = m.dim();
    const std::size_t half = n / 2;
    const auto order = static_cast<std::uint64_t>(c.order());
    if (half > 8) throw std::invalid_argument("ml_oracle: grid too large for exhaustive search");
    double budget = 1.0;
    for (std::size_t i = 0; i < half; ++i) budget *= static_cast<double>(order);
    if (budget > 1e6)
        throw std::invalid_argument("ml_oracle: candidate space exceeds exhaustive-search budget");
    const auto count = static_cast<std::uint64_t>(budget);

    std::vector<int> labels(half, 0);
    std::vector<int> best_labels(half, 0);
    Vec xr(n), hx(n);
    double best = 1e300;
    for (std::uint64_t idx = 0; idx < count; ++idx) {
        std::uint64_t rem = idx;
        for (std::size_t s = 0; s < half; ++s) {
            labels[s] = static_cast<int>(rem % order);
            rem /= order;
        }
        for (std::size_t s = 0; s < half; ++s) {
            const cplx p = c.points[static_cast<std::size_t>(labels[s])];
            xr[s] = p.real();
            xr[s + half] = p.imag();
        }
        linalg::matvec(m.h, xr, hx);
        double dist = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = m.y[i] - hx[i];
            dist += d * d;
        }
        if (dist < best) {
            best = dist;
            best_labels = labels;
        }
    }
    CVec out(half);
    for (std::size_t s = 0; s < half; ++s)
        out[s] = c.points[static_cast<std::size_t>(best_labels[s])];
    return out;
}

std::vector<int> hard_decision_labels(const Vec& x_hat, const Constellation& c) {
    if (x_hat.size() % 2 != 0) throw std::invalid_argument("hard_decision: odd vector length");
    const std::size_t half = x_hat.size() / 2;
    std::vector<int> labels(half);
    for (std::size_t s = 0; s < half; ++s)
        labels[s] = nearest_point(cplx(x_hat[s], x_hat[s + half]), c);
    return labels;
}

CVec hard_decision(const Vec& x_hat, const Constellation& c) {
    const std::vector<int> labels = hard_decision_labels(x_hat, c);
    CVec out(labels.size());
    for (std::size_t s = 0; s < labels.size(); ++s)
        out[s] = c.points[static_cast<std::size_t>(labels[s])];
    return out;
}

}  // namespace otfs
