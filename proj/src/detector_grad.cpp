#include "otfs/detector_grad.hpp"

#include <cmath>
#include <stdexcept>

// Reverse-mode differentiation of the unfolded detector with respect to the
// per-layer scalars. The forward pass here mirrors the arithmetic of
// bso/bse/dsc exactly (asserted bitwise by the tests) while recording the
// intermediates the backward sweep needs.

namespace otfs {

namespace {

constexpr double kVarFloor = 1e-13;

struct LayerTape {
    Vec x_in, v_in, e_in;
    Vec r1, mu, sig;
    Vec xb, vb;
    Vec r2, e_out, rho;
};

int resolve_layers(const DetectorParams& params, int eval_layer) {
    const int total = params.layers();
    if (eval_layer <= 0 || eval_layer > total) return total;
    return eval_layer;
}

void forward_tape(const PreparedModel& pm, const DetectorParams& params, int layers,
                  std::vector<LayerTape>& tape, Vec& x_final) {
    const std::size_t n = pm.dim;
    tape.resize(layers);
    Vec x = pm.mmse;
    Vec v(n, 1.0);
    Vec e = pm.init_error;
    Vec gx(n), mu(n), sig(n), xb(n), vb(n);
    std::vector<double> p(pm.alphabet.size());

    for (int t = 0; t < layers; ++t) {
        LayerTape& tp = tape[t];
        tp.x_in = x;
        tp.v_in = v;
        tp.e_in = e;

        linalg::matvec(pm.gram, x, gx);
        tp.r1.resize(n);
        mu.resize(n);
        sig.resize(n);
        for (std::size_t q = 0; q < n; ++q) {
            const double d = pm.col_energy[q];
            const double residual = pm.matched[q] - gx[q];
            tp.r1[q] = residual;
            mu[q] = x[q] + params.theta1[t] * (residual / d);
            double interference = 0.0;
            const double* wrow = &pm.gram_sq.a[q * n];
            for (std::size_t j = 0; j < n; ++j) {
                if (j == q) continue;
                interference += wrow[j] * v[j];
            }
            const double raw = (interference + d * pm.noise_var_real) / (d * d);
            const double scaled = params.theta2[t] * raw;
            sig[q] = scaled > kVarFloor ? scaled : kVarFloor;
        }
        tp.mu = mu;
        tp.sig = sig;

        const std::size_t m = pm.alphabet.size();
        xb.resize(n);
        vb.resize(n);
        for (std::size_t q = 0; q < n; ++q) {
            double zmax = -1e300;
            for (std::size_t a = 0; a < m; ++a) {
                const double d = pm.alphabet[a] - mu[q];
                const double z = -(d * d) / (2.0 * sig[q]);
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
                m1 += pm.alphabet[a] * w;
                m2 += pm.alphabet[a] * pm.alphabet[a] * w;
            }
            xb[q] = m1;
            const double var = m2 - m1 * m1;
            vb[q] = var > kVarFloor ? var : kVarFloor;
        }
        tp.xb = xb;
        tp.vb = vb;

        linalg::matvec(pm.gram, xb, gx);
        tp.r2.resize(n);
        tp.e_out.resize(n);
        tp.rho.resize(n);
        for (std::size_t q = 0; q < n; ++q) {
            const double r = pm.matched[q] - gx[q];
            tp.r2[q] = r;
            tp.e_out[q] = params.theta3[t] * (r * r);
            const double total = tp.e_out[q] + e[q];
            const double rho = total > 0.0 ? e[q] / total : 0.5;
            tp.rho[q] = rho;
            x[q] = (1.0 - rho) * tp.x_in[q] + rho * xb[q];
            v[q] = (1.0 - rho) * tp.v_in[q] + rho * vb[q];
        }
        e = tp.e_out;
    }
    x_final = std::move(x);
}

// Posterior covariances Cov_p(a^w, dz/dmu) and Cov_p(a^w, dz/dsig) for one
// element; probabilities are recomputed from the taped (mu, sig).
struct BseDerivs {
    double dxb_dmu, dxb_dsig, dvb_dmu, dvb_dsig;
};

BseDerivs bse_derivs(double mu, double sig, const std::vector<double>& alphabet,
                     std::vector<double>& scratch) {
    const std::size_t m = alphabet.size();
    double zmax = -1e300;
    for (std::size_t a = 0; a < m; ++a) {
        const double d = alphabet[a] - mu;
        const double z = -(d * d) / (2.0 * sig);
        scratch[a] = z;
        if (z > zmax) zmax = z;
    }
    double total = 0.0;
    for (std::size_t a = 0; a < m; ++a) {
        scratch[a] = std::exp(scratch[a] - zmax);
        total += scratch[a];
    }
    double e_a = 0.0, e_a2 = 0.0, e_u = 0.0, e_au = 0.0, e_a2u = 0.0;
    double e_s = 0.0, e_as = 0.0, e_a2s = 0.0;
    for (std::size_t a = 0; a < m; ++a) {
        const double w = scratch[a] / total;
        const double av = alphabet[a];
        const double diff = av - mu;
        const double u = diff / sig;                       // dz/dmu
        const double s = diff * diff / (2.0 * sig * sig);  // dz/dsig
        e_a += av * w;
        e_a2 += av * av * w;
        e_u += u * w;
        e_au += av * u * w;
        e_a2u += av * av * u * w;
        e_s += s * w;
        e_as += av * s * w;
        e_a2s += av * av * s * w;
    }
    BseDerivs d;
    const double cov_a_u = e_au - e_a * e_u;
    const double cov_a2_u = e_a2u - e_a2 * e_u;
    const double cov_a_s = e_as - e_a * e_s;
    const double cov_a2_s = e_a2s - e_a2 * e_s;
    d.dxb_dmu = cov_a_u;
    d.dxb_dsig = cov_a_s;
    d.dvb_dmu = cov_a2_u - 2.0 * e_a * cov_a_u;
    d.dvb_dsig = cov_a2_s - 2.0 * e_a * cov_a_s;
    return d;
}

}  // namespace

double sample_loss(const PreparedModel& pm, const DetectorParams& params, int eval_layer) {
    if (pm.x_true.size() != pm.dim)
        throw std::invalid_argument("sample_loss: model has no ground truth");
    const int layers = resolve_layers(params, eval_layer);
    std::vector<LayerTape> tape;
    Vec x_final;
    forward_tape(pm, params, layers, tape, x_final);
    double acc = 0.0;
    for (std::size_t q = 0; q < pm.dim; ++q) {
        const double d = pm.x_true[q] - x_final[q];
        acc += d * d;
    }
    return acc;
}

double sample_loss_and_grad(const PreparedModel& pm, const DetectorParams& params,
                            Vec& grad_out, int eval_layer) {
    if (pm.x_true.size() != pm.dim)
        throw std::invalid_argument("sample_loss_and_grad: model has no ground truth");
    const int total = params.layers();
    if (grad_out.size() != static_cast<std::size_t>(3 * total))
        throw std::invalid_argument("sample_loss_and_grad: gradient buffer size mismatch");
    const int layers = resolve_layers(params, eval_layer);
    const std::size_t n = pm.dim;

    std::vector<LayerTape> tape;
    Vec x_final;
    forward_tape(pm, params, layers, tape, x_final);

    double loss = 0.0;
    Vec gx(n), gv(n, 0.0), ge(n, 0.0);
    for (std::size_t q = 0; q < n; ++q) {
        const double d = x_final[q] - pm.x_true[q];
        loss += d * d;
        gx[q] = 2.0 * d;
    }
    if (!std::isfinite(loss))
        throw std::runtime_error("sample_loss_and_grad: non-finite loss in forward pass");

    Vec gxb(n), gvb(n), gmu(n), gsig(n), gs(n), gtmp(n), gr(n);
    std::vector<double> scratch(pm.alphabet.size());

    for (int t = layers - 1; t >= 0; --t) {
        const LayerTape& tp = tape[t];
        const double th1 = params.theta1[t];
        const double th2 = params.theta2[t];
        const double th3 = params.theta3[t];

        // DSC combination and weights
        double g3 = 0.0;
        for (std::size_t q = 0; q < n; ++q) {
            const double rho = tp.rho[q];
            const double grho = gx[q] * (tp.xb[q] - tp.x_in[q]) + gv[q] * (tp.vb[q] - tp.v_in[q]);
            gxb[q] = gx[q] * rho;
            gvb[q] = gv[q] * rho;
            gx[q] *= (1.0 - rho);
            gv[q] *= (1.0 - rho);

            const double total = tp.e_out[q] + tp.e_in[q];
            double ge_new = ge[q];
            double ge_in = 0.0;
            if (total > 0.0) {
                const double inv2 = 1.0 / (total * total);
                ge_in = grho * tp.e_out[q] * inv2;
                ge_new -= grho * tp.e_in[q] * inv2;
            }
            // e_out = theta3 * r2^2
            const double eps = tp.r2[q] * tp.r2[q];
            g3 += ge_new * eps;
            gr[q] = 2.0 * (ge_new * th3) * tp.r2[q];
            ge[q] = ge_in;
        }
        grad_out[static_cast<std::size_t>(2 * total + t)] += g3;

        // r2 = b - G xb
        linalg::matvec(pm.gram, gr, gtmp);
        for (std::size_t q = 0; q < n; ++q) gxb[q] -= gtmp[q];

        // BSE
        for (std::size_t q = 0; q < n; ++q) {
            const BseDerivs d = bse_derivs(tp.mu[q], tp.sig[q], pm.alphabet, scratch);
            const double gvb_q = tp.vb[q] > kVarFloor ? gvb[q] : 0.0;
            gmu[q] = gxb[q] * d.dxb_dmu + gvb_q * d.dvb_dmu;
            gsig[q] = gxb[q] * d.dxb_dsig + gvb_q * d.dvb_dsig;
        }

        // sig = max(theta2 * raw, floor), raw = (s + d*noise)/(d*d)
        double g2 = 0.0;
        for (std::size_t q = 0; q < n; ++q) {
            if (tp.sig[q] > kVarFloor) {
                const double raw = tp.sig[q] / th2;
                g2 += gsig[q] * raw;
                const double d = pm.col_energy[q];
                gs[q] = gsig[q] * th2 / (d * d);
            } else {
                gs[q] = 0.0;
            }
        }
        grad_out[static_cast<std::size_t>(total + t)] += g2;

        // s_q = sum_{j != q} W[q][j] v_j
        linalg::matvec(pm.gram_sq, gs, gtmp);
        for (std::size_t q = 0; q < n; ++q)
            gv[q] += gtmp[q] - pm.gram_sq(q, q) * gs[q];

        // mu = x + theta1 * (r1 / d)
        double g1 = 0.0;
        for (std::size_t q = 0; q < n; ++q) {
            const double d = pm.col_energy[q];
            g1 += gmu[q] * (tp.r1[q] / d);
            gr[q] = th1 * gmu[q] / d;
            gx[q] += gmu[q];
        }
        grad_out[static_cast<std::size_t>(t)] += g1;

        // r1 = b - G x
        linalg::matvec(pm.gram, gr, gtmp);
        for (std::size_t q = 0; q < n; ++q) gx[q] -= gtmp[q];
    }
    return loss;
}

}  // namespace otfs
