#include "otfs/channel.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <utility>

namespace otfs {

double ChannelRealization::delay_s(const SystemConfig& cfg, int i) const {
    return paths[i].delay_index * cfg.subframe_duration_s() / cfg.subcarriers;
}

double ChannelRealization::doppler_hz(const SystemConfig& cfg, int i) const {
    return paths[i].doppler_index * cfg.subcarrier_spacing_hz / cfg.subframes;
}

int max_path_count(const SystemConfig& cfg) {
    return (2 * cfg.max_doppler_index + 1) * cfg.max_delay_index;
}

ChannelRealization sample_channel(const SystemConfig& cfg, int path_count, Rng& rng) {
    cfg.validate();
    if (path_count < 1 || path_count > max_path_count(cfg))
        throw std::invalid_argument("sample_channel: path count outside [1, (2k_max+1)*l_max]");

    const int kspan = 2 * cfg.max_doppler_index + 1;
    ChannelRealization r;
    r.paths.resize(path_count);

    // First path at zero delay, Doppler uniform.
    const int k1 = static_cast<int>(rng.integer(-cfg.max_doppler_index, cfg.max_doppler_index));
    r.paths[0].delay_index = 0;
    r.paths[0].doppler_index = k1;

    // Remaining placements: partial Fisher-Yates over the grid minus the first cell.
    std::vector<std::pair<int, int>> cells;
    cells.reserve(static_cast<std::size_t>(cfg.max_delay_index + 1) * kspan - 1);
    for (int l = 0; l <= cfg.max_delay_index; ++l)
        for (int k = -cfg.max_doppler_index; k <= cfg.max_doppler_index; ++k)
            if (!(l == 0 && k == k1)) cells.emplace_back(l, k);
    for (int i = 1; i < path_count; ++i) {
        const auto pick = static_cast<std::size_t>(i - 1) +
                          rng.below(cells.size() - static_cast<std::size_t>(i - 1));
        std::swap(cells[static_cast<std::size_t>(i - 1)], cells[pick]);
        r.paths[i].delay_index = cells[static_cast<std::size_t>(i - 1)].first;
        r.paths[i].doppler_index = cells[static_cast<std::size_t>(i - 1)].second;
    }

    const double gain_var = 1.0 / path_count;
    for (auto& p : r.paths) p.gain = rng.cgaussian(gain_var);
    return r;
}

CMat build_time_channel(const ChannelRealization& r, const SystemConfig& cfg) {
    const int n = cfg.grid_size();
    CMat h(n, n);
    for (const auto& p : r.paths) {
        // (cyclic delay by l) * diag(exp(j 2 pi k c / KL)): one entry per column.
        for (int c = 0; c < n; ++c) {
            const double phase = 2.0 * M_PI * p.doppler_index * c / n;
            h((c + p.delay_index) % n, c) += p.gain * cplx(std::cos(phase), std::sin(phase));
        }
    }
    return h;
}

namespace {

// DFT entries (1/sqrt N) exp(-j 2 pi p q / N).
CMat dft_matrix(int n) {
    CMat f(n, n);
    const double s = 1.0 / std::sqrt(static_cast<double>(n));
    for (int p = 0; p < n; ++p) {
        for (int q = 0; q < n; ++q) {
            const double ang = -2.0 * M_PI * p * q / n;
            f(p, q) = s * cplx(std::cos(ang), std::sin(ang));
        }
    }
    return f;
}

// B = (F kron I_L) * A, i.e. a K-point transform across the block-row index.
CMat kron_apply_left(const CMat& f, const CMat& a, int block) {
    const int k = static_cast<int>(f.rows);
    const auto n = a.rows;
    CMat b(n, a.cols);
#pragma omp parallel for schedule(static)
    for (long long cc = 0; cc < static_cast<long long>(a.cols); ++cc) {
        const auto c = static_cast<std::size_t>(cc);
        for (int p = 0; p < k; ++p) {
            for (int u = 0; u < block; ++u) {
                cplx acc(0.0, 0.0);
                for (int q = 0; q < k; ++q)
                    acc += f(p, q) * a(static_cast<std::size_t>(q) * block + u, c);
                b(static_cast<std::size_t>(p) * block + u, c) = acc;
            }
        }
    }
    return b;
}

// B = A * (F^H kron I_L), a conjugate transform across the block-column index.
CMat kron_apply_right_hermitian(const CMat& f, const CMat& a, int block) {
    const int k = static_cast<int>(f.rows);
    CMat b(a.rows, a.cols);
#pragma omp parallel for schedule(static)
    for (long long rr = 0; rr < static_cast<long long>(a.rows); ++rr) {
        const auto r = static_cast<std::size_t>(rr);
        for (int q = 0; q < k; ++q) {
            for (int v = 0; v < block; ++v) {
                cplx acc(0.0, 0.0);
                for (int p = 0; p < k; ++p)
                    acc += a(r, static_cast<std::size_t>(p) * block + v) * std::conj(f(q, p));
                b(r, static_cast<std::size_t>(q) * block + v) = acc;
            }
        }
    }
    return b;
}

}  // namespace

EffectiveChannel build_effective_channel(CMat time_channel, const SystemConfig& cfg) {
    const auto n = static_cast<std::size_t>(cfg.grid_size());
    if (time_channel.rows != n || time_channel.cols != n)
        throw std::invalid_argument("build_effective_channel: matrix is not KL x KL");
    const CMat f = dft_matrix(cfg.subframes);
    CMat eff = kron_apply_left(f, time_channel, cfg.subcarriers);
    eff = kron_apply_right_hermitian(f, eff, cfg.subcarriers);
    EffectiveChannel ec;
    ec.time_domain = std::move(time_channel);
    ec.effective = std::move(eff);
    return ec;
}

CVec transmit(const CVec& x, const EffectiveChannel& ec, double sigma2, Rng& rng) {
    const auto n = ec.effective.rows;
    if (x.size() != n) throw std::invalid_argument("transmit: symbol vector size mismatch");
    CVec y(n);
    for (std::size_t i = 0; i < n; ++i) {
        cplx acc(0.0, 0.0);
        for (std::size_t j = 0; j < n; ++j) acc += ec.effective(i, j) * x[j];
        y[i] = acc;
    }
    if (sigma2 > 0.0)
        for (auto& v : y) v += rng.cgaussian(sigma2);
    return y;
}

void append_channel_dump(std::ostream& out, std::uint64_t seed, const ChannelRealization& r) {
    out << seed << ',' << r.path_count();
    char buf[64];
    for (const auto& p : r.paths) {
        std::snprintf(buf, sizeof buf, ",%.17g,%.17g,%d,%d", p.gain.real(), p.gain.imag(),
                      p.delay_index, p.doppler_index);
        out << buf;
    }
    out << '\n';
}

}  // namespace otfs
