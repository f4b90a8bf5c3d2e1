#include "otfs/frame.hpp"

namespace otfs {

FrameInstance make_frame(const SystemConfig& cfg, const Constellation& c, int path_count,
                         double snr_db, Rng& rng) {
    FrameInstance f;
    f.channel = sample_channel(cfg, path_count, rng);
    const EffectiveChannel ec = build_effective_channel(build_time_channel(f.channel, cfg), cfg);

    const int n = cfg.grid_size();
    f.labels.resize(n);
    f.symbols.resize(n);
    for (int i = 0; i < n; ++i) {
        f.labels[i] = static_cast<int>(rng.below(static_cast<std::uint64_t>(c.order())));
        f.symbols[i] = c.points[static_cast<std::size_t>(f.labels[i])];
    }

    const double sigma2 = noise_variance_from_snr_db(snr_db);
    f.received = transmit(f.symbols, ec, sigma2, rng);
    f.model = to_real_model(ec.effective, f.received, sigma2, f.symbols);
    return f;
}

}  // namespace otfs
