#pragma once

#include <cmath>

namespace otfs {

// OTFS grid and waveform parameters. An OTFS frame carries `subframes` x
// `subcarriers` (K x L) QAM symbols on the delay-Doppler grid.
struct SystemConfig {
    int subframes = 7;                      // K
    int subcarriers = 12;                   // L
    double subcarrier_spacing_hz = 15e3;    // delta f
    double carrier_freq_hz = 10e9;
    int max_doppler_index = 3;              // Doppler index range is [-k_max, k_max]
    int max_delay_index = 11;               // delay index range is [0, l_max]
    int mod_order = 4;                      // square QAM size
    int detector_layers = 10;

    double subframe_duration_s() const { return 1.0 / subcarrier_spacing_hz; }
    int cyclic_prefix_len() const { return max_delay_index; }
    int grid_size() const { return subframes * subcarriers; }

    // Throws std::invalid_argument when the grid bounds or modulation are invalid.
    void validate() const;
};

// SNR convention: unit average symbol energy and unit total channel power,
// so snr = 1/sigma^2 with sigma^2 the per-complex-dimension noise variance.
inline double noise_variance_from_snr_db(double snr_db) {
    return std::pow(10.0, -snr_db / 10.0);
}

}  // namespace otfs
