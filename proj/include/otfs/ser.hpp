#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "otfs/config.hpp"
#include "otfs/detector.hpp"

namespace otfs {

enum class SweepKind { paths, grid_size, layers, snr };
enum class DetectorKind { mmse, bpic, bpicnet, ml_oracle };

std::string detector_name(DetectorKind kind);
DetectorKind detector_from_name(const std::string& name);
SweepKind sweep_from_name(const std::string& name);

// Monte-Carlo SER sweep. Every detector at a sweep point consumes identical
// (channel, symbols, noise) realizations; frames are reproducible from
// (seed, sweep point, frame index).
struct SweepSpec {
    SweepKind kind = SweepKind::snr;
    SystemConfig base;
    std::vector<double> values;       // layers sweep: empty means every layer
    long frames = 1000;
    std::vector<DetectorKind> detectors;
    std::uint64_t seed = 1;
    int path_count = 14;              // used when paths is not the swept axis
    double snr_db = 15.0;             // used when snr is not the swept axis
    DetectorParams net_params;        // required when bpicnet is requested
};

struct SerCell {
    double sweep_value = 0.0;
    std::string detector;
    long frames = 0;
    long symbols = 0;
    long errors = 0;
    double ser = 0.0;
    double ci_half_width = 0.0;  // 1.96 * sqrt(ser*(1-ser)/symbols)
};

std::vector<SerCell> run_ser_sweep(const SweepSpec& spec);

// Columns: sweep_value, detector, frames, symbols, errors, ser, ci95.
void write_ser_csv(std::ostream& out, const std::vector<SerCell>& cells);

}  // namespace otfs
