#include "otfs/ser.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "otfs/frame.hpp"

namespace otfs {

std::string detector_name(DetectorKind kind) {
    switch (kind) {
        case DetectorKind::mmse: return "mmse";
        case DetectorKind::bpic: return "bpic";
        case DetectorKind::bpicnet: return "bpicnet";
        case DetectorKind::ml_oracle: return "ml_oracle";
    }
    return "?";
}

DetectorKind detector_from_name(const std::string& name) {
    if (name == "mmse") return DetectorKind::mmse;
    if (name == "bpic") return DetectorKind::bpic;
    if (name == "bpicnet") return DetectorKind::bpicnet;
    if (name == "ml_oracle" || name == "ml") return DetectorKind::ml_oracle;
    throw std::invalid_argument("unknown detector '" + name + "'");
}

SweepKind sweep_from_name(const std::string& name) {
    if (name == "paths") return SweepKind::paths;
    if (name == "grid" || name == "grid_size") return SweepKind::grid_size;
    if (name == "layers") return SweepKind::layers;
    if (name == "snr") return SweepKind::snr;
    throw std::invalid_argument("unknown sweep kind '" + name + "'");
}

namespace {

struct Point {
    double sweep_value = 0.0;
    SystemConfig cfg;
    int paths = 0;
    double snr_db = 0.0;
};

long count_errors(const std::vector<int>& decided, const std::vector<int>& truth) {
    long e = 0;
    for (std::size_t i = 0; i < truth.size(); ++i)
        if (decided[i] != truth[i]) ++e;
    return e;
}

double ci95(double ser, long symbols) {
    if (symbols <= 0) return 0.0;
    return 1.96 * std::sqrt(ser * (1.0 - ser) / static_cast<double>(symbols));
}

void check_ml_feasible(const SystemConfig& cfg) {
    const int kl = cfg.grid_size();
    if (kl > 8) throw std::invalid_argument("ml_oracle infeasible: KL > 8");
    double budget = 1.0;
    for (int i = 0; i < kl; ++i) budget *= cfg.mod_order;
    if (budget > 1e6) throw std::invalid_argument("ml_oracle infeasible: M^KL > 1e6");
}

std::vector<SerCell> run_layers_sweep(const SweepSpec& spec) {
    const SystemConfig cfg = spec.base;
    const Constellation c = make_constellation(cfg.mod_order);
    const int layers = cfg.detector_layers;
    const long frames = spec.frames;
    const int kl = cfg.grid_size();

    std::vector<SerCell> cells;
    for (DetectorKind kind : spec.detectors) {
        if (kind != DetectorKind::bpic && kind != DetectorKind::bpicnet)
            throw std::invalid_argument("layers sweep supports only bpic and bpicnet");
        const DetectorParams params =
            kind == DetectorKind::bpic ? DetectorParams::ones(layers) : spec.net_params;

        std::vector<long> errs(static_cast<std::size_t>(frames) * layers, 0);
#pragma omp parallel for schedule(dynamic)
        for (long long f = 0; f < frames; ++f) {
            Rng rng = Rng::derive(spec.seed, {static_cast<std::uint64_t>(spec.kind), 0,
                                              static_cast<std::uint64_t>(f)});
            const FrameInstance frame = make_frame(cfg, c, spec.path_count, spec.snr_db, rng);
            const PreparedModel pm = prepare_model(frame.model, c);
            const DetectResult res = detect(pm, params, true);
            for (int t = 0; t < layers; ++t)
                errs[static_cast<std::size_t>(f) * layers + t] =
                    count_errors(hard_decision_labels(res.trace[t].x_hat, c), frame.labels);
        }

        for (int t = 0; t < layers; ++t) {
            if (!spec.values.empty()) {
                bool wanted = false;
                for (double v : spec.values)
                    if (static_cast<int>(v) == t + 1) wanted = true;
                if (!wanted) continue;
            }
            long total = 0;
            for (long f = 0; f < frames; ++f)
                total += errs[static_cast<std::size_t>(f) * layers + t];
            SerCell cell;
            cell.sweep_value = t + 1;
            cell.detector = detector_name(kind);
            cell.frames = frames;
            cell.symbols = frames * kl;
            cell.errors = total;
            cell.ser = static_cast<double>(total) / static_cast<double>(cell.symbols);
            cell.ci_half_width = ci95(cell.ser, cell.symbols);
            cells.push_back(cell);
        }
    }
    return cells;
}

}  // namespace

std::vector<SerCell> run_ser_sweep(const SweepSpec& spec) {
    if (spec.frames < 1) throw std::invalid_argument("ser sweep: frames must be >= 1");
    if (spec.detectors.empty()) throw std::invalid_argument("ser sweep: no detectors requested");
    spec.base.validate();

    for (DetectorKind kind : spec.detectors) {
        if (kind == DetectorKind::bpicnet) {
            spec.net_params.validate();
            if (spec.net_params.layers() != spec.base.detector_layers)
                throw std::invalid_argument(
                    "ser sweep: loaded parameter layer count does not match config T");
        }
    }

    if (spec.kind == SweepKind::layers) return run_layers_sweep(spec);
    if (spec.values.empty()) throw std::invalid_argument("ser sweep: no sweep values");

    std::vector<SerCell> cells;
    for (std::size_t pi = 0; pi < spec.values.size(); ++pi) {
        Point pt;
        pt.sweep_value = spec.values[pi];
        pt.cfg = spec.base;
        pt.paths = spec.path_count;
        pt.snr_db = spec.snr_db;
        switch (spec.kind) {
            case SweepKind::paths:
                pt.paths = static_cast<int>(pt.sweep_value);
                break;
            case SweepKind::grid_size:
                pt.cfg.subcarriers = static_cast<int>(pt.sweep_value);
                pt.cfg.max_delay_index = pt.cfg.subcarriers - 1;
                break;
            case SweepKind::snr:
                pt.snr_db = pt.sweep_value;
                break;
            case SweepKind::layers:
                break;
        }
        pt.cfg.validate();
        if (pt.paths < 1 || pt.paths > max_path_count(pt.cfg))
            throw std::invalid_argument("ser sweep: path count outside channel grid capacity");

        const Constellation c = make_constellation(pt.cfg.mod_order);
        const int kl = pt.cfg.grid_size();
        const std::size_t nd = spec.detectors.size();
        for (DetectorKind kind : spec.detectors)
            if (kind == DetectorKind::ml_oracle) check_ml_feasible(pt.cfg);

        const DetectorParams all_ones = DetectorParams::ones(pt.cfg.detector_layers);
        std::vector<std::vector<long>> errs(nd,
                                            std::vector<long>(static_cast<std::size_t>(spec.frames), 0));

#pragma omp parallel for schedule(dynamic)
        for (long long f = 0; f < spec.frames; ++f) {
            Rng rng = Rng::derive(spec.seed, {static_cast<std::uint64_t>(spec.kind),
                                              static_cast<std::uint64_t>(pi),
                                              static_cast<std::uint64_t>(f)});
            const FrameInstance frame = make_frame(pt.cfg, c, pt.paths, pt.snr_db, rng);
            const PreparedModel pm = prepare_model(frame.model, c);
            for (std::size_t d = 0; d < nd; ++d) {
                std::vector<int> decided;
                switch (spec.detectors[d]) {
                    case DetectorKind::mmse:
                        decided = hard_decision_labels(pm.mmse, c);
                        break;
                    case DetectorKind::bpic:
                        decided = hard_decision_labels(detect(pm, all_ones, false).x_hat, c);
                        break;
                    case DetectorKind::bpicnet:
                        decided = hard_decision_labels(detect(pm, spec.net_params, false).x_hat, c);
                        break;
                    case DetectorKind::ml_oracle: {
                        const CVec sym = ml_oracle(frame.model, c);
                        decided.resize(sym.size());
                        for (std::size_t s = 0; s < sym.size(); ++s)
                            decided[s] = nearest_point(sym[s], c);
                        break;
                    }
                }
                errs[d][static_cast<std::size_t>(f)] = count_errors(decided, frame.labels);
            }
        }

        for (std::size_t d = 0; d < nd; ++d) {
            long total = 0;
            for (long f = 0; f < spec.frames; ++f) total += errs[d][static_cast<std::size_t>(f)];
            SerCell cell;
            cell.sweep_value = pt.sweep_value;
            cell.detector = detector_name(spec.detectors[d]);
            cell.frames = spec.frames;
            cell.symbols = spec.frames * kl;
            cell.errors = total;
            cell.ser = static_cast<double>(total) / static_cast<double>(cell.symbols);
            cell.ci_half_width = ci95(cell.ser, cell.symbols);
            cells.push_back(cell);
        }
    }
    return cells;
}

void write_ser_csv(std::ostream& out, const std::vector<SerCell>& cells) {
    out << "sweep_value,detector,frames,symbols,errors,ser,ci95\n";
    char buf[192];
    for (const auto& c : cells) {
        std::snprintf(buf, sizeof buf, "%.10g,%s,%ld,%ld,%ld,%.10g,%.10g\n", c.sweep_value,
                      c.detector.c_str(), c.frames, c.symbols, c.errors, c.ser, c.ci_half_width);
        out << buf;
    }
}

}  // namespace otfs
