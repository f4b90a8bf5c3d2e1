// Command-line front end: single-frame simulation, detector training,
// Monte-Carlo SER sweeps and the multiplication-count calculator.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#ifdef _OPENMP
#include <omp.h>
#endif

#include "otfs/complexity.hpp"
#include "otfs/frame.hpp"
#include "otfs/ser.hpp"
#include "otfs/trainer.hpp"

using namespace otfs;

namespace {

struct ConfigFlags {
    SystemConfig cfg;
    int l_max = -1;  // resolved to L-1 when unset
    int k_max = -1;  // resolved to floor(K/2) when unset
    int threads = 0;

    SystemConfig resolve() const {
        SystemConfig out = cfg;
        out.max_delay_index = l_max >= 0 ? l_max : out.subcarriers - 1;
        out.max_doppler_index = k_max >= 0 ? k_max : out.subframes / 2;
        out.validate();
        return out;
    }
};

void add_config_flags(CLI::App* app, ConfigFlags& f) {
    app->add_option("--K", f.cfg.subframes, "OTFS subframes per frame")->capture_default_str();
    app->add_option("--L", f.cfg.subcarriers, "Subcarriers")->capture_default_str();
    app->add_option("--delta-f", f.cfg.subcarrier_spacing_hz, "Subcarrier spacing in Hz")
        ->capture_default_str();
    app->add_option("--fc", f.cfg.carrier_freq_hz, "Carrier frequency in Hz")
        ->capture_default_str();
    app->add_option("--k-max", f.k_max, "Maximum Doppler index (default: floor(K/2))");
    app->add_option("--l-max", f.l_max, "Maximum delay index (default: L-1)");
    app->add_option("--mod-order", f.cfg.mod_order, "QAM constellation size")
        ->capture_default_str();
    app->add_option("--T", f.cfg.detector_layers, "Detector layer count")->capture_default_str();
    app->add_option("--threads", f.threads, "OpenMP thread count (0 = library default)");
}

void apply_threads(const ConfigFlags& f) {
#ifdef _OPENMP
    if (f.threads > 0) omp_set_num_threads(f.threads);
#else
    (void)f;
#endif
}

int run_simulate(const ConfigFlags& flags, int paths, double snr_db, std::uint64_t seed,
                 const std::string& params_path, const std::string& dump_path) {
    const SystemConfig cfg = flags.resolve();
    const Constellation c = make_constellation(cfg.mod_order);
    DetectorParams params = DetectorParams::ones(cfg.detector_layers);
    std::string detector = "bpic";
    if (!params_path.empty()) {
        params = load_params(params_path);
        if (params.layers() != cfg.detector_layers)
            throw std::invalid_argument("parameter file layer count does not match --T");
        detector = "bpicnet";
    }

    Rng rng(seed);
    const FrameInstance frame = make_frame(cfg, c, paths, snr_db, rng);
    if (!dump_path.empty()) {
        std::ofstream dump(dump_path, std::ios::app);
        if (!dump) throw std::runtime_error("cannot open channel dump file " + dump_path);
        append_channel_dump(dump, seed, frame.channel);
    }

    const PreparedModel pm = prepare_model(frame.model, c);
    const DetectResult res = detect(pm, params, false);
    const std::vector<int> decided = hard_decision_labels(res.x_hat, c);
    const CVec estimates = complex_from_real(res.x_hat);

    std::printf("frame: K=%d L=%d paths=%d snr=%.1f dB detector=%s seed=%llu\n", cfg.subframes,
                cfg.subcarriers, paths, snr_db, detector.c_str(),
                static_cast<unsigned long long>(seed));
    std::printf("%5s %18s %22s %10s %5s\n", "sym", "sent", "estimate", "decided", "ok");
    long errors = 0;
    for (std::size_t i = 0; i < estimates.size(); ++i) {
        const bool ok = decided[i] == frame.labels[i];
        if (!ok) ++errors;
        const cplx sent = frame.symbols[i];
        const cplx dec = c.points[static_cast<std::size_t>(decided[i])];
        std::printf("%5zu %8.4f%+8.4fj %10.4f%+10.4fj %5.2f%+5.2fj %5s\n", i, sent.real(),
                    sent.imag(), estimates[i].real(), estimates[i].imag(), dec.real(), dec.imag(),
                    ok ? "yes" : "NO");
    }
    std::printf("symbol errors: %ld / %zu (ser %.4g)\n", errors, estimates.size(),
                static_cast<double>(errors) / static_cast<double>(estimates.size()));
    return 0;
}

int run_train(const ConfigFlags& flags, const TrainConfig& tc, const std::string& params_path,
              const std::string& log_path) {
    const SystemConfig cfg = flags.resolve();
    std::printf("training: %d epochs x %d batches x %d samples, lr %.2g, P in [%d,%d], "
                "snr in [%.1f,%.1f] dB\n",
                tc.epochs, tc.batches_per_epoch, tc.batch_size, tc.learning_rate, tc.min_paths,
                tc.max_paths, tc.snr_min_db, tc.snr_max_db);
    const TrainResult res = train(cfg, tc);
    for (const auto& r : res.log)
        std::printf("epoch %4d  train %.6f  val %.6f  lr %.3g  best %.6f\n", r.epoch,
                    r.train_loss, r.val_loss, r.learning_rate, r.best_val);

    save_params(res.params, params_path, tc.seed, config_digest(cfg, tc));
    std::ofstream log(log_path);
    if (!log) throw std::runtime_error("cannot open log file " + log_path);
    write_train_log_csv(log, res.log);
    std::printf("wrote %s and %s (best val %.6f)\n", params_path.c_str(), log_path.c_str(),
                res.log.empty() ? 0.0 : res.log.back().best_val);
    return 0;
}

int run_sweep(const ConfigFlags& flags, SweepSpec spec, const std::string& detector_list,
              const std::string& params_path, const std::string& out_path) {
    spec.base = flags.resolve();

    std::stringstream names(detector_list);
    std::string name;
    while (std::getline(names, name, ',')) {
        if (!name.empty()) spec.detectors.push_back(detector_from_name(name));
    }
    for (DetectorKind k : spec.detectors) {
        if (k == DetectorKind::bpicnet) {
            if (params_path.empty())
                throw std::invalid_argument("bpicnet requested but no --params file given");
            spec.net_params = load_params(params_path);
        }
    }

    const std::vector<SerCell> cells = run_ser_sweep(spec);
    if (out_path.empty()) {
        write_ser_csv(std::cout, cells);
    } else {
        std::ofstream out(out_path);
        if (!out) throw std::runtime_error("cannot open output file " + out_path);
        write_ser_csv(out, cells);
        std::printf("wrote %zu rows to %s\n", cells.size(), out_path.c_str());
    }
    return 0;
}

int run_complexity(int subframes, int subcarriers, int mod_order, int paths, int layers_override,
                   const std::string& out_path) {
    const auto rows = complexity_table(subframes, subcarriers, mod_order, paths, layers_override);
    if (!out_path.empty()) {
        std::ofstream out(out_path);
        if (!out) throw std::runtime_error("cannot open output file " + out_path);
        write_complexity_csv(out, rows);
        return 0;
    }
    std::printf("%-8s %3s %3s %3s %3s %3s %15s\n", "detector", "K", "L", "M", "P", "T",
                "multiplications");
    for (const auto& r : rows)
        std::printf("%-8s %3d %3d %3d %3d %3d %15lld\n", r.detector.c_str(), r.subframes,
                    r.subcarriers, r.mod_order, r.path_count, r.layers,
                    static_cast<long long>(r.multiplications));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"OTFS delay-Doppler simulation and unfolded-detector benchmark"};
    app.require_subcommand(1);

    ConfigFlags flags;

    // simulate
    auto* sim = app.add_subcommand("simulate", "Run one frame end to end and print estimates");
    add_config_flags(sim, flags);
    int sim_paths = 14;
    double sim_snr = 15.0;
    std::uint64_t sim_seed = 1;
    std::string sim_params, sim_dump;
    sim->add_option("--paths", sim_paths, "Propagation path count")->capture_default_str();
    sim->add_option("--snr-db", sim_snr, "Signal-to-noise ratio in dB")->capture_default_str();
    sim->add_option("--seed", sim_seed, "Random seed")->capture_default_str();
    sim->add_option("--params", sim_params, "Trained parameter file (default: all-ones BPIC)");
    sim->add_option("--dump-channel", sim_dump, "Append the channel realization to a CSV file");

    // train
    auto* tr = app.add_subcommand("train", "Train the per-layer detector parameters");
    add_config_flags(tr, flags);
    TrainConfig tc;
    std::string tr_params = "params.json", tr_log = "train_log.csv";
    tr->add_option("--epochs", tc.epochs)->capture_default_str();
    tr->add_option("--batches", tc.batches_per_epoch)->capture_default_str();
    tr->add_option("--batch-size", tc.batch_size)->capture_default_str();
    tr->add_option("--lr", tc.learning_rate)->capture_default_str();
    tr->add_option("--p-min", tc.min_paths)->capture_default_str();
    tr->add_option("--p-max", tc.max_paths)->capture_default_str();
    tr->add_option("--snr-min", tc.snr_min_db)->capture_default_str();
    tr->add_option("--snr-max", tc.snr_max_db)->capture_default_str();
    tr->add_option("--val-size", tc.val_size)->capture_default_str();
    tr->add_option("--seed", tc.seed)->capture_default_str();
    tr->add_option("--plateau-factor", tc.plateau_factor)->capture_default_str();
    tr->add_option("--plateau-patience", tc.plateau_patience)->capture_default_str();
    tr->add_option("--min-lr", tc.min_learning_rate)->capture_default_str();
    tr->add_option("--params", tr_params, "Output parameter file")->capture_default_str();
    tr->add_option("--log", tr_log, "Output training log CSV")->capture_default_str();

    // ser-sweep
    auto* sw = app.add_subcommand("ser-sweep", "Monte-Carlo symbol-error-rate sweep");
    add_config_flags(sw, flags);
    SweepSpec spec;
    std::string sw_kind = "snr", sw_detectors = "mmse,bpic", sw_params, sw_out;
    sw->add_option("--sweep", sw_kind, "Sweep axis: paths, grid, layers, snr")
        ->capture_default_str();
    sw->add_option("--values", spec.values, "Sweep points (layers sweep: defaults to all)")
        ->delimiter(',');
    sw->add_option("--frames", spec.frames, "Monte-Carlo frames per sweep point")
        ->capture_default_str();
    sw->add_option("--detectors", sw_detectors, "Comma list: mmse,bpic,bpicnet,ml_oracle")
        ->capture_default_str();
    sw->add_option("--paths", spec.path_count, "Path count when not swept")->capture_default_str();
    sw->add_option("--snr-db", spec.snr_db, "SNR in dB when not swept")->capture_default_str();
    sw->add_option("--seed", spec.seed, "Random seed")->capture_default_str();
    sw->add_option("--params", sw_params, "Trained parameter file for bpicnet");
    sw->add_option("--out", sw_out, "Output CSV path (default: stdout)");

    // complexity
    auto* cx = app.add_subcommand("complexity", "Detection multiplication counts");
    int cx_k = 7, cx_l = 12, cx_m = 4, cx_paths = 14, cx_layers = -1;
    std::string cx_out;
    cx->add_option("--K", cx_k, "OTFS subframes per frame")->capture_default_str();
    cx->add_option("--L", cx_l, "Subcarriers")->capture_default_str();
    cx->add_option("--mod-order", cx_m, "QAM constellation size")->capture_default_str();
    cx->add_option("--paths", cx_paths, "Path count")->capture_default_str();
    cx->add_option("--T", cx_layers,
                   "Iteration count override (default: customary per-detector values)");
    cx->add_option("--out", cx_out, "Output CSV path (default: table on stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return 0;  // --help
        std::cerr << "error: " << e.what() << "\n" << app.help() << "\n";
        return 2;
    }

    try {
        apply_threads(flags);
        if (sim->parsed()) return run_simulate(flags, sim_paths, sim_snr, sim_seed, sim_params,
                                               sim_dump);
        if (tr->parsed()) return run_train(flags, tc, tr_params, tr_log);
        if (sw->parsed()) {
            spec.kind = sweep_from_name(sw_kind);
            return run_sweep(flags, spec, sw_detectors, sw_params, sw_out);
        }
        if (cx->parsed()) return run_complexity(cx_k, cx_l, cx_m, cx_paths, cx_layers, cx_out);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
