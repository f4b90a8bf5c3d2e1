#include "otfs/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "otfs/detector_grad.hpp"

namespace otfs {

namespace {

// Sub-stream tags under the training seed.
constexpr std::uint64_t kTagSample = 1;
constexpr std::uint64_t kTagValidation = 2;
constexpr std::uint64_t kTagBatchPaths = 3;

TrainSample make_train_sample(const SystemConfig& cfg, const Constellation& c, int path_count,
                              double snr_db, Rng& rng) {
    FrameInstance f = make_frame(cfg, c, path_count, snr_db, rng);
    TrainSample s;
    s.model = std::move(f.model);
    s.path_count = path_count;
    s.snr_db = snr_db;
    return s;
}

// Generates and prepares one training batch without keeping the raw models.
std::vector<PreparedModel> prepared_training_batch(const SystemConfig& cfg,
                                                   const TrainConfig& tc,
                                                   const Constellation& c, int epoch,
                                                   int batch) {
    const int paths = batch_path_count(tc, epoch, batch);
    std::vector<PreparedModel> out(static_cast<std::size_t>(tc.batch_size));
#pragma omp parallel for schedule(dynamic)
    for (long long i = 0; i < static_cast<long long>(tc.batch_size); ++i) {
        Rng rng = Rng::derive(tc.seed, {kTagSample, static_cast<std::uint64_t>(epoch),
                                        static_cast<std::uint64_t>(batch),
                                        static_cast<std::uint64_t>(i)});
        const double snr = rng.uniform(tc.snr_min_db, tc.snr_max_db);
        const TrainSample s = make_train_sample(cfg, c, paths, snr, rng);
        out[static_cast<std::size_t>(i)] = prepare_model(s.model, c);
    }
    return out;
}

double batch_loss_and_grad(const std::vector<PreparedModel>& batch,
                           const DetectorParams& params, Vec* grad_out, int eval_layer) {
    const std::size_t count = batch.size();
    const std::size_t g = static_cast<std::size_t>(3 * params.layers());
    std::vector<double> losses(count, 0.0);
    std::vector<Vec> grads;
    if (grad_out) grads.assign(count, Vec(g, 0.0));

#pragma omp parallel for schedule(dynamic)
    for (long long i = 0; i < static_cast<long long>(count); ++i) {
        const auto idx = static_cast<std::size_t>(i);
        if (grad_out)
            losses[idx] = sample_loss_and_grad(batch[idx], params, grads[idx], eval_layer);
        else
            losses[idx] = sample_loss(batch[idx], params, eval_layer);
    }

    // Ordered reduction keeps results independent of the thread count.
    double total = 0.0;
    for (std::size_t i = 0; i < count; ++i) total += losses[i];
    if (grad_out) {
        grad_out->assign(g, 0.0);
        for (std::size_t i = 0; i < count; ++i)
            for (std::size_t k = 0; k < g; ++k) (*grad_out)[k] += grads[i][k];
        for (double& v : *grad_out) v /= static_cast<double>(count);
    }
    return total / static_cast<double>(count);
}

// Validation loss over tc.val_size samples drawn from a fixed stream, so every
// epoch scores the same set. Samples are prepared in chunks to bound memory.
double validation_loss(const SystemConfig& cfg, const TrainConfig& tc, const Constellation& c,
                       const DetectorParams& params) {
    const int chunk = 128;
    double total = 0.0;
    for (int start = 0; start < tc.val_size; start += chunk) {
        const int count = std::min(chunk, tc.val_size - start);
        std::vector<PreparedModel> prepared(static_cast<std::size_t>(count));
#pragma omp parallel for schedule(dynamic)
        for (long long i = 0; i < static_cast<long long>(count); ++i) {
            Rng rng = Rng::derive(tc.seed,
                                  {kTagValidation, static_cast<std::uint64_t>(start + i)});
            const int paths = static_cast<int>(rng.integer(tc.min_paths, tc.max_paths));
            const double snr = rng.uniform(tc.snr_min_db, tc.snr_max_db);
            const TrainSample s = make_train_sample(cfg, c, paths, snr, rng);
            prepared[static_cast<std::size_t>(i)] = prepare_model(s.model, c);
        }
        std::vector<double> losses(static_cast<std::size_t>(count), 0.0);
#pragma omp parallel for schedule(dynamic)
        for (long long i = 0; i < static_cast<long long>(count); ++i)
            losses[static_cast<std::size_t>(i)] =
                sample_loss(prepared[static_cast<std::size_t>(i)], params, 0);
        for (double v : losses) total += v;
    }
    return total / static_cast<double>(tc.val_size);
}

}  // namespace

void TrainConfig::validate(const SystemConfig& cfg) const {
    cfg.validate();
    if (epochs < 1 || batches_per_epoch < 1) throw std::invalid_argument("trainer: empty schedule");
    if (batch_size < 1) throw std::invalid_argument("trainer: batch size must be >= 1");
    if (!(learning_rate > 0.0)) throw std::invalid_argument("trainer: learning rate must be > 0");
    if (min_paths < 1 || max_paths < min_paths)
        throw std::invalid_argument("trainer: invalid path-count range");
    if (max_paths > max_path_count(cfg))
        throw std::invalid_argument("trainer: path range exceeds channel grid capacity");
    if (snr_max_db < snr_min_db) throw std::invalid_argument("trainer: invalid SNR range");
    if (val_size < 1) throw std::invalid_argument("trainer: validation size must be >= 1");
    if (!(plateau_factor > 0.0 && plateau_factor < 1.0))
        throw std::invalid_argument("trainer: plateau factor must lie in (0, 1)");
    if (plateau_patience < 1) throw std::invalid_argument("trainer: plateau patience must be >= 1");
}

int batch_path_count(const TrainConfig& tc, int epoch, int batch) {
    Rng rng = Rng::derive(tc.seed, {kTagBatchPaths, static_cast<std::uint64_t>(epoch),
                                    static_cast<std::uint64_t>(batch)});
    return static_cast<int>(rng.integer(tc.min_paths, tc.max_paths));
}

std::vector<TrainSample> generate_batch(const SystemConfig& cfg, const TrainConfig& tc,
                                        int epoch, int batch) {
    const Constellation c = make_constellation(cfg.mod_order);
    const int paths = batch_path_count(tc, epoch, batch);
    std::vector<TrainSample> out(static_cast<std::size_t>(tc.batch_size));
#pragma omp parallel for schedule(dynamic)
    for (long long i = 0; i < static_cast<long long>(tc.batch_size); ++i) {
        Rng rng = Rng::derive(tc.seed, {kTagSample, static_cast<std::uint64_t>(epoch),
                                        static_cast<std::uint64_t>(batch),
                                        static_cast<std::uint64_t>(i)});
        const double snr = rng.uniform(tc.snr_min_db, tc.snr_max_db);
        out[static_cast<std::size_t>(i)] = make_train_sample(cfg, c, paths, snr, rng);
    }
    return out;
}

std::vector<PreparedModel> prepare_batch(const std::vector<TrainSample>& batch,
                                         const Constellation& c) {
    std::vector<PreparedModel> out(batch.size());
#pragma omp parallel for schedule(dynamic)
    for (long long i = 0; i < static_cast<long long>(batch.size()); ++i)
        out[static_cast<std::size_t>(i)] =
            prepare_model(batch[static_cast<std::size_t>(i)].model, c);
    return out;
}

double loss(const std::vector<PreparedModel>& batch, const DetectorParams& params,
            int eval_layer) {
    if (batch.empty()) throw std::invalid_argument("loss: empty batch");
    return batch_loss_and_grad(batch, params, nullptr, eval_layer);
}

Vec grad(const std::vector<PreparedModel>& batch, const DetectorParams& params,
         int eval_layer) {
    if (batch.empty()) throw std::invalid_argument("grad: empty batch");
    Vec g;
    batch_loss_and_grad(batch, params, &g, eval_layer);
    return g;
}

TrainResult train(const SystemConfig& cfg, const TrainConfig& tc) {
    tc.validate(cfg);
    const Constellation c = make_constellation(cfg.mod_order);
    const int layers = cfg.detector_layers;
    const std::size_t g = static_cast<std::size_t>(3 * layers);

    DetectorParams params = DetectorParams::ones(layers);
    DetectorParams best = params;
    double best_val = std::numeric_limits<double>::infinity();

    // Adam state
    Vec m(g, 0.0), v(g, 0.0);
    const double beta1 = 0.9, beta2 = 0.999, adam_eps = 1e-8;
    double lr = tc.learning_rate;
    long step = 0;
    int stale_epochs = 0;

    std::vector<EpochRecord> log;
    log.reserve(static_cast<std::size_t>(tc.epochs));

    auto flat = [&](const DetectorParams& p, std::size_t k) -> double {
        const auto t = static_cast<std::size_t>(layers);
        if (k < t) return p.theta1[k];
        if (k < 2 * t) return p.theta2[k - t];
        return p.theta3[k - 2 * t];
    };
    auto set_flat = [&](DetectorParams& p, std::size_t k, double val) {
        const auto t = static_cast<std::size_t>(layers);
        if (k < t)
            p.theta1[k] = val;
        else if (k < 2 * t)
            p.theta2[k - t] = val;
        else
            p.theta3[k - 2 * t] = val;
    };

    Vec gradient(g);
    for (int epoch = 0; epoch < tc.epochs; ++epoch) {
        double train_loss = 0.0;
        for (int batch = 0; batch < tc.batches_per_epoch; ++batch) {
            const std::vector<PreparedModel> prepared =
                prepared_training_batch(cfg, tc, c, epoch, batch);
            train_loss += batch_loss_and_grad(prepared, params, &gradient, 0);

            ++step;
            const double c1 = 1.0 - std::pow(beta1, static_cast<double>(step));
            const double c2 = 1.0 - std::pow(beta2, static_cast<double>(step));
            for (std::size_t k = 0; k < g; ++k) {
                m[k] = beta1 * m[k] + (1.0 - beta1) * gradient[k];
                v[k] = beta2 * v[k] + (1.0 - beta2) * gradient[k] * gradient[k];
                const double update = lr * (m[k] / c1) / (std::sqrt(v[k] / c2) + adam_eps);
                double value = flat(params, k) - update;
                if (k >= static_cast<std::size_t>(layers) && value < 1e-6) value = 1e-6;
                set_flat(params, k, value);
            }
        }
        train_loss /= tc.batches_per_epoch;

        const double val = validation_loss(cfg, tc, c, params);
        if (!std::isfinite(val) || !std::isfinite(train_loss))
            throw TrainingError("training diverged: non-finite loss at epoch " +
                                    std::to_string(epoch),
                                log);

        if (val < best_val) {
            best_val = val;
            best = params;
            stale_epochs = 0;
        } else {
            ++stale_epochs;
            if (stale_epochs >= tc.plateau_patience) {
                lr = std::max(lr * tc.plateau_factor, tc.min_learning_rate);
                stale_epochs = 0;
            }
        }
        log.push_back({epoch, train_loss, val, lr, best_val});
    }
    return {best, log};
}

std::string config_digest(const SystemConfig& cfg, const TrainConfig& tc) {
    std::ostringstream ss;
    ss << cfg.subframes << '|' << cfg.subcarriers << '|' << cfg.subcarrier_spacing_hz << '|'
       << cfg.carrier_freq_hz << '|' << cfg.max_doppler_index << '|' << cfg.max_delay_index << '|'
       << cfg.mod_order << '|' << cfg.detector_layers << '|' << tc.epochs << '|'
       << tc.batches_per_epoch << '|' << tc.batch_size << '|' << tc.learning_rate << '|'
       << tc.min_paths << '|' << tc.max_paths << '|' << tc.snr_min_db << '|' << tc.snr_max_db
       << '|' << tc.val_size << '|' << tc.seed << '|' << tc.plateau_factor << '|'
       << tc.plateau_patience << '|' << tc.min_learning_rate;
    const std::string s = ss.str();
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void save_params(const DetectorParams& params, const std::string& path, std::uint64_t seed,
                 const std::string& digest) {
    params.validate();
    nlohmann::json j;
    j["T"] = params.layers();
    j["theta1"] = params.theta1;
    j["theta2"] = params.theta2;
    j["theta3"] = params.theta3;
    j["metadata"] = {{"seed", seed}, {"config_digest", digest}};
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_params: cannot open " + path);
    out << j.dump(2) << '\n';
}

DetectorParams load_params(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_params: cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("load_params: invalid JSON in " + path + ": " + e.what());
    }
    auto require = [&](const char* field) -> const nlohmann::json& {
        if (!j.contains(field))
            throw std::runtime_error(std::string("load_params: missing field '") + field + "'");
        return j.at(field);
    };
    if (!require("T").is_number_integer())
        throw std::runtime_error("load_params: field 'T' must be an integer");
    const int layers = j.at("T").get<int>();
    if (layers < 1) throw std::runtime_error("load_params: field 'T' must be >= 1");

    DetectorParams p;
    auto read_array = [&](const char* field, std::vector<double>& out) {
        const auto& arr = require(field);
        if (!arr.is_array())
            throw std::runtime_error(std::string("load_params: field '") + field +
                                     "' must be an array");
        out = arr.get<std::vector<double>>();
        if (out.size() != static_cast<std::size_t>(layers))
            throw std::runtime_error(std::string("load_params: field '") + field +
                                     "' length does not match T");
    };
    read_array("theta1", p.theta1);
    read_array("theta2", p.theta2);
    read_array("theta3", p.theta3);
    for (double v : p.theta2)
        if (!(v > 0.0)) throw std::runtime_error("load_params: field 'theta2' must be positive");
    for (double v : p.theta3)
        if (!(v > 0.0)) throw std::runtime_error("load_params: field 'theta3' must be positive");
    return p;
}

void write_train_log_csv(std::ostream& out, const std::vector<EpochRecord>& log) {
    out << "epoch,train_loss,val_loss,lr\n";
    char buf[128];
    for (const auto& r : log) {
        std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g\n", r.epoch, r.train_loss,
                      r.val_loss, r.learning_rate);
        out << buf;
    }
}

}  // namespace otfs
