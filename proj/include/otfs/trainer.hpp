#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "otfs/config.hpp"
#include "otfs/detector.hpp"
#include "otfs/frame.hpp"

namespace otfs {

struct TrainSample {
    RealModel model;
    int path_count = 0;
    double snr_db = 0.0;
};

struct TrainConfig {
    int epochs = 500;
    int batches_per_epoch = 40;
    int batch_size = 256;
    double learning_rate = 1e-4;
    int min_paths = 6;
    int max_paths = 14;
    double snr_min_db = 10.0;
    double snr_max_db = 20.0;
    int val_size = 5000;
    std::uint64_t seed = 1;
    double plateau_factor = 0.5;
    int plateau_patience = 10;
    double min_learning_rate = 1e-6;

    void validate(const SystemConfig& cfg) const;
};

// Path count shared by every sample of one batch, reproducible from
// (seed, epoch, batch).
int batch_path_count(const TrainConfig& tc, int epoch, int batch);

// batch_size fresh samples; per-sample SNR uniform in [snr_min_db, snr_max_db],
// channel/symbols/noise independent per sample.
std::vector<TrainSample> generate_batch(const SystemConfig& cfg, const TrainConfig& tc,
                                        int epoch, int batch);

std::vector<PreparedModel> prepare_batch(const std::vector<TrainSample>& batch,
                                         const Constellation& c);

// Mean over the batch of the per-sample sum of squared symbol-estimate errors
// at the final layer (the divisor is the batch size, not batch_size * KL).
double loss(const std::vector<PreparedModel>& batch, const DetectorParams& params,
            int eval_layer = 0);

// Exact gradient of loss() with respect to the 3T parameters.
Vec grad(const std::vector<PreparedModel>& batch, const DetectorParams& params,
         int eval_layer = 0);

struct EpochRecord {
    int epoch = 0;
    double train_loss = 0.0;
    double val_loss = 0.0;
    double learning_rate = 0.0;
    double best_val = 0.0;  // best validation loss seen so far
};

struct TrainResult {
    DetectorParams params;  // checkpoint with the best validation loss
    std::vector<EpochRecord> log;
};

class TrainingError : public std::runtime_error {
  public:
    TrainingError(const std::string& what, std::vector<EpochRecord> log_so_far)
        : std::runtime_error(what), log(std::move(log_so_far)) {}
    std::vector<EpochRecord> log;
};

// Adam from the all-ones start, with positivity projection on theta2/theta3
// and a reduce-on-plateau learning rate schedule driven by validation loss.
TrainResult train(const SystemConfig& cfg, const TrainConfig& tc);

// Parameter file (JSON): T, theta1[], theta2[], theta3[], metadata.
void save_params(const DetectorParams& params, const std::string& path,
                 std::uint64_t seed, const std::string& digest);
DetectorParams load_params(const std::string& path);

std::string config_digest(const SystemConfig& cfg, const TrainConfig& tc);

// Columns: epoch, train_loss, val_loss, lr.
void write_train_log_csv(std::ostream& out, const std::vector<EpochRecord>& log);

}  // namespace otfs
