#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "uep/analytics.hpp"
#include "uep/manifest.hpp"

namespace uep {

// One reproducible experiment: matrix spec, coding strategies, latency model,
// deadlines or received-packet counts, trial budget, master seed.
struct ExperimentConfig {
    // synthetic matrix spec
    int row_blocks = 3;
    int col_blocks = 3;
    int block_rows = 5;
    int block_cols = 5;
    int inner_dim = 100;
    int levels = 3;
    std::string merge = "three_class";  // or "pairwise"
    std::vector<int> row_levels = {1, 2, 3};
    std::vector<int> col_levels = {1, 2, 3};
    std::vector<double> level_variances = {10.0, 1.0, 0.1};
    // real inputs instead of synthetic generation (optional)
    std::string input_a;
    std::string input_b;

    std::vector<std::string> strategies = {"now", "ew", "mds"};  // simulated
    std::vector<std::string> analytic = {"now", "mds"};  // analytic curves; "now_lagged" allowed
    std::vector<double> gamma = {0.35, 0.35, 0.3};
    std::string window_sampling = "per_class";  // or "per_side"
    std::string field = "real";  // or "prime": exact decoding, recovery-share losses
    int workers = 40;
    double latency_rate = 0.25;
    double latency_time_scale = 1.0;
    std::vector<double> deadlines;
    std::vector<int> received_counts;
    long trials = 10000;
    std::uint64_t seed = 1;
    int threads = 1;
    std::string out_dir = ".";
    bool log_tasks = false;

    static ExperimentConfig from_json(const nlohmann::json& j);
    static ExperimentConfig load(const std::string& path);
    nlohmann::json to_json() const;
};

// Config resolved into ready-to-use profile and variance objects.
struct Experiment {
    ExperimentConfig config;
    ClassProfile profile;
    VarianceProfile variances;  // synthetic mode
    bool synthetic = true;
    // real-input mode
    BlockPartition a, b;
    Matrix c;
    double norm2 = 0.0;  // |C|_F^2 of the real inputs

    WindowDistribution window() const { return {config.gamma}; }
    WindowSampling sampling() const;
    LatencyModel latency() const { return {config.latency_rate, config.latency_time_scale}; }
};

Experiment resolve(const ExperimentConfig& config);

// One pipeline execution for one strategy; deadlines are evaluated on the same
// arrival sample. Trial `trial` is fully determined by (config.seed, strategy,
// trial).
struct TrialResult {
    std::vector<double> losses;           // per deadline
    std::vector<DecodeReport> reports;    // per deadline
};
TrialResult run_trial(const Experiment& experiment, Strategy strategy,
                      std::uint64_t trial);

// Full sweep: Monte Carlo curves for every configured strategy plus analytic
// reference curves, written as figure-ready CSV files with a manifest.
// Returns the list of files written.
std::vector<std::string> run_sweep(const ExperimentConfig& config);

}  // namespace uep
