#include "uep/simrun.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "uep/csvio.hpp"
#include "uep/rng.hpp"

namespace uep {

namespace {

MergeTable merge_from_name(const std::string& name, int levels) {
    if (name == "three_class") return three_class_merge(levels);
    if (name == "pairwise") return pairwise_merge(levels);
    throw std::invalid_argument("unknown merge '" + name +
                                "' (valid: three_class, pairwise)");
}

Matrix read_matrix_any(const std::string& path) {
    if (path.size() > 4 && path.substr(path.size() - 4) == ".bin")
        return read_matrix_binary(path);
    return read_matrix_csv(path);
}

std::uint64_t strategy_stream(std::uint64_t master, Strategy s) {
    return derive_seed(master, 100 + static_cast<std::uint64_t>(s));
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
    ExperimentConfig c;
    const auto m = j.value("matrix", nlohmann::json::object());
    c.row_blocks = m.value("row_blocks", c.row_blocks);
    c.col_blocks = m.value("col_blocks", c.col_blocks);
    c.block_rows = m.value("block_rows", c.block_rows);
    c.block_cols = m.value("block_cols", c.block_cols);
    c.inner_dim = m.value("inner_dim", c.inner_dim);
    c.levels = m.value("levels", c.levels);
    c.merge = m.value("merge", c.merge);
    c.row_levels = m.value("row_levels", c.row_levels);
    c.col_levels = m.value("col_levels", c.col_levels);
    c.level_variances = m.value("level_variances", c.level_variances);
    c.input_a = m.value("input_a", c.input_a);
    c.input_b = m.value("input_b", c.input_b);

    c.strategies = j.value("strategies", c.strategies);
    c.analytic = j.value("analytic", c.analytic);
    c.gamma = j.value("gamma", c.gamma);
    c.window_sampling = j.value("window_sampling", c.window_sampling);
    c.field = j.value("field", c.field);
    c.workers = j.value("workers", c.workers);
    const auto lat = j.value("latency", nlohmann::json::object());
    c.latency_rate = lat.value("rate", c.latency_rate);
    c.latency_time_scale = lat.value("time_scale", c.latency_time_scale);
    c.deadlines = j.value("deadlines", c.deadlines);
    c.received_counts = j.value("received_counts", c.received_counts);
    c.trials = j.value("trials", c.trials);
    c.seed = j.value("seed", c.seed);
    c.threads = j.value("threads", c.threads);
    c.out_dir = j.value("out_dir", c.out_dir);
    c.log_tasks = j.value("log_tasks", c.log_tasks);
    return c;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("bad config " + path + ": " + e.what());
    }
    return from_json(j);
}

nlohmann::json ExperimentConfig::to_json() const {
    nlohmann::json j;
    j["matrix"] = {{"row_blocks", row_blocks},     {"col_blocks", col_blocks},
                   {"block_rows", block_rows},     {"block_cols", block_cols},
                   {"inner_dim", inner_dim},       {"levels", levels},
                   {"merge", merge},               {"row_levels", row_levels},
                   {"col_levels", col_levels},     {"level_variances", level_variances}};
    if (!input_a.empty()) j["matrix"]["input_a"] = input_a;
    if (!input_b.empty()) j["matrix"]["input_b"] = input_b;
    j["strategies"] = strategies;
    j["analytic"] = analytic;
    j["gamma"] = gamma;
    j["window_sampling"] = window_sampling;
    j["field"] = field;
    j["workers"] = workers;
    j["latency"] = {{"rate", latency_rate}, {"time_scale", latency_time_scale}};
    j["deadlines"] = deadlines;
    j["received_counts"] = received_counts;
    j["trials"] = trials;
    j["seed"] = seed;
    j["threads"] = threads;
    j["out_dir"] = out_dir;
    j["log_tasks"] = log_tasks;
    return j;
}

WindowSampling Experiment::sampling() const {
    if (config.window_sampling == "per_class") return WindowSampling::PerClass;
    if (config.window_sampling == "per_side") return WindowSampling::PerSide;
    throw std::invalid_argument("unknown window_sampling '" + config.window_sampling +
                                "' (valid: per_class, per_side)");
}

Experiment resolve(const ExperimentConfig& config) {
    Experiment e;
    e.config = config;
    if (!config.input_a.empty() || !config.input_b.empty()) {
        if (config.input_a.empty() || config.input_b.empty())
            throw std::invalid_argument("need both input_a and input_b");
        e.synthetic = false;
        e.a = partition(read_matrix_any(config.input_a), Side::Left, config.row_blocks,
                        config.block_rows);
        e.b = partition(read_matrix_any(config.input_b), Side::Right, config.col_blocks,
                        config.block_cols);
        if (e.a.elements.cols() != e.b.elements.rows())
            throw std::invalid_argument("input matrices have incompatible inner dimensions");
        const auto row_levels = classify_by_norm(e.a, config.levels, ClassifyMode::Quantile);
        const auto col_levels = classify_by_norm(e.b, config.levels, ClassifyMode::Quantile);
        e.profile = build_class_profile(row_levels, col_levels,
                                        merge_from_name(config.merge, config.levels));
        e.c = e.a.elements * e.b.elements;
        e.norm2 = e.c.squaredNorm();
        return e;
    }

    if (static_cast<int>(config.row_levels.size()) != config.row_blocks ||
        static_cast<int>(config.col_levels.size()) != config.col_blocks)
        throw std::invalid_argument("row_levels/col_levels must list one level per block");
    e.profile = build_class_profile(config.row_levels, config.col_levels,
                                    merge_from_name(config.merge, config.levels));
    e.variances.inner_dim = config.inner_dim;
    e.variances.block_rows = config.block_rows;
    e.variances.block_cols = config.block_cols;
    for (int s : config.row_levels) {
        if (s < 1 || s > static_cast<int>(config.level_variances.size()))
            throw std::invalid_argument("row level without a variance entry");
        e.variances.row_var.push_back(config.level_variances[s - 1]);
    }
    for (int s : config.col_levels) {
        if (s < 1 || s > static_cast<int>(config.level_variances.size()))
            throw std::invalid_argument("column level without a variance entry");
        e.variances.col_var.push_back(config.level_variances[s - 1]);
    }
    return e;
}

namespace {

// Per-trial pipeline on fixed input matrices.
TrialResult fixed_input_trial(const Experiment& e, Strategy strategy,
                              std::uint64_t trial) {
    const ExperimentConfig& cfg = e.config;
    std::mt19937_64 rng = substream(strategy_stream(cfg.seed, strategy), trial);
    const WindowDistribution window = e.window();
    const int n = e.profile.num_row_blocks();
    const int p = e.profile.num_col_blocks();

    std::vector<CodedTask> tasks;
    std::vector<Matrix> products;
    for (int w = 0; w < cfg.workers; ++w) {
        CodedTask task;
        switch (strategy) {
            case Strategy::Now:
                task = encode_now(e.profile, sample_window(window, e.profile, rng, e.sampling()),
                                  FieldKind::Real, rng);
                break;
            case Strategy::Ew:
                task = encode_ew(e.profile, sample_window(window, e.profile, rng, e.sampling()),
                                 FieldKind::Real, rng);
                break;
            case Strategy::Mds:
                task = encode_mds(n, p, FieldKind::Real, rng);
                break;
            case Strategy::Uncoded:
                if (cfg.workers != n * p)
                    throw std::invalid_argument("uncoded needs exactly N*P workers");
                task = encode_uncoded(n, p, w);
                break;
            case Strategy::BlockRep:
                if (cfg.workers % (n * p) != 0)
                    throw std::invalid_argument("block repetition needs workers divisible by N*P");
                task = encode_block_rep(n, p, w);
                break;
        }
        task.worker = w;
        tasks.push_back(std::move(task));
        products.push_back(coded_product(e.a, e.b, tasks.back()));
    }
    const std::vector<double> arrivals = sample_arrivals(e.latency(), cfg.workers, rng);

    TrialResult result;
    for (double deadline : cfg.deadlines) {
        ReceivedSet received;
        received.row_blocks = n;
        received.col_blocks = p;
        received.block_rows = e.a.block_span;
        received.block_cols = e.b.block_span;
        received.deadline = deadline;
        for (int w = 0; w < cfg.workers; ++w)
            if (arrivals[w] < deadline)
                received.products.push_back({coefficient_row(tasks[w]), products[w], arrivals[w]});
        DecodeReport report = decode(received);
        result.losses.push_back(squared_loss(e.c, report.estimate) / e.norm2);
        result.reports.push_back(std::move(report));
    }
    return result;
}

}  // namespace

TrialResult run_trial(const Experiment& e, Strategy strategy, std::uint64_t trial) {
    if (!e.synthetic) return fixed_input_trial(e, strategy, trial);
    PipelineMcOptions options;
    options.strategy = strategy;
    options.sampling = e.sampling();
    options.seed = strategy_stream(e.config.seed, strategy);
    options.trials = 1;
    PipelineTrial t =
        pipeline_trial(e.window(), e.profile, e.variances, e.latency(), e.config.workers,
                       e.config.deadlines, options, trial);
    return {std::move(t.losses), std::move(t.reports)};
}

namespace {

void write_task_log(const Experiment& e, const std::string& path) {
    const ExperimentConfig& cfg = e.config;
    CsvWriter csv(path, "uepmm.tasks v1",
                  {"worker", "strategy", "class", "row_window", "col_window",
                   "alpha_support", "beta_support"});
    for (const std::string& name : cfg.strategies) {
        const Strategy strategy = strategy_from_name(name);
        std::mt19937_64 rng = substream(strategy_stream(cfg.seed, strategy), 0);
        const int n = e.profile.num_row_blocks();
        const int p = e.profile.num_col_blocks();
        for (int w = 0; w < cfg.workers; ++w) {
            CodedTask task;
            try {
                switch (strategy) {
                    case Strategy::Now:
                        task = encode_now(e.profile,
                                          sample_window(e.window(), e.profile, rng, e.sampling()),
                                          FieldKind::Real, rng);
                        break;
                    case Strategy::Ew:
                        task = encode_ew(e.profile,
                                         sample_window(e.window(), e.profile, rng, e.sampling()),
                                         FieldKind::Real, rng);
                        break;
                    case Strategy::Mds:
                        task = encode_mds(n, p, FieldKind::Real, rng);
                        break;
                    case Strategy::Uncoded:
                        task = encode_uncoded(n, p, w);
                        break;
                    case Strategy::BlockRep:
                        task = encode_block_rep(n, p, w);
                        break;
                }
            } catch (const std::exception&) {
                continue;
            }
            auto support = [](const std::vector<double>& coeffs) {
                std::string s;
                for (std::size_t i = 0; i < coeffs.size(); ++i)
                    if (coeffs[i] != 0.0) s += (s.empty() ? "" : " ") + std::to_string(i);
                return s;
            };
            csv.begin_row();
            csv.field(w);
            csv.field(std::string(strategy_name(strategy)));
            csv.field(task.cls);
            csv.field(task.row_window);
            csv.field(task.col_window);
            csv.field(support(task.alpha));
            csv.field(support(task.beta));
            csv.end_row();
        }
    }
}

void write_recovery_log(const Experiment& e, const std::string& path) {
    const ExperimentConfig& cfg = e.config;
    CsvWriter csv(path, "uepmm.recovery v1",
                  {"strategy", "deadline", "block", "recovered"});
    for (const std::string& name : cfg.strategies) {
        const Strategy strategy = strategy_from_name(name);
        TrialResult trial;
        try {
            trial = run_trial(e, strategy, 0);
        } catch (const std::exception&) {
            continue;
        }
        for (std::size_t d = 0; d < cfg.deadlines.size(); ++d) {
            const auto& mask = trial.reports[d].recovered;
            for (std::size_t blockv = 0; blockv < mask.size(); ++blockv) {
                csv.begin_row();
                csv.field(std::string(strategy_name(strategy)));
                csv.field(cfg.deadlines[d]);
                csv.field(static_cast<long>(blockv));
                csv.field(static_cast<long>(mask[blockv]));
                csv.end_row();
            }
        }
    }
}

std::vector<McEstimate> fixed_input_mc(const Experiment& e, Strategy strategy) {
    std::vector<std::vector<double>> losses(e.config.deadlines.size(),
                                            std::vector<double>(e.config.trials, 0.0));
    for (long trial = 0; trial < e.config.trials; ++trial) {
        const TrialResult r = fixed_input_trial(e, strategy, trial);
        for (std::size_t d = 0; d < r.losses.size(); ++d) losses[d][trial] = r.losses[d];
    }
    std::vector<McEstimate> out(losses.size());
    for (std::size_t d = 0; d < losses.size(); ++d) {
        double mean = 0;
        for (double x : losses[d]) mean += x;
        mean /= e.config.trials;
        double var = 0;
        for (double x : losses[d]) var += (x - mean) * (x - mean);
        var = e.config.trials > 1 ? var / (e.config.trials - 1) : 0.0;
        out[d] = {mean, e.config.trials > 1 ? 1.96 * std::sqrt(var / e.config.trials) : 0.0,
                  e.config.trials};
    }
    return out;
}

}  // namespace

std::vector<std::string> run_sweep(const ExperimentConfig& config) {
    const auto start = std::chrono::steady_clock::now();
    RunManifest manifest;
    manifest.command = "sim";
    manifest.config = config.to_json();
    manifest.seed = config.seed;
    std::filesystem::create_directories(config.out_dir);
    const std::string manifest_path = config.out_dir + "/manifest.json";

    try {
        const Experiment e = resolve(config);
        const int total_blocks = e.profile.num_row_blocks() * e.profile.num_col_blocks();

        if (!config.deadlines.empty()) {
            const std::string path = config.out_dir + "/loss_vs_time.csv";
            CsvWriter csv(path, "uepmm.loss_vs_time v1",
                          {"t", "strategy", "kind", "value", "ci", "trials"});
            for (const std::string& name : config.strategies) {
                const Strategy strategy = strategy_from_name(name);
                std::vector<McEstimate> estimates;
                if (e.synthetic) {
                    PipelineMcOptions options;
                    options.strategy = strategy;
                    options.sampling = e.sampling();
                    options.trials = config.trials;
                    options.seed = strategy_stream(config.seed, strategy);
                    options.threads = config.threads;
                    if (config.field == "prime")
                        estimates = prime_field_loss_mc(e.window(), e.profile, e.variances,
                                                        e.latency(), config.workers,
                                                        config.deadlines, options);
                    else if (config.field == "real")
                        estimates = pipeline_loss_mc(e.window(), e.profile, e.variances,
                                                     e.latency(), config.workers,
                                                     config.deadlines, options);
                    else
                        throw std::invalid_argument("unknown field '" + config.field +
                                                    "' (valid: real, prime)");
                } else {
                    if (config.field != "real")
                        throw std::invalid_argument("input matrices need field = real");
                    estimates = fixed_input_mc(e, strategy);
                }
                for (std::size_t d = 0; d < config.deadlines.size(); ++d) {
                    csv.begin_row();
                    csv.field(config.deadlines[d]);
                    csv.field(name);
                    csv.field(std::string("mc"));
                    csv.field(estimates[d].mean);
                    csv.field(estimates[d].ci_half);
                    csv.field(estimates[d].trials);
                    csv.end_row();
                }
            }
            for (const std::string& name : config.analytic) {
                if (!e.synthetic)
                    throw std::invalid_argument("analytic curves need a synthetic matrix spec");
                for (double t : config.deadlines) {
                    double value = 0.0;
                    if (name == "now")
                        value = expected_loss_now(e.window(), e.profile, e.variances,
                                                  e.latency(), config.workers, t, 0);
                    else if (name == "now_lagged")
                        value = expected_loss_now(e.window(), e.profile, e.variances,
                                                  e.latency(), config.workers, t, 1);
                    else if (name == "mds")
                        value = expected_loss_mds(total_blocks, e.latency(), config.workers, t);
                    else
                        throw std::invalid_argument("unknown analytic curve '" + name +
                                                    "' (valid: now, now_lagged, mds)");
                    csv.begin_row();
                    csv.field(t);
                    csv.field(name);
                    csv.field(std::string("analytic"));
                    csv.field(value);
                    csv.field(0.0);
                    csv.field(0L);
                    csv.end_row();
                }
            }
            manifest.outputs.push_back(path);
        }

        if (!config.received_counts.empty()) {
            if (!e.synthetic)
                throw std::invalid_argument("received-count sweeps need a synthetic matrix spec");
            if (config.field != "real")
                throw std::invalid_argument("received-count sweeps support field = real only");
            const std::string path = config.out_dir + "/loss_vs_received.csv";
            CsvWriter csv(path, "uepmm.loss_vs_received v1",
                          {"received", "strategy", "kind", "value", "ci", "trials"});
            for (const std::string& name : config.strategies) {
                const Strategy strategy = strategy_from_name(name);
                PipelineMcOptions options;
                options.strategy = strategy;
                options.sampling = e.sampling();
                options.trials = config.trials;
                options.seed = strategy_stream(config.seed, strategy);
                options.threads = config.threads;
                const auto estimates = pipeline_loss_vs_received_mc(
                    e.window(), e.profile, e.variances, config.workers,
                    config.received_counts, options);
                for (std::size_t d = 0; d < config.received_counts.size(); ++d) {
                    csv.begin_row();
                    csv.field(config.received_counts[d]);
                    csv.field(name);
                    csv.field(std::string("mc"));
                    csv.field(estimates[d].mean);
                    csv.field(estimates[d].ci_half);
                    csv.field(estimates[d].trials);
                    csv.end_row();
                }
            }
            for (const std::string& name : config.analytic) {
                for (int count : config.received_counts) {
                    double value = 0.0;
                    if (name == "now" || name == "now_lagged")
                        value = now_conditional_loss(e.window(), e.profile, e.variances, count);
                    else if (name == "mds")
                        value = mds_conditional_loss(total_blocks, count);
                    else
                        throw std::invalid_argument("unknown analytic curve '" + name + "'");
                    csv.begin_row();
                    csv.field(count);
                    csv.field(name);
                    csv.field(std::string("analytic"));
                    csv.field(value);
                    csv.field(0.0);
                    csv.field(0L);
                    csv.end_row();
                }
            }
            manifest.outputs.push_back(path);
        }

        if (config.log_tasks) {
            const std::string tasks_path = config.out_dir + "/tasks.csv";
            write_task_log(e, tasks_path);
            manifest.outputs.push_back(tasks_path);
            if (!config.deadlines.empty()) {
                const std::string recovery_path = config.out_dir + "/recovery.csv";
                write_recovery_log(e, recovery_path);
                manifest.outputs.push_back(recovery_path);
            }
        }
    } catch (const std::exception& ex) {
        manifest.error = ex.what();
        manifest.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        manifest.write(manifest_path);
        throw;
    }

    manifest.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    manifest.outputs.push_back(manifest_path);
    manifest.write(manifest_path);
    return manifest.outputs;
}

}  // namespace uep
