#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "uep/csvio.hpp"
#include "uep/simrun.hpp"

using namespace uep;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ExperimentConfig small_config(const std::string& out_dir) {
    ExperimentConfig cfg;
    cfg.block_rows = 2;
    cfg.block_cols = 2;
    cfg.inner_dim = 10;
    cfg.deadlines = {0.5, 1.0, 2.0};
    cfg.trials = 50;
    cfg.seed = 4242;
    cfg.threads = 2;
    cfg.out_dir = out_dir;
    return cfg;
}

}  // namespace

TEST_CASE("config json round trip preserves every field") {
    ExperimentConfig cfg = small_config("somewhere");
    cfg.strategies = {"now", "blockrep"};
    cfg.analytic = {"now_lagged"};
    cfg.window_sampling = "per_side";
    cfg.received_counts = {0, 3, 9};
    cfg.log_tasks = true;
    const ExperimentConfig back = ExperimentConfig::from_json(cfg.to_json());
    CHECK(back.to_json() == cfg.to_json());
}

TEST_CASE("a zero deadline loses everything for every strategy") {
    ExperimentConfig cfg = small_config(".");
    cfg.deadlines = {0.0};
    cfg.workers = 9;
    const Experiment e = resolve(cfg);
    for (const char* name : {"now", "ew", "mds", "uncoded", "blockrep"}) {
        const TrialResult r = run_trial(e, strategy_from_name(name), 0);
        CHECK(r.losses[0] == doctest::Approx(1.0));
    }
}

TEST_CASE("uncoded with an infinite deadline recovers everything") {
    ExperimentConfig cfg = small_config(".");
    cfg.deadlines = {std::numeric_limits<double>::infinity()};
    cfg.workers = 9;
    const Experiment e = resolve(cfg);
    const TrialResult r = run_trial(e, Strategy::Uncoded, 3);
    CHECK(r.losses[0] <= 1e-20);
    for (std::uint8_t rec : r.reports[0].recovered) CHECK(rec == 1);
}

TEST_CASE("within a trial later deadlines never lose more") {
    ExperimentConfig cfg = small_config(".");
    cfg.deadlines = {0.25, 0.5, 1.0, 2.0, 4.0};
    const Experiment e = resolve(cfg);
    for (const char* name : {"now", "ew", "mds"}) {
        for (std::uint64_t trial = 0; trial < 20; ++trial) {
            const TrialResult r = run_trial(e, strategy_from_name(name), trial);
            for (std::size_t d = 1; d < r.losses.size(); ++d)
                CHECK(r.losses[d] <= r.losses[d - 1] + 1e-12);
        }
    }
}

TEST_CASE("worker-count preconditions are enforced") {
    ExperimentConfig cfg = small_config(".");
    cfg.workers = 10;  // not 9, not a multiple of 9
    const Experiment e = resolve(cfg);
    CHECK_THROWS_AS(run_trial(e, Strategy::Uncoded, 0), std::invalid_argument);
    CHECK_THROWS_AS(run_trial(e, Strategy::BlockRep, 0), std::invalid_argument);
}

TEST_CASE("empirical threshold-code losses match the analytic curve") {
    ExperimentConfig cfg = small_config(".");
    cfg.trials = 3000;
    cfg.deadlines = {1.0, 2.0};
    const Experiment e = resolve(cfg);
    PipelineMcOptions options;
    options.strategy = Strategy::Mds;
    options.trials = cfg.trials;
    options.seed = 5;
    options.threads = 4;
    const auto mc = pipeline_loss_mc(e.window(), e.profile, e.variances, e.latency(),
                                     cfg.workers, cfg.deadlines, options);
    for (std::size_t d = 0; d < cfg.deadlines.size(); ++d) {
        const double analytic = expected_loss_mds(9, e.latency(), cfg.workers,
                                                  cfg.deadlines[d]);
        CHECK(std::abs(mc[d].mean - analytic) <= std::max(3 * mc[d].ci_half, 0.005));
    }
}

TEST_CASE("sweeps are byte-reproducible and list their outputs") {
    const std::string dir = (std::filesystem::temp_directory_path() / "uepmm_sweep").string();
    std::filesystem::remove_all(dir);
    ExperimentConfig cfg = small_config(dir);
    cfg.trials = 30;
    cfg.strategies = {"now", "ew"};
    cfg.analytic = {"now", "mds"};
    cfg.received_counts = {0, 2, 5};
    cfg.log_tasks = true;

    const auto outputs = run_sweep(cfg);
    CHECK(std::filesystem::exists(dir + "/loss_vs_time.csv"));
    CHECK(std::filesystem::exists(dir + "/loss_vs_received.csv"));
    CHECK(std::filesystem::exists(dir + "/tasks.csv"));
    CHECK(std::filesystem::exists(dir + "/manifest.json"));
    for (const std::string& f : outputs) CHECK(std::filesystem::exists(f));

    const std::string first = slurp(dir + "/loss_vs_time.csv");
    cfg.threads = 5;  // thread count must not change the bytes
    run_sweep(cfg);
    CHECK(slurp(dir + "/loss_vs_time.csv") == first);
}

TEST_CASE("unknown strategy names fail with the valid list") {
    ExperimentConfig cfg = small_config(".");
    cfg.strategies = {"raptor"};
    cfg.deadlines = {1.0};
    cfg.out_dir = (std::filesystem::temp_directory_path() / "uepmm_badsweep").string();
    try {
        run_sweep(cfg);
        FAIL("expected an invalid_argument");
    } catch (const std::invalid_argument& ex) {
        const std::string message = ex.what();
        CHECK(message.find("raptor") != std::string::npos);
        CHECK(message.find("uncoded") != std::string::npos);
    }
    // a manifest with the error is still written
    CHECK(std::filesystem::exists(cfg.out_dir + "/manifest.json"));
    CHECK(slurp(cfg.out_dir + "/manifest.json").find("raptor") != std::string::npos);
}

TEST_CASE("real input matrices run through the fixed-matrix path") {
    namespace fs = std::filesystem;
    const std::string dir = (fs::temp_directory_path() / "uepmm_real").string();
    fs::create_directories(dir);
    std::mt19937_64 rng(1);
    std::normal_distribution<double> unit(0.0, 1.0);
    Matrix a(4, 6), b(6, 4);
    for (long r = 0; r < 4; ++r)
        for (long c = 0; c < 6; ++c) a(r, c) = unit(rng) * (r < 2 ? 3.0 : 0.3);
    for (long r = 0; r < 6; ++r)
        for (long c = 0; c < 4; ++c) b(r, c) = unit(rng);
    write_matrix_csv(a, dir + "/a.csv");
    write_matrix_binary(b, dir + "/b.bin");
    CHECK(read_matrix_csv(dir + "/a.csv").isApprox(a));
    CHECK(read_matrix_binary(dir + "/b.bin") == b);

    ExperimentConfig cfg;
    cfg.input_a = dir + "/a.csv";
    cfg.input_b = dir + "/b.bin";
    cfg.row_blocks = 2;
    cfg.col_blocks = 2;
    cfg.block_rows = 2;
    cfg.block_cols = 2;
    cfg.levels = 2;
    cfg.workers = 4;
    cfg.deadlines = {std::numeric_limits<double>::infinity()};
    const Experiment e = resolve(cfg);
    CHECK_FALSE(e.synthetic);
    const TrialResult r = run_trial(e, Strategy::Uncoded, 0);
    CHECK(r.losses[0] <= 1e-16);
}
