#include <doctest.h>

#include <cmath>
#include <random>

#include "oracle.hpp"
#include "uep/analytics.hpp"
#include "uep/rng.hpp"

using namespace uep;

namespace {

ClassProfile va_profile() {
    return build_class_profile({1, 2, 3}, {1, 2, 3}, three_class_merge(3));
}

VarianceProfile va_variances() {
    return {{10.0, 1.0, 0.1}, {10.0, 1.0, 0.1}, 100, 5, 5};
}

const WindowDistribution kGamma{{0.35, 0.35, 0.3}};
const LatencyModel kLatency{0.25, 1.0};

}  // namespace

TEST_CASE("binomial tail reduction equals direct multinomial enumeration") {
    std::mt19937_64 rng = substream(17, 0);
    std::uniform_real_distribution<double> unit(0.05, 1.0);
    std::uniform_int_distribution<int> classes_dist(2, 4), count(1, 5);
    for (int trial = 0; trial < 25; ++trial) {
        const int classes = classes_dist(rng);
        std::vector<double> gamma(classes);
        double sum = 0;
        for (double& g : gamma) sum += (g = unit(rng));
        for (double& g : gamma) g /= sum;
        std::vector<int> k(classes);
        for (int& x : k) x = count(rng);
        for (int received : {0, 1, 5, 12}) {
            const auto pd = now_decoding_bound(gamma, k, received);
            for (int l = 0; l < classes; ++l) {
                const double brute =
                    oracle::multinomial_decode_bound(received, gamma, k, l);
                CHECK(std::abs(pd[l] - brute) <= 1e-12);
            }
        }
    }
}

TEST_CASE("binomial tail edge cases") {
    CHECK(binomial_tail(10, 0.3, 0) == 1.0);
    CHECK(binomial_tail(10, 0.3, 11) == 0.0);
    CHECK(binomial_tail(10, 0.0, 1) == 0.0);
    CHECK(binomial_tail(10, 1.0, 10) == 1.0);
    CHECK(binomial_tail(0, 0.5, 0) == 1.0);
}

TEST_CASE("decoding bound reproduces the reference values") {
    const std::vector<double> gamma{0.35, 0.35, 0.3};
    const std::vector<int> k{1, 2, 6};
    CHECK(std::abs(now_decoding_bound(gamma, k, 2)[0] - 0.5775) <= 1e-9);
    CHECK(std::abs(now_decoding_bound(gamma, k, 4)[1] - 0.43701875) <= 1e-9);
    CHECK(std::abs(now_decoding_bound(gamma, k, 6)[2] - 0.000729) <= 1e-9);
    CHECK(std::abs(now_decoding_bound(gamma, k, 40)[2] - 0.991381946688624) <= 1e-9);
}

TEST_CASE("decoding bound is nondecreasing and reaches one") {
    const std::vector<double> gamma{0.35, 0.35, 0.3};
    const std::vector<int> k{1, 2, 6};
    std::vector<double> prev(3, -1.0);
    for (int n = 0; n <= 60; ++n) {
        const auto pd = now_decoding_bound(gamma, k, n);
        for (int l = 0; l < 3; ++l) {
            CHECK(pd[l] >= prev[l] - 1e-15);
            prev[l] = pd[l];
        }
    }
    for (double v : now_decoding_bound(gamma, k, 400)) CHECK(v > 1.0 - 1e-6);
}

TEST_CASE("variance profile second moments match Monte Carlo block norms") {
    std::mt19937_64 rng = substream(17, 1);
    const VarianceProfile variances{{10.0, 0.5}, {2.0, 0.1}, 20, 3, 4};
    std::vector<double> mean(4, 0.0);
    const int trials = 10000;
    for (int i = 0; i < trials; ++i) {
        const BlockPartition a =
            synthetic_partition(Side::Left, 2, variances.block_rows, variances.inner_dim,
                                variances.row_var, rng);
        const BlockPartition b =
            synthetic_partition(Side::Right, 2, variances.block_cols, variances.inner_dim,
                                variances.col_var, rng);
        const Matrix c = a.elements * b.elements;
        for (int n = 0; n < 2; ++n)
            for (int p = 0; p < 2; ++p)
                mean[n * 2 + p] +=
                    c.block(n * 3, p * 4, 3, 4).squaredNorm() / trials;
    }
    for (int n = 0; n < 2; ++n)
        for (int p = 0; p < 2; ++p) {
            const double expected = variances.expected_block_norm2(n, p);
            CHECK(std::abs(mean[n * 2 + p] - expected) <= 0.02 * expected);
        }
}

TEST_CASE("conditional loss matches the published received-count values") {
    const ClassProfile profile = va_profile();
    const VarianceProfile variances = va_variances();
    CHECK(now_conditional_loss(kGamma, profile, variances, 0) == doctest::Approx(1.0));
    CHECK(std::abs(now_conditional_loss(kGamma, profile, variances, 1) -
                   0.715932148364581) <= 1e-9);
    CHECK(std::abs(now_conditional_loss(kGamma, profile, variances, 5) -
                   0.189767115088061) <= 1e-9);
    CHECK(std::abs(now_conditional_loss(kGamma, profile, variances, 9) -
                   0.0618593898136343) <= 1e-9);
}

TEST_CASE("expected loss composes the arrival pmf with the conditional loss") {
    const ClassProfile profile = va_profile();
    const VarianceProfile variances = va_variances();
    // independent composition: own pmf, own conditional values
    const auto pmf = arrival_pmf(kLatency, 40, 1.0);
    double expected = 0.0;
    for (int w = 0; w <= 40; ++w)
        expected += pmf[w] * now_conditional_loss(kGamma, profile, variances, w);
    CHECK(expected_loss_now(kGamma, profile, variances, kLatency, 40, 1.0) ==
          doctest::Approx(expected).epsilon(1e-12));
    CHECK(expected_loss_now(kGamma, profile, variances, kLatency, 40, 0.0) ==
          doctest::Approx(1.0));
}

TEST_CASE("the lag-one composition reproduces the published time curve") {
    const ClassProfile profile = va_profile();
    const VarianceProfile variances = va_variances();
    CHECK(std::abs(expected_loss_now(kGamma, profile, variances, kLatency, 40, 1.0, 1) -
                   0.112957558447755) <= 1e-9);
    CHECK(std::abs(expected_loss_now(kGamma, profile, variances, kLatency, 40, 2.0, 1) -
                   0.0267007560129081) <= 1e-9);
    CHECK(std::abs(expected_loss_now(kGamma, profile, variances, kLatency, 40, 0.2, 1) -
                   0.745408499508458) <= 1e-9);
}

TEST_CASE("expected loss is nonincreasing and reaches the all-workers floor") {
    const ClassProfile profile = va_profile();
    const VarianceProfile variances = va_variances();
    double prev = 1.0 + 1e-12;
    for (double t = 0.0; t <= 6.0; t += 0.25) {
        const double value =
            expected_loss_now(kGamma, profile, variances, kLatency, 40, t);
        CHECK(value <= prev + 1e-12);
        prev = value;
    }
    // with W workers the deadline-free limit is the W-packet conditional loss
    const double floor = now_conditional_loss(kGamma, profile, variances, 40);
    CHECK(expected_loss_now(kGamma, profile, variances, kLatency, 40, 200.0) ==
          doctest::Approx(floor).epsilon(1e-9));
    CHECK(floor < 1e-3);
}

TEST_CASE("threshold-code loss matches the published values") {
    CHECK(expected_loss_mds(9, kLatency, 40, 0.0) == doctest::Approx(1.0));
    CHECK(std::abs(expected_loss_mds(9, kLatency, 40, 1.0) - 0.4615) <= 1e-3);
    CHECK(std::abs(expected_loss_mds(9, kLatency, 40, 2.0) - 0.00762) <= 1e-3);
    CHECK(mds_conditional_loss(9, 8) == 1.0);
    CHECK(mds_conditional_loss(9, 9) == 0.0);
}

TEST_CASE("degenerate single-window config: Monte Carlo matches the bound") {
    // one level, class spans everything: the bound is exact in the real field
    const ClassProfile profile = build_class_profile({1, 1}, {1, 1}, three_class_merge(1));
    const VarianceProfile variances{{2.0, 2.0}, {1.0, 1.0}, 8, 2, 2};
    const WindowDistribution gamma{{1.0}};
    const LatencyModel latency{0.5, 1.0};
    PipelineMcOptions options;
    options.strategy = Strategy::Ew;
    options.trials = 4000;
    options.seed = 123;
    options.threads = 2;
    const std::vector<double> deadlines{1.0, 2.0};
    const auto mc =
        pipeline_loss_mc(gamma, profile, variances, latency, 10, deadlines, options);
    for (std::size_t i = 0; i < deadlines.size(); ++i) {
        const double analytic =
            expected_loss_now(gamma, profile, variances, latency, 10, deadlines[i]);
        CHECK(std::abs(mc[i].mean - analytic) <= std::max(3 * mc[i].ci_half, 0.01));
    }
}

TEST_CASE("per-block coverage oracle matches the window-coded Monte Carlo") {
    // in the one-block-per-level setup every window pair is a single block, so
    // the exact expected loss is a coupon-coverage expression:
    //   E[loss] = sum_np w_np * (1 - q_np F)^W
    const ClassProfile profile = va_profile();
    const VarianceProfile variances = va_variances();
    const int workers = 40;
    const double t = 1.0;
    const double f = completion_cdf(kLatency, t);
    const double total = variances.total();
    double expected = 0.0;
    for (int n = 0; n < 3; ++n) {
        for (int p = 0; p < 3; ++p) {
            const int cls = profile.class_of_block(n, p);
            const double pair_prob =
                kGamma.gamma[cls - 1] / profile.class_count[cls - 1];
            expected += variances.expected_block_norm2(n, p) *
                        std::pow(1.0 - pair_prob * f, workers) / total;
        }
    }
    PipelineMcOptions options;
    options.strategy = Strategy::Now;
    options.trials = 20000;
    options.seed = 321;
    options.threads = 4;
    const auto mc =
        pipeline_loss_mc(kGamma, profile, variances, kLatency, workers, {t}, options);
    // the Monte Carlo scores per-trial realized-norm ratios, so allow a small
    // ratio-vs-expectation gap on top of the statistical error
    CHECK(std::abs(mc[0].mean - expected) <= 3 * mc[0].ci_half + 0.02 * expected);
}

TEST_CASE("Monte Carlo results do not depend on the thread count") {
    const ClassProfile profile = va_profile();
    const VarianceProfile variances = va_variances();
    PipelineMcOptions a, b;
    a.strategy = b.strategy = Strategy::Ew;
    a.trials = b.trials = 500;
    a.seed = b.seed = 77;
    a.threads = 1;
    b.threads = 7;
    const auto r1 =
        pipeline_loss_mc(kGamma, profile, variances, kLatency, 40, {0.5, 1.0}, a);
    const auto r2 =
        pipeline_loss_mc(kGamma, profile, variances, kLatency, 40, {0.5, 1.0}, b);
    for (std::size_t i = 0; i < r1.size(); ++i) {
        CHECK(r1[i].mean == r2[i].mean);
        CHECK(r1[i].ci_half == r2[i].ci_half);
    }
}

TEST_CASE("prime-field runs score the expected-norm share of lost blocks") {
    const ClassProfile profile = va_profile();
    const VarianceProfile variances = va_variances();
    PipelineMcOptions options;
    options.trials = 400;
    options.seed = 31;
    options.threads = 2;

    options.strategy = Strategy::Uncoded;
    const auto uncoded = prime_field_loss_mc(
        kGamma, profile, variances, kLatency, 9,
        {0.0, std::numeric_limits<double>::infinity()}, options);
    CHECK(uncoded[0].mean == doctest::Approx(1.0));
    CHECK(uncoded[1].mean == doctest::Approx(0.0));

    // prime-field window coding tracks the decoding bound composition closely
    options.strategy = Strategy::Now;
    options.trials = 4000;
    const auto now = prime_field_loss_mc(kGamma, profile, variances, kLatency, 40,
                                         {1.0}, options);
    CHECK(now[0].mean > 0.0);
    CHECK(now[0].mean < 0.3);
}

TEST_CASE("received-count Monte Carlo hits the trivial endpoints") {
    const ClassProfile profile = va_profile();
    const VarianceProfile variances = va_variances();
    PipelineMcOptions options;
    options.strategy = Strategy::Ew;
    options.trials = 200;
    options.seed = 9;
    const auto mc = pipeline_loss_vs_received_mc(kGamma, profile, variances, 40,
                                                 {0, 1}, options);
    CHECK(mc[0].mean == doctest::Approx(1.0));
    CHECK(mc[0].ci_half == doctest::Approx(0.0));
    CHECK(mc[1].mean < 1.0);
}
