#include <doctest.h>

#include <random>

#include "uep/analytics.hpp"
#include "uep/coding.hpp"
#include "uep/decode.hpp"
#include "uep/rng.hpp"

using namespace uep;

namespace {

const ClassProfile& va_profile() {
    static const ClassProfile profile =
        build_class_profile({1, 2, 3}, {1, 2, 3}, three_class_merge(3));
    return profile;
}

int support_size(const std::vector<double>& coeffs) {
    int n = 0;
    for (double c : coeffs)
        if (c != 0.0) ++n;
    return n;
}

}  // namespace

TEST_CASE("a degenerate window distribution always picks class 1") {
    std::mt19937_64 rng = substream(3, 0);
    const WindowDistribution dist{{1.0, 0.0, 0.0}};
    for (int i = 0; i < 100; ++i) {
        const WindowChoice choice = sample_window(dist, va_profile(), rng);
        CHECK(choice.cls == 1);
        CHECK(choice.row_level == 1);
        CHECK(choice.col_level == 1);
    }
}

TEST_CASE("window frequencies track the distribution") {
    std::mt19937_64 rng = substream(3, 1);
    const WindowDistribution dist{{0.35, 0.35, 0.3}};
    const int draws = 1000000;
    std::vector<long> count(3, 0);
    for (int i = 0; i < draws; ++i)
        ++count[sample_window(dist, va_profile(), rng).cls - 1];
    for (int l = 0; l < 3; ++l)
        CHECK(std::abs(double(count[l]) / draws - dist.gamma[l]) < 0.003);
}

TEST_CASE("composite classes pick constituent pairs by sub-product weight") {
    std::mt19937_64 rng = substream(3, 2);
    const WindowDistribution dist{{0.0, 1.0, 0.0}};
    const int draws = 1000000;
    long high_medium = 0;
    for (int i = 0; i < draws; ++i) {
        const WindowChoice choice = sample_window(dist, va_profile(), rng);
        CHECK(choice.cls == 2);
        if (choice.row_level == 1 && choice.col_level == 2) ++high_medium;
    }
    CHECK(std::abs(double(high_medium) / draws - 0.5) < 0.005);
}

TEST_CASE("non-overlapping window supports sit exactly on the chosen level") {
    std::mt19937_64 rng = substream(3, 3);
    const CodedTask task =
        encode_now(va_profile(), {1, 1, 1}, FieldKind::Real, rng);
    CHECK(support_size(task.alpha) == 1);
    CHECK(support_size(task.beta) == 1);
    CHECK(task.alpha[0] != 0.0);
    CHECK(task.beta[0] != 0.0);
}

TEST_CASE("a single importance level degenerates to a full-support code") {
    std::mt19937_64 rng = substream(3, 4);
    const ClassProfile profile = build_class_profile({1, 1, 1}, {1, 1, 1, 1}, three_class_merge(1));
    const CodedTask task = encode_now(profile, {1, 1, 1}, FieldKind::Real, rng);
    CHECK(support_size(task.alpha) == 3);
    CHECK(support_size(task.beta) == 4);
}

TEST_CASE("expanding windows nest and the top window matches both schemes") {
    std::mt19937_64 rng = substream(3, 5);
    const CodedTask full = encode_ew(va_profile(), {3, 3, 3}, FieldKind::Real, rng);
    CHECK(support_size(full.alpha) == 3);
    CHECK(support_size(full.beta) == 3);
    const CodedTask top = encode_ew(va_profile(), {1, 1, 1}, FieldKind::Real, rng);
    CHECK(support_size(top.alpha) == 1);
    CHECK(support_size(top.beta) == 1);
    const CodedTask mixed = encode_ew(va_profile(), {2, 2, 1}, FieldKind::Real, rng);
    CHECK(mixed.alpha[0] != 0.0);
    CHECK(mixed.alpha[1] != 0.0);
    CHECK(mixed.alpha[2] == 0.0);
    CHECK(support_size(mixed.beta) == 1);
}

TEST_CASE("empty windows are an error") {
    std::mt19937_64 rng = substream(3, 6);
    // no block carries level 2 on either side
    const ClassProfile profile = build_class_profile({1, 1}, {1, 1}, three_class_merge(3));
    CHECK_THROWS_AS(encode_now(profile, {2, 2, 2}, FieldKind::Real, rng), std::runtime_error);
}

TEST_CASE("coefficient rows are indicator rows for unit tasks") {
    CodedTask task;
    task.alpha = {1.0, 0.0, 0.0};
    task.beta = {0.0, 1.0, 0.0};
    const std::vector<double> g = coefficient_row(task);
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(g[i] == (i == 1 ? 1.0 : 0.0));

    task.alpha = {1.0, 1.0, 0.0};
    task.beta = {1.0, 0.0, 0.0};
    const std::vector<double> g2 = coefficient_row(task);
    CHECK(g2[0] == 1.0);
    CHECK(g2[3] == 1.0);
    CHECK(g2[1] + g2[2] + g2[4] + g2[5] + g2[6] + g2[7] + g2[8] == 0.0);
}

TEST_CASE("every strategy's coded product is the g-weighted block sum") {
    std::mt19937_64 rng = substream(3, 7);
    std::normal_distribution<double> unit(0.0, 1.0);
    const int n = 3, p = 3, u = 2, q = 2, m = 4;
    Matrix a_mat(n * u, m), b_mat(m, p * q);
    for (long r = 0; r < a_mat.rows(); ++r)
        for (long c = 0; c < a_mat.cols(); ++c) a_mat(r, c) = unit(rng);
    for (long r = 0; r < b_mat.rows(); ++r)
        for (long c = 0; c < b_mat.cols(); ++c) b_mat(r, c) = unit(rng);
    const BlockPartition a = partition(a_mat, Side::Left, n, u);
    const BlockPartition b = partition(b_mat, Side::Right, p, q);
    const Matrix c = a_mat * b_mat;
    const WindowDistribution dist{{0.35, 0.35, 0.3}};

    for (int trial = 0; trial < 40; ++trial) {
        CodedTask task;
        switch (trial % 4) {
            case 0:
                task = encode_now(va_profile(), sample_window(dist, va_profile(), rng),
                                  FieldKind::Real, rng);
                break;
            case 1:
                task = encode_ew(va_profile(), sample_window(dist, va_profile(), rng),
                                 FieldKind::Real, rng);
                break;
            case 2: task = encode_mds(n, p, FieldKind::Real, rng); break;
            case 3: task = encode_uncoded(n, p, trial % (n * p)); break;
        }
        const std::vector<double> g = coefficient_row(task);
        Matrix expected = Matrix::Zero(u, q);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < p; ++j)
                expected += g[i * p + j] * c.block(i * u, j * q, u, q);
        const Matrix actual = coded_product(a, b, task);
        CHECK((actual - expected).norm() <= 1e-9 * std::max(1.0, expected.norm()));
    }
}

TEST_CASE("a window task touches exactly its class pair in the real product") {
    std::mt19937_64 rng = substream(3, 8);
    std::normal_distribution<double> unit(0.0, 1.0);
    Matrix a_mat(3, 5), b_mat(5, 3);
    for (long r = 0; r < 3; ++r)
        for (long c = 0; c < 5; ++c) a_mat(r, c) = unit(rng);
    for (long r = 0; r < 5; ++r)
        for (long c = 0; c < 3; ++c) b_mat(r, c) = unit(rng);
    const BlockPartition a = partition(a_mat, Side::Left, 3, 1);
    const BlockPartition b = partition(b_mat, Side::Right, 3, 1);
    const Matrix c = a_mat * b_mat;

    const CodedTask task = encode_now(va_profile(), {2, 1, 2}, FieldKind::Real, rng);
    const Matrix product = coded_product(a, b, task);
    const double expected = task.alpha[0] * task.beta[1] * c(0, 1);
    CHECK(product(0, 0) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("prime-field coefficient rows match the outer product exactly") {
    std::mt19937_64 rng = substream(3, 9);
    const CodedTask task = encode_mds(3, 4, FieldKind::Prime, rng);
    const auto g = coefficient_row_fp(task);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 4; ++j)
            CHECK(g[i * 4 + j] == fp::mul(task.alpha_fp[i], task.beta_fp[j]));
}

TEST_CASE("dense random prime-field tasks have the any-k property") {
    std::mt19937_64 rng = substream(3, 10);
    const int k = 9, workers = 40;
    std::vector<std::vector<std::uint32_t>> rows;
    for (int w = 0; w < workers; ++w)
        rows.push_back(coefficient_row_fp(encode_mds(3, 3, FieldKind::Prime, rng)));
    std::uniform_int_distribution<int> pick(0, workers - 1);
    for (int subset = 0; subset < 1000; ++subset) {
        std::vector<int> chosen;
        while (static_cast<int>(chosen.size()) < k) {
            const int w = pick(rng);
            if (std::find(chosen.begin(), chosen.end(), w) == chosen.end())
                chosen.push_back(w);
        }
        FpMatrix g(k, k);
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) g.at(i, j) = rows[chosen[i]][j];
        CHECK(fp_rank(g) == k);
    }
}

TEST_CASE("uncoded tasks are a bijection and block repetition doubles up") {
    for (int w = 0; w < 9; ++w) {
        const CodedTask task = encode_uncoded(3, 3, w);
        const std::vector<double> g = coefficient_row(task);
        for (int i = 0; i < 9; ++i) CHECK(g[i] == (i == w ? 1.0 : 0.0));
    }
    std::vector<int> hits(9, 0);
    for (int w = 0; w < 18; ++w) {
        const std::vector<double> g = coefficient_row(encode_block_rep(3, 3, w));
        for (int i = 0; i < 9; ++i)
            if (g[i] == 1.0) ++hits[i];
    }
    for (int i = 0; i < 9; ++i) CHECK(hits[i] == 2);
}

TEST_CASE("per-side sampling draws the two windows independently") {
    std::mt19937_64 rng = substream(3, 11);
    const WindowDistribution dist{{0.35, 0.35, 0.3}};
    const int draws = 200000;
    long top_pair = 0, mixed = 0;
    for (int i = 0; i < draws; ++i) {
        const WindowChoice choice =
            sample_window(dist, va_profile(), rng, WindowSampling::PerSide);
        if (choice.row_level == 1 && choice.col_level == 1) ++top_pair;
        if (choice.row_level == 1 && choice.col_level == 2) ++mixed;
    }
    CHECK(std::abs(double(top_pair) / draws - 0.35 * 0.35) < 0.005);
    CHECK(std::abs(double(mixed) / draws - 0.35 * 0.35) < 0.005);
}

TEST_CASE("window distributions are validated") {
    CHECK_THROWS_AS(WindowDistribution{{0.5, 0.4}}.validate(), std::invalid_argument);
    CHECK_THROWS_AS(WindowDistribution{{1.2, -0.2}}.validate(), std::invalid_argument);
    CHECK_THROWS_AS(WindowDistribution{{}}.validate(), std::invalid_argument);
    WindowDistribution{{0.35, 0.35, 0.3}}.validate();
}

TEST_CASE("strategy names round trip and reject unknowns") {
    for (Strategy s : {Strategy::Now, Strategy::Ew, Strategy::Mds, Strategy::Uncoded,
                       Strategy::BlockRep})
        CHECK(strategy_from_name(strategy_name(s)) == s);
    CHECK_THROWS_AS(strategy_from_name("fountain"), std::invalid_argument);
}

TEST_CASE("identical seeds give identical coefficient streams") {
    const WindowDistribution dist{{0.35, 0.35, 0.3}};
    auto draw = [&](std::uint64_t seed) {
        std::mt19937_64 rng = substream(seed, 0);
        std::vector<double> flat;
        for (int i = 0; i < 20; ++i) {
            const CodedTask task =
                encode_ew(va_profile(), sample_window(dist, va_profile(), rng),
                          FieldKind::Real, rng);
            flat.insert(flat.end(), task.alpha.begin(), task.alpha.end());
            flat.insert(flat.end(), task.beta.begin(), task.beta.end());
        }
        return flat;
    };
    CHECK(draw(99) == draw(99));
    CHECK(draw(99) != draw(100));
}
