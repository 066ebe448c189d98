#include <doctest.h>

#include <numeric>
#include <random>

#include "uep/class_profile.hpp"
#include "uep/rng.hpp"

using namespace uep;

TEST_CASE("quantile classification buckets descending norms") {
    CHECK(classify_by_norm({31.6, 10.0, 3.16}, 3, ClassifyMode::Quantile) ==
          std::vector<int>{1, 2, 3});
    CHECK(classify_by_norm({10.0, 31.6, 3.16}, 3, ClassifyMode::Quantile) ==
          std::vector<int>{2, 1, 3});
}

TEST_CASE("all-zero norms land in the lowest threshold level") {
    CHECK(classify_by_norm({0.0, 0.0, 0.0}, 3, ClassifyMode::Thresholds, {10.0, 1.0}) ==
          std::vector<int>{3, 3, 3});
}

TEST_CASE("a single level classifies everything as level 1") {
    CHECK(classify_by_norm({5.0, 1.0, 9.0}, 1, ClassifyMode::Quantile) ==
          std::vector<int>{1, 1, 1});
}

TEST_CASE("quantile levels are invariant under positive scaling") {
    std::mt19937_64 rng = substream(7, 0);
    std::uniform_real_distribution<double> unit(0.0, 10.0);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<double> norms(6);
        for (double& n : norms) n = unit(rng);
        std::vector<double> scaled = norms;
        for (double& n : scaled) n *= 7.3;
        CHECK(classify_by_norm(norms, 3, ClassifyMode::Quantile) ==
              classify_by_norm(scaled, 3, ClassifyMode::Quantile));
    }
}

TEST_CASE("thresholds must strictly decrease") {
    CHECK_THROWS_AS(classify_by_norm({1.0}, 3, ClassifyMode::Thresholds, {1.0, 1.0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(classify_by_norm({1.0}, 3, ClassifyMode::Thresholds, {1.0}),
                    std::invalid_argument);
}

TEST_CASE("three-level grouped merge gives the (1,2,6) class counts") {
    const ClassProfile profile =
        build_class_profile({1, 2, 3}, {1, 2, 3}, three_class_merge(3));
    CHECK(profile.classes == 3);
    CHECK(profile.class_count == std::vector<int>{1, 2, 6});
    CHECK(profile.class_of_block(0, 0) == 1);
    CHECK(profile.class_of_block(0, 1) == 2);
    CHECK(profile.class_of_block(1, 0) == 2);
    CHECK(profile.class_of_block(2, 2) == 3);
    // class 2 is composite: both ordered level pairs carry one sub-product
    REQUIRE(profile.class_pairs[1].size() == 2);
    CHECK(profile.class_pairs[1][0].subproducts == 1);
    CHECK(profile.class_pairs[1][1].subproducts == 1);
}

TEST_CASE("single level collapses to one class of size N*P") {
    const ClassProfile profile = build_class_profile({1, 1, 1}, {1, 1, 1}, three_class_merge(1));
    CHECK(profile.classes == 1);
    CHECK(profile.class_count == std::vector<int>{9});
}

TEST_CASE("two levels with the pairwise merge give counts (1,2,1)") {
    const ClassProfile profile = build_class_profile({1, 2}, {1, 2}, pairwise_merge(2));
    CHECK(profile.classes == 3);
    CHECK(profile.class_count == std::vector<int>{1, 2, 1});
}

TEST_CASE("class counts always sum to N*P") {
    std::mt19937_64 rng = substream(7, 1);
    for (int trial = 0; trial < 50; ++trial) {
        std::uniform_int_distribution<int> s_dist(1, 4), n_dist(1, 7);
        const int s = s_dist(rng), n = n_dist(rng), p = n_dist(rng);
        std::uniform_int_distribution<int> level(1, s);
        std::vector<int> rows(n), cols(p);
        for (int& x : rows) x = level(rng);
        for (int& x : cols) x = level(rng);
        const MergeTable merge = trial % 2 ? pairwise_merge(s) : three_class_merge(s);
        const ClassProfile profile = build_class_profile(rows, cols, merge);
        CHECK(std::accumulate(profile.class_count.begin(), profile.class_count.end(), 0) ==
              n * p);
    }
}

TEST_CASE("incomplete or asymmetric merge tables are rejected") {
    MergeTable incomplete{{1, 0}, {0, 1}};
    CHECK_THROWS_AS(build_class_profile({1, 2}, {1, 2}, incomplete), std::invalid_argument);
    MergeTable asymmetric{{1, 2}, {3, 1}};
    CHECK_THROWS_AS(build_class_profile({1, 2}, {1, 2}, asymmetric), std::invalid_argument);
    CHECK_THROWS_AS(build_class_profile({}, {1}, three_class_merge(1)), std::invalid_argument);
}
