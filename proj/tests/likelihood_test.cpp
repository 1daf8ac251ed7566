#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "alc/likelihood.hpp"
#include "oracles.hpp"

using namespace alc;

TEST(ClusterCoupling, LowerBoundIsZero) {
    EXPECT_DOUBLE_EQ(cluster_coupling({2, 2.0}), 0.0);
}

TEST(ClusterCoupling, PairWithHalfCorrelation) {
    EXPECT_NEAR(cluster_coupling({2, 3.0}), std::sqrt(0.5), 1e-12);
    EXPECT_NEAR(cluster_coupling({2, 3.0}), 0.70711, 1e-5);
}

TEST(ClusterCoupling, ApproachesOneAtUpperBound) {
    EXPECT_NEAR(cluster_coupling({2, 4.0 - 1e-9}), 1.0, 1e-9);
    EXPECT_LT(cluster_coupling({2, 4.0 - 1e-9}), 1.0);
}

TEST(ClusterCoupling, MonotoneInSum) {
    double prev = cluster_coupling({5, 5.0});
    for (double c = 5.5; c < 25; c += 0.5) {
        const double g = cluster_coupling({5, c});
        EXPECT_GT(g, prev);
        prev = g;
    }
}

TEST(ClusterCoupling, Errors) {
    EXPECT_THROW(cluster_coupling({1, 1.0}), ConstraintViolation);
    EXPECT_THROW(cluster_coupling({3, 2.9}), ConstraintViolation);
}

TEST(ClusterLikelihood, SingletonIsZero) {
    EXPECT_EQ(cluster_likelihood({1, 1.0}).value, 0.0);
}

TEST(ClusterLikelihood, PairWithHalfCorrelation) {
    const double expected = 0.5 * std::log(4.0 / 3.0);
    EXPECT_NEAR(cluster_likelihood({2, 3.0}).value, expected, 1e-15);
    EXPECT_NEAR(cluster_likelihood({2, 3.0}).value, 0.143841, 1e-6);
    EXPECT_FALSE(cluster_likelihood({2, 3.0}).clamped);
}

TEST(ClusterLikelihood, ZeroCouplingIsZero) {
    EXPECT_EQ(cluster_likelihood({2, 2.0}).value, 0.0);
    EXPECT_EQ(cluster_likelihood({7, 7.0}).value, 0.0);
}

TEST(ClusterLikelihood, BelowLowerBoundThrows) {
    EXPECT_THROW(cluster_likelihood({2, 1.5}), ConstraintViolation);
    EXPECT_THROW(cluster_likelihood({0, 0.0}), InputError);
}

TEST(ClusterLikelihood, MatchesPlainFormula) {
    std::mt19937_64 rng(11);
    for (int t = 0; t < 500; ++t) {
        const std::size_t n = std::uniform_int_distribution<std::size_t>(2, 60)(rng);
        const double nn = static_cast<double>(n);
        const double c = std::uniform_real_distribution<double>(nn, nn * nn * 0.999)(rng);
        EXPECT_NEAR(cluster_likelihood({n, c}).value, oracle::likelihood(nn, c), 1e-9 * std::max(1.0, oracle::likelihood(nn, c)));
    }
}

TEST(ClusterLikelihood, SignStructure) {
    std::mt19937_64 rng(12);
    for (int t = 0; t < 300; ++t) {
        const std::size_t n = std::uniform_int_distribution<std::size_t>(2, 40)(rng);
        const double nn = static_cast<double>(n);
        const double c = std::uniform_real_distribution<double>(nn, nn * nn)(rng);
        const double l = cluster_likelihood({n, c}).value;
        if (c > nn) {
            EXPECT_GT(l, 0.0) << n << ' ' << c;
        } else {
            EXPECT_EQ(l, 0.0);
        }
    }
}

TEST(ClusterLikelihood, StrictlyIncreasingByFiniteDifferences) {
    for (std::size_t n : {2u, 3u, 10u, 50u}) {
        const double nn = static_cast<double>(n);
        for (int k = 1; k < 50; ++k) {
            const double c = nn + (nn * nn - nn) * k / 50.0;
            const double h = 1e-6 * (nn * nn - nn);
            EXPECT_LT(cluster_likelihood({n, c - h}).value, cluster_likelihood({n, c}).value) << n << ' ' << c;
        }
    }
}

TEST(ClusterLikelihood, DivergesAtUpperBound) {
    for (std::size_t n : {2u, 5u, 100u}) {
        const double n2 = static_cast<double>(n * n);
        EXPECT_GT(cluster_likelihood({n, n2 * (1 - 1e-6)}).value, cluster_likelihood({n, n2 * (1 - 1e-3)}).value);
    }
}

TEST(ClusterLikelihood, ClampsAtAndAboveUpperBound) {
    const auto at = cluster_likelihood({2, 4.0});
    EXPECT_TRUE(at.clamped);
    EXPECT_TRUE(std::isfinite(at.value));
    // n^2 - c = 4e-12 at the clamp point.
    const double expected = 0.5 * (std::log(2.0 / 4.0) + std::log(2.0 / 4e-12));
    EXPECT_NEAR(at.value, expected, 1e-6);
    EXPECT_EQ(cluster_likelihood({2, 4.5}).value, at.value);
    EXPECT_TRUE(cluster_likelihood({2, 4.5}).clamped);
}

TEST(MergeStats, Examples) {
    const auto a = merge_stats({1, 1}, {1, 1}, 0.5);
    EXPECT_EQ(a.size, 2u);
    EXPECT_DOUBLE_EQ(a.correlation_sum, 3.0);
    const auto b = merge_stats({1, 1}, {1, 1}, 0.0);
    EXPECT_EQ(b.size, 2u);
    EXPECT_DOUBLE_EQ(b.correlation_sum, 2.0);
    const auto c = merge_stats({2, 3}, {1, 1}, 1.0);
    EXPECT_EQ(c.size, 3u);
    EXPECT_DOUBLE_EQ(c.correlation_sum, 6.0);
}

TEST(DeltaCase2, Singletons) {
    EXPECT_NEAR(delta_merge_case2({1, 1}, {1, 1}, 0.5).value, 0.143841, 1e-6);
    EXPECT_EQ(delta_merge_case2({1, 1}, {1, 1}, 0.0).value, 0.0);
}

TEST(DeltaCase2, DuplicatesMergeUnderClamp) {
    const auto d = delta_merge_case2({1, 1}, {1, 1}, 1.0);
    const double delta = 1e-12;
    const double expected = 0.5 * std::log(2.0 / 4.0) + 0.5 * std::log(2.0 / (4.0 * delta));
    EXPECT_TRUE(d.clamped);
    EXPECT_NEAR(d.value, expected, 1e-3);
    EXPECT_GT(d.value, 10.0);
}

TEST(DeltaCase1, Examples) {
    EXPECT_NEAR(delta_merge_case1({1, 1}, {1, 1}, 0.5).value, 0.143841, 1e-6);
    EXPECT_NEAR(delta_merge_case1({2, 3}, {1, 1}, 0.0).value, oracle::likelihood(3, 4) - 0.5 * std::log(4.0 / 3.0), 1e-12);
    EXPECT_EQ(delta_merge_case1({1, 1}, {1, 1}, 0.0).value, 0.0);
}

TEST(DeltaCase1, NeverExceedsCase2WhenBothPositive) {
    std::mt19937_64 rng(5);
    for (int t = 0; t < 200; ++t) {
        const auto corr = oracle::random_corr(10, 40, rng);
        const auto split = oracle::random_clusters(10, rng);
        if (split.size() < 2) {
            continue;
        }
        const ClusterStats a{split[0].size(), oracle::cluster_sum(corr, split[0])};
        const ClusterStats b{split[1].size(), oracle::cluster_sum(corr, split[1])};
        double cross = 0;
        for (auto i : split[0]) {
            for (auto j : split[1]) {
                cross += corr(i, j);
            }
        }
        const auto merged = merge_stats(a, b, cross);
        if (merged.correlation_sum < static_cast<double>(merged.size) || (a.size > 1 && a.correlation_sum < static_cast<double>(a.size)) ||
            (b.size > 1 && b.correlation_sum < static_cast<double>(b.size))) {
            continue;
        }
        EXPECT_GE(delta_merge_case1(a, b, cross).value + 1e-12, delta_merge_case2(a, b, cross).value);
    }
}

TEST(TotalLikelihood, AllSingletonsIsExactlyZero) {
    std::mt19937_64 rng(1);
    const auto corr = oracle::random_corr(12, 30, rng);
    EXPECT_EQ(total_likelihood(Partition::singletons(12), corr).value, 0.0);
}

TEST(TotalLikelihood, PairExample) {
    const CorrelationMatrix corr(2, {1, 0.5, 0.5, 1});
    EXPECT_NEAR(total_likelihood(Partition::single_cluster(2), corr).value, 0.143841, 1e-6);
}

TEST(TotalLikelihood, TwoBlockExample) {
    const auto corr = oracle::block_corr({0, 0, 1, 1}, 0.5);
    const auto p = Partition::from_clusters({{0, 1}, {2, 3}}, 4);
    EXPECT_NEAR(total_likelihood(p, corr).value, 0.287682, 1e-6);
    EXPECT_NEAR(total_likelihood(p, corr).value, std::log(4.0 / 3.0), 1e-12);
}

TEST(TotalLikelihood, OutOfRangeIndexThrows) {
    const auto corr = CorrelationMatrix::identity(3);
    EXPECT_THROW(total_likelihood(std::vector<std::vector<std::size_t> >{{0, 3}}, corr), InputError);
    EXPECT_THROW(total_likelihood(Partition::singletons(4), corr), InputError);
}

TEST(TotalLikelihoodProperty, AdditivityOverClusters) {
    std::mt19937_64 rng(21);
    for (int t = 0; t < 200; ++t) {
        const std::size_t n = std::uniform_int_distribution<std::size_t>(2, 25)(rng);
        const auto corr = oracle::random_corr(n, 60, rng);
        const auto clusters = oracle::random_clusters(n, rng);
        bool valid = true;
        double sum = 0;
        for (const auto& m : clusters) {
            const double c = oracle::cluster_sum(corr, m);
            if (m.size() > 1 && c < static_cast<double>(m.size())) {
                valid = false;
                break;
            }
            sum += cluster_likelihood({m.size(), c}).value;
        }
        if (!valid) {
            EXPECT_THROW(total_likelihood(clusters, corr), ConstraintViolation);
            continue;
        }
        EXPECT_NEAR(total_likelihood(clusters, corr).value, sum, 1e-9);
        EXPECT_NEAR(total_likelihood(clusters, corr).value, oracle::total(corr, clusters), 1e-9);
        EXPECT_GE(total_likelihood(clusters, corr).value, 0.0);
    }
}

TEST(DeltaCase2Property, EqualsScratchDifference) {
    std::mt19937_64 rng(22);
    int checked = 0;
    for (int t = 0; t < 400; ++t) {
        const auto corr = oracle::random_corr(15, 50, rng);
        auto clusters = oracle::random_clusters(15, rng);
        if (clusters.size() < 2) {
            continue;
        }
        std::uniform_int_distribution<std::size_t> pick(0, clusters.size() - 1);
        const std::size_t ia = pick(rng);
        std::size_t ib = pick(rng);
        if (ia == ib) {
            ib = (ia + 1) % clusters.size();
        }
        const ClusterStats a{clusters[ia].size(), oracle::cluster_sum(corr, clusters[ia])};
        const ClusterStats b{clusters[ib].size(), oracle::cluster_sum(corr, clusters[ib])};
        double cross = 0;
        for (auto i : clusters[ia]) {
            for (auto j : clusters[ib]) {
                cross += corr(i, j);
            }
        }
        auto merged = clusters;
        merged[ia].insert(merged[ia].end(), clusters[ib].begin(), clusters[ib].end());
        merged.erase(merged.begin() + static_cast<std::ptrdiff_t>(ib));

        double before = 0, after = 0;
        try {
            before = total_likelihood(clusters, corr).value;
            after = total_likelihood(merged, corr).value;
        } catch (const ConstraintViolation&) {
            continue;
        }
        EXPECT_NEAR(delta_merge_case2(a, b, cross).value, after - before, 1e-9);
        ++checked;
    }
    EXPECT_GT(checked, 50);
}
