#ifndef ALC_LIKELIHOOD_HPP
#define ALC_LIKELIHOOD_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "correlation_matrix.hpp"
#include "errors.hpp"
#include "partition.hpp"

/**
 * @file likelihood.hpp
 *
 * @brief Giada-Marsili log-likelihood of a cluster configuration.
 *
 * A cluster is summarised by its size n and its correlation sum c, the sum
 * of C_ij over all ordered member pairs including the diagonal (so c = 1 for
 * a singleton). The per-cluster term is
 *
 *     L(n, c) = 1/2 [ ln(n / c) + (n - 1) ln((n^2 - n) / (n^2 - c)) ]
 *
 * defined for n < c < n^2. Singletons contribute 0 and the total likelihood
 * of a partition is the sum of its per-cluster terms.
 */

namespace alc {

/**
 * Relative clamp applied when c reaches n^2 (perfectly correlated members).
 */
inline constexpr double clamp_delta = 1e-12;

/**
 * Minimum likelihood gain for a merge to be accepted.
 */
inline constexpr double default_epsilon_merge = 1e-12;

struct ClusterStats {
    std::size_t size = 1;
    double correlation_sum = 1;
};

/**
 * Value of a likelihood term plus whether the upper-bound clamp was applied
 * to any cluster that went into it.
 */
struct LikelihoodValue {
    double value = 0;
    bool clamped = false;
};

namespace internal {

/*
 * Non-throwing core used in the engine's inner loop. Returns false when
 * c < n for n >= 2, i.e. outside the likelihood's domain.
 */
inline bool try_cluster_likelihood(std::size_t size, double corr_sum, LikelihoodValue& out) noexcept {
    if (size <= 1) {
        out = LikelihoodValue{};
        return true;
    }

    const double n = static_cast<double>(size);
    const double n2 = n * n;
    if (!(corr_sum >= n)) { // also rejects NaN
        return false;
    }

    if (corr_sum >= n2 * (1 - clamp_delta)) {
        const double c = n2 * (1 - clamp_delta);
        out.value = 0.5 * (std::log(n / c) + (n - 1) * std::log((n2 - n) / (n2 * clamp_delta)));
        out.clamped = true;
        return true;
    }

    // log1p keeps precision near c = n, where the two terms nearly cancel.
    const double excess = corr_sum - n;
    out.value = 0.5 * (-std::log1p(excess / n) - (n - 1) * std::log1p(-excess / (n2 - n)));
    out.clamped = false;
    return true;
}

}

/**
 * @param stats Cluster with at least two members and c >= n.
 * @return The intra-cluster coupling sqrt((c - n) / (n^2 - n)), in [0, 1].
 */
inline double cluster_coupling(const ClusterStats& stats) {
    if (stats.size < 2) {
        throw ConstraintViolation("coupling is undefined for clusters with fewer than two members");
    }
    const double n = static_cast<double>(stats.size);
    if (!(stats.correlation_sum >= n)) {
        throw ConstraintViolation("coupling is undefined for correlation sum " + std::to_string(stats.correlation_sum) + " below cluster size " + std::to_string(stats.size));
    }
    const double ratio = (stats.correlation_sum - n) / (n * n - n);
    return std::sqrt(std::min(1.0, ratio));
}

/**
 * Likelihood contribution of one cluster.
 *
 * Singletons and zero-coupling clusters (c = n) return 0. Correlation sums
 * at or above n^2 are clamped to n^2 (1 - clamp_delta) and flagged.
 */
inline LikelihoodValue cluster_likelihood(const ClusterStats& stats) {
    if (stats.size == 0) {
        throw InputError("cluster size must be positive");
    }
    LikelihoodValue out;
    if (!internal::try_cluster_likelihood(stats.size, stats.correlation_sum, out)) {
        throw ConstraintViolation("correlation sum " + std::to_string(stats.correlation_sum) + " is below cluster size " + std::to_string(stats.size));
    }
    return out;
}

/**
 * @param cross_sum Sum of C_ij over i in `a`, j in `b`, each unordered pair counted once.
 */
inline ClusterStats merge_stats(const ClusterStats& a, const ClusterStats& b, double cross_sum) {
    return ClusterStats{a.size + b.size, a.correlation_sum + b.correlation_sum + 2 * cross_sum};
}

/**
 * Gain from merging `a` and `b` relative to the sum of their separate likelihoods.
 * This is the criterion the engine optimises.
 */
inline LikelihoodValue delta_merge_case2(const ClusterStats& a, const ClusterStats& b, double cross_sum) {
    const auto merged = cluster_likelihood(merge_stats(a, b, cross_sum));
    const auto la = cluster_likelihood(a);
    const auto lb = cluster_likelihood(b);
    return LikelihoodValue{merged.value - la.value - lb.value, merged.clamped || la.clamped || lb.clamped};
}

/**
 * Gain from merging relative to the better of the two parts.
 */
inline LikelihoodValue delta_merge_case1(const ClusterStats& a, const ClusterStats& b, double cross_sum) {
    const auto merged = cluster_likelihood(merge_stats(a, b, cross_sum));
    const auto la = cluster_likelihood(a);
    const auto lb = cluster_likelihood(b);
    return LikelihoodValue{merged.value - std::max(la.value, lb.value), merged.clamped || la.clamped || lb.clamped};
}

/**
 * Per-cluster statistics of `partition`, computed from scratch. Indexed by canonical label.
 */
inline std::vector<ClusterStats> partition_stats(const Partition& partition, const CorrelationMatrix& corr) {
    if (partition.size() != corr.size()) {
        throw InputError("partition covers " + std::to_string(partition.size()) + " objects but the correlation matrix has " + std::to_string(corr.size()));
    }

    const auto clusters = partition.clusters();
    std::vector<ClusterStats> stats;
    stats.reserve(clusters.size());
    for (const auto& members : clusters) {
        double sum = 0;
        for (auto i : members) {
            const auto row = corr.row(i);
            for (auto j : members) {
                sum += row[j];
            }
        }
        stats.push_back(ClusterStats{members.size(), sum});
    }
    return stats;
}

/**
 * Total likelihood of a partition, recomputing every c_s from `corr`.
 */
inline LikelihoodValue total_likelihood(const Partition& partition, const CorrelationMatrix& corr) {
    LikelihoodValue total;
    for (const auto& s : partition_stats(partition, corr)) {
        const auto term = cluster_likelihood(s);
        total.value += term.value;
        total.clamped = total.clamped || term.clamped;
    }
    return total;
}

/**
 * Overload taking explicit member lists; every index in [0, n) must appear exactly once.
 */
inline LikelihoodValue total_likelihood(const std::vector<std::vector<std::size_t> >& clusters, const CorrelationMatrix& corr) {
    return total_likelihood(Partition::from_clusters(clusters, corr.size()), corr);
}

}

#endif
