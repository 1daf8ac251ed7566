#ifndef ALC_EVALUATION_HPP
#define ALC_EVALUATION_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "correlation_matrix.hpp"
#include "engine.hpp"
#include "errors.hpp"
#include "io.hpp"
#include "likelihood.hpp"
#include "partition.hpp"
#include "synthetic.hpp"

namespace alc {

/**
 * Pair-counting comparison of two partitions. The four pair counts sum to n(n-1)/2.
 */
struct AriReport {
    double ari = 0;
    std::int64_t together_together = 0;
    std::int64_t together_apart = 0;
    std::int64_t apart_together = 0;
    std::int64_t apart_apart = 0;
};

namespace internal {

inline std::int64_t pairs(std::int64_t k) { return k * (k - 1) / 2; }

}

/**
 * @brief Adjusted Rand Index under the permutation model.
 *
 * When max index equals expected index (only possible when both partitions
 * are trivial) the result is 1 for identical partitions and 0 otherwise.
 */
inline AriReport adjusted_rand_index(const Partition& a, const Partition& b) {
    if (a.size() != b.size()) {
        throw InputError("partitions cover different numbers of objects (" + std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
    }
    const auto ca = a.canonical();
    const auto cb = b.canonical();
    const std::size_t n = ca.size();

    std::unordered_map<std::uint64_t, std::int64_t> table;
    std::vector<std::int64_t> rows, cols;
    for (std::size_t i = 0; i < n; ++i) {
        const auto la = ca.labels[i];
        const auto lb = cb.labels[i];
        if (la >= rows.size()) {
            rows.resize(la + 1, 0);
        }
        if (lb >= cols.size()) {
            cols.resize(lb + 1, 0);
        }
        ++rows[la];
        ++cols[lb];
        ++table[(static_cast<std::uint64_t>(la) << 32) | lb];
    }

    std::int64_t index = 0;
    for (const auto& cell : table) {
        index += internal::pairs(cell.second);
    }
    std::int64_t sum_rows = 0;
    for (auto r : rows) {
        sum_rows += internal::pairs(r);
    }
    std::int64_t sum_cols = 0;
    for (auto c : cols) {
        sum_cols += internal::pairs(c);
    }
    const std::int64_t total = internal::pairs(static_cast<std::int64_t>(n));

    AriReport report;
    report.together_together = index;
    report.together_apart = sum_rows - index;
    report.apart_together = sum_cols - index;
    report.apart_apart = total - sum_rows - sum_cols + index;

    const double expected = total > 0 ? static_cast<double>(sum_rows) * static_cast<double>(sum_cols) / static_cast<double>(total) : 0.0;
    const double maximum = 0.5 * (static_cast<double>(sum_rows) + static_cast<double>(sum_cols));
    const double denom = maximum - expected;
    if (denom == 0) {
        report.ari = ca.labels == cb.labels ? 1.0 : 0.0;
    } else {
        report.ari = (static_cast<double>(index) - expected) / denom;
    }
    return report;
}

struct NoiseStatistics {
    std::vector<std::size_t> objects;
    std::vector<std::size_t> cluster_counts;
    std::vector<double> normalized_counts;

    /**
     * Pooled over all partitions: cluster size -> number of clusters of that size.
     */
    std::map<std::size_t, std::size_t> size_histogram;

    /**
     * Most frequent cluster size; ties go to the smaller size.
     */
    std::size_t mode = 0;
};

/**
 * Cluster counts and pooled size distribution of a batch of partitions.
 */
inline NoiseStatistics noise_statistics(const std::vector<Partition>& partitions) {
    NoiseStatistics out;
    for (const auto& p : partitions) {
        const auto clusters = p.clusters();
        out.objects.push_back(p.size());
        out.cluster_counts.push_back(clusters.size());
        out.normalized_counts.push_back(p.size() ? static_cast<double>(clusters.size()) / static_cast<double>(p.size()) : 0.0);
        for (const auto& c : clusters) {
            ++out.size_histogram[c.size()];
        }
    }

    std::size_t best = 0;
    for (const auto& [size, count] : out.size_histogram) {
        if (count > best) { // map iterates ascending, so ties keep the smaller size
            best = count;
            out.mode = size;
        }
    }
    return out;
}

namespace internal {

inline std::vector<double> average_ranks(const std::vector<double>& x) {
    std::vector<std::size_t> order(x.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) { return x[l] < x[r]; });

    std::vector<double> ranks(x.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && x[order[j + 1]] == x[order[i]]) {
            ++j;
        }
        const double rank = 0.5 * static_cast<double>(i + j) + 1;
        for (std::size_t k = i; k <= j; ++k) {
            ranks[order[k]] = rank;
        }
        i = j + 1;
    }
    return ranks;
}

inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0 || syy == 0) {
        return 0;
    }
    return sxy / std::sqrt(sxx * syy);
}

}

/**
 * Spearman rank correlation with average ranks for ties. Returns 0 if either input is constant.
 */
inline double spearman_correlation(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw InputError("Spearman correlation needs two sequences of equal length >= 2");
    }
    return internal::pearson(internal::average_ranks(x), internal::average_ranks(y));
}

struct MstEdge {
    std::size_t i;
    std::size_t j;
    double distance;
};

/**
 * @brief Minimum spanning tree under the distance 1 - rho.
 *
 * Dense Prim in O(N^2). Edges compare by (distance, min index, max index),
 * which makes the tree unique. Edges are reported with i < j, in the order
 * they join the tree.
 */
inline std::vector<MstEdge> mst_edges(const CorrelationMatrix& corr) {
    const std::size_t n = corr.size();
    std::vector<MstEdge> edges;
    if (n < 2) {
        return edges;
    }
    edges.reserve(n - 1);

    auto key = [](double w, std::size_t u, std::size_t v) {
        return std::make_tuple(w, std::min(u, v), std::max(u, v));
    };

    constexpr auto none = std::numeric_limits<std::size_t>::max();
    std::vector<bool> in_tree(n, false);
    std::vector<double> best(n, std::numeric_limits<double>::infinity());
    std::vector<std::size_t> parent(n, none);

    in_tree[0] = true;
    for (std::size_t v = 1; v < n; ++v) {
        best[v] = 1 - corr(0, v);
        parent[v] = 0;
    }

    for (std::size_t step = 1; step < n; ++step) {
        std::size_t pick = none;
        for (std::size_t v = 0; v < n; ++v) {
            if (in_tree[v]) {
                continue;
            }
            if (pick == none || key(best[v], parent[v], v) < key(best[pick], parent[pick], pick)) {
                pick = v;
            }
        }

        in_tree[pick] = true;
        edges.push_back(MstEdge{std::min(pick, parent[pick]), std::max(pick, parent[pick]), best[pick]});

        const auto row = corr.row(pick);
        for (std::size_t v = 0; v < n; ++v) {
            if (in_tree[v]) {
                continue;
            }
            const double w = 1 - row[v];
            if (key(w, pick, v) < key(best[v], parent[v], v)) {
                best[v] = w;
                parent[v] = pick;
            }
        }
    }
    return edges;
}

struct OracleResult {
    Partition partition;
    double likelihood = 0;
    std::size_t partitions_examined = 0;
};

/**
 * @brief Global likelihood maximiser by enumerating every set partition.
 *
 * Partitions are visited as restricted growth strings; ones containing a
 * cluster outside the likelihood's domain are skipped. The first maximiser
 * in enumeration order wins ties.
 */
inline OracleResult exhaustive_oracle(const CorrelationMatrix& corr, std::size_t max_n = 8) {
    const std::size_t n = corr.size();
    if (n > max_n) {
        throw InputError("exhaustive search over " + std::to_string(n) + " objects exceeds the limit of " + std::to_string(max_n));
    }

    OracleResult best;
    best.partition = Partition::singletons(n);
    best.likelihood = 0;

    std::vector<std::size_t> rgs(n, 0);
    std::vector<std::size_t> prefix_max(n, 0);
    std::vector<std::size_t> sizes(n);
    std::vector<double> sums(n);

    while (true) {
        ++best.partitions_examined;

        const std::size_t blocks = n ? prefix_max[n - 1] + 1 : 0;
        std::fill(sizes.begin(), sizes.begin() + blocks, 0);
        std::fill(sums.begin(), sums.begin() + blocks, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const auto bi = rgs[i];
            ++sizes[bi];
            const auto row = corr.row(i);
            for (std::size_t j = 0; j < n; ++j) {
                if (rgs[j] == bi) {
                    sums[bi] += row[j];
                }
            }
        }

        double total = 0;
        bool valid = true;
        LikelihoodValue term;
        for (std::size_t b = 0; b < blocks && valid; ++b) {
            valid = internal::try_cluster_likelihood(sizes[b], sums[b], term);
            total += term.value;
        }
        if (valid && total > best.likelihood + 1e-12) {
            best.likelihood = total;
            best.partition = Partition(rgs);
        }

        // Next restricted growth string: rgs[i] <= 1 + max(rgs[0..i-1]).
        bool advanced = false;
        for (std::size_t i = n; i-- > 1;) {
            if (rgs[i] <= prefix_max[i - 1]) {
                ++rgs[i];
                prefix_max[i] = std::max(prefix_max[i - 1], rgs[i]);
                for (std::size_t k = i + 1; k < n; ++k) {
                    rgs[k] = 0;
                    prefix_max[k] = prefix_max[i];
                }
                advanced = true;
                break;
            }
        }
        if (!advanced) {
            break;
        }
    }

    best.partition = best.partition.canonical();
    return best;
}

struct ScalingReport {
    std::vector<std::size_t> sizes;

    /**
     * Median engine wall time per size, in seconds.
     */
    std::vector<double> runtimes;

    /**
     * Least-squares slope of log(runtime) against log(N).
     */
    double fitted_exponent = 0;

    std::vector<std::size_t> clusters_found;
    std::vector<double> ari;

    /**
     * Whether every repetition at a size returned the same partition.
     */
    bool repetitions_consistent = true;
};

/**
 * Slope of the least-squares line through (log x, log y).
 */
inline double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw InputError("log-log fit needs two sequences of equal length >= 2");
    }
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0) || !(y[i] > 0)) {
            throw InputError("log-log fit needs positive values");
        }
        lx.push_back(std::log(x[i]));
        ly.push_back(std::log(y[i]));
    }
    const double n = static_cast<double>(lx.size());
    const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / n;
    const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxy += (lx[i] - mx) * (ly[i] - my);
        sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    return sxy / sxx;
}

/**
 * Split `n` objects into `clusters` near-equal groups, larger groups first.
 */
inline std::vector<std::size_t> equal_cluster_sizes(std::size_t n, std::size_t clusters) {
    if (clusters == 0 || clusters > n) {
        throw InputError("cannot split " + std::to_string(n) + " objects into " + std::to_string(clusters) + " clusters");
    }
    std::vector<std::size_t> sizes(clusters, n / clusters);
    for (std::size_t i = 0; i < n % clusters; ++i) {
        ++sizes[i];
    }
    return sizes;
}

struct ScalingConfig {
    std::vector<std::size_t> sizes{100, 200, 400, 800, 1600, 3200};
    std::size_t clusters = 10;
    std::size_t length = 250;
    double coupling = 1.0;
    std::size_t repetitions = 1;
    std::uint64_t seed = 0;
};

/**
 * @brief Engine runtime as a function of N on planted-cluster data.
 *
 * Only the optimiser is timed; data generation and correlation estimation
 * happen outside the measured region.
 */
inline ScalingReport benchmark_scaling(const ScalingConfig& cfg) {
    if (cfg.repetitions == 0) {
        throw InputError("benchmark needs at least one repetition");
    }
    ScalingReport report;
    for (std::size_t idx = 0; idx < cfg.sizes.size(); ++idx) {
        const std::size_t n = cfg.sizes[idx];
        GeneratorSpec spec;
        spec.cluster_sizes = equal_cluster_sizes(n, cfg.clusters);
        spec.couplings = {cfg.coupling};
        spec.length = cfg.length;
        spec.seed = cfg.seed + idx;
        const auto generated = gen_correlated(spec);
        const auto corr = estimate_correlation(generated.data);

        EngineConfig engine_cfg;
        engine_cfg.seed = cfg.seed;

        std::vector<double> times;
        Partition first;
        for (std::size_t r = 0; r < cfg.repetitions; ++r) {
            const auto result = run(corr, engine_cfg);
            times.push_back(result.elapsed);
            if (r == 0) {
                first = result.partition;
            } else if (result.partition.labels != first.labels) {
                report.repetitions_consistent = false;
            }
        }
        std::sort(times.begin(), times.end());
        const std::size_t m = times.size();
        const double median = m % 2 ? times[m / 2] : 0.5 * (times[m / 2 - 1] + times[m / 2]);

        report.sizes.push_back(n);
        report.runtimes.push_back(std::max(median, 1e-9));
        report.clusters_found.push_back(first.cluster_count());
        report.ari.push_back(adjusted_rand_index(first, generated.truth).ari);
    }

    if (report.sizes.size() >= 2) {
        std::vector<double> xs(report.sizes.begin(), report.sizes.end());
        report.fitted_exponent = fit_loglog_slope(xs, report.runtimes);
    }
    return report;
}

/**
 * ARI between `ours` and labels produced by an external tool, read from an `object_id,label` file.
 */
inline AriReport compare_labelfile(const Partition& ours, const std::string& path) {
    return adjusted_rand_index(ours, read_labels_csv(path, ours.size()));
}

}

#endif
