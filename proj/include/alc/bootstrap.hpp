#ifndef ALC_BOOTSTRAP_HPP
#define ALC_BOOTSTRAP_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "correlation_matrix.hpp"
#include "engine.hpp"
#include "errors.hpp"
#include "evaluation.hpp"
#include "partition.hpp"
#include "synthetic.hpp"

/**
 * @file bootstrap.hpp
 *
 * @brief Consensus clustering over random subsamples.
 *
 * Each iteration draws n of the N objects without replacement, clusters the
 * n x n correlation sub-matrix, and counts for every pair how often it was
 * drawn together (f) and how often it landed in the same cluster (d). The
 * ratio p = d / f, thresholded at omega, is read as a graph whose connected
 * components form the final partition.
 */

namespace alc {

struct BootstrapConfig {
    /**
     * Target signal-to-noise ratio D / n. Used to derive `sample_size` when that is unset.
     */
    std::optional<double> q;

    std::optional<std::size_t> sample_size;

    double omega = 0.75;

    std::size_t max_iterations = 2200;

    std::uint64_t seed = 0;

    std::optional<Partition> ground_truth;

    /**
     * Stop once ARI against the ground truth reaches this value. Defaults to 0.9 when a ground truth is given.
     */
    std::optional<double> ari_stop;

    std::size_t record_every = 10;

    /**
     * Stop when the thresholded graph's edge count changes by less than 0.1%
     * over 100 iterations. A convenience for data without a ground truth.
     */
    bool plateau_stop = false;

    std::size_t threads = 1;
};

/**
 * Co-sampling counts `f` and co-clustering counts `d`, both N x N, symmetric, zero diagonal.
 */
struct BootstrapState {
    std::size_t n = 0;
    std::vector<std::uint32_t> f;
    std::vector<std::uint32_t> d;
    std::size_t iterations_done = 0;

    BootstrapState() = default;
    explicit BootstrapState(std::size_t objects) : n(objects), f(objects * objects, 0), d(objects * objects, 0) {}

    void absorb(const BootstrapState& other) {
        for (std::size_t i = 0; i < f.size(); ++i) {
            f[i] += other.f[i];
            d[i] += other.d[i];
        }
        iterations_done += other.iterations_done;
    }
};

struct ProbabilityMatrix {
    std::size_t n = 0;
    std::vector<double> values;

    double operator()(std::size_t i, std::size_t j) const { return values[i * n + j]; }
};

struct Adjacency {
    std::size_t n = 0;
    std::vector<std::uint8_t> values;

    bool operator()(std::size_t i, std::size_t j) const { return values[i * n + j] != 0; }

    std::size_t edge_count() const {
        std::size_t count = 0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                count += values[i * n + j];
            }
        }
        return count;
    }
};

struct TrajectoryPoint {
    std::size_t iteration;

    /**
     * NaN when no ground truth was supplied.
     */
    double ari;

    std::size_t edge_count;
    std::size_t cluster_count;
};

struct BootstrapResult {
    Partition partition;
    ProbabilityMatrix probabilities;
    Adjacency adjacency;
    std::vector<TrajectoryPoint> trajectory;
    BootstrapState state;
    std::size_t sample_size = 0;
    std::string stop_reason;
};

/**
 * n = round(D / q) when `q` is set, otherwise the explicit sample size. Must lie in [2, N].
 */
inline std::size_t resolve_sample_size(const BootstrapConfig& cfg, std::size_t objects, std::optional<std::size_t> length) {
    std::size_t n = 0;
    if (cfg.sample_size) {
        n = *cfg.sample_size;
    } else if (cfg.q) {
        if (!(*cfg.q > 0)) {
            throw InputError("signal-to-noise target q must be positive");
        }
        if (!length) {
            throw InputError("deriving the sample size from q needs the series length; pass the sample size directly");
        }
        n = static_cast<std::size_t>(std::llround(static_cast<double>(*length) / *cfg.q));
    } else {
        throw InputError("either q or the sample size must be given");
    }
    if (n < 2 || n > objects) {
        throw InputError("sample size " + std::to_string(n) + " must lie in [2, " + std::to_string(objects) + "]");
    }
    return n;
}

/**
 * One resampling round: draw `sample_size` distinct objects, cluster them,
 * and add the pair counts into `state`. All randomness comes from (seed, iteration).
 */
inline void bootstrap_iteration(const CorrelationMatrix& corr, BootstrapState& state, std::size_t sample_size, std::uint64_t seed, std::uint64_t iteration) {
    const std::size_t n = corr.size();
    if (state.n != n) {
        throw InputError("bootstrap state covers " + std::to_string(state.n) + " objects but the correlation matrix has " + std::to_string(n));
    }
    if (sample_size > n) {
        throw InputError("sample size " + std::to_string(sample_size) + " exceeds the " + std::to_string(n) + " available objects");
    }
    if (sample_size < 2) {
        throw InputError("sample size must be at least 2");
    }

    std::seed_seq seq{
        static_cast<std::uint32_t>(seed & 0xffffffffu),
        static_cast<std::uint32_t>(seed >> 32),
        static_cast<std::uint32_t>(iteration & 0xffffffffu),
        static_cast<std::uint32_t>(iteration >> 32),
        0x626f6f74u
    };
    std::mt19937_64 rng(seq);

    std::vector<std::size_t> pool(n);
    std::iota(pool.begin(), pool.end(), 0);
    for (std::size_t i = 0; i < sample_size; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, n - 1);
        std::swap(pool[i], pool[pick(rng)]);
    }
    pool.resize(sample_size);
    std::sort(pool.begin(), pool.end());

    EngineConfig cfg;
    cfg.seed = rng();
    const auto result = run(corr.submatrix(pool), cfg);
    const auto& labels = result.partition.labels;

    for (std::size_t a = 0; a < sample_size; ++a) {
        const std::size_t i = pool[a];
        for (std::size_t b = a + 1; b < sample_size; ++b) {
            const std::size_t j = pool[b];
            ++state.f[i * n + j];
            ++state.f[j * n + i];
            if (labels[a] == labels[b]) {
                ++state.d[i * n + j];
                ++state.d[j * n + i];
            }
        }
    }
    ++state.iterations_done;
}

/**
 * p = d / f where the pair was ever co-sampled, 0 otherwise.
 */
inline ProbabilityMatrix probability_matrix(const BootstrapState& state) {
    ProbabilityMatrix p{state.n, std::vector<double>(state.f.size(), 0.0)};
    for (std::size_t k = 0; k < state.f.size(); ++k) {
        if (state.f[k] > 0) {
            p.values[k] = static_cast<double>(state.d[k]) / static_cast<double>(state.f[k]);
        }
    }
    return p;
}

/**
 * Edge wherever p - omega > 0. The diagonal is always 0.
 */
inline Adjacency threshold_ordinal(const ProbabilityMatrix& p, double omega) {
    if (!(omega >= 0 && omega <= 1)) {
        throw InputError("threshold omega must lie in [0, 1]");
    }
    Adjacency adj{p.n, std::vector<std::uint8_t>(p.values.size(), 0)};
    for (std::size_t i = 0; i < p.n; ++i) {
        for (std::size_t j = 0; j < p.n; ++j) {
            if (i != j && p.values[i * p.n + j] - omega > 0) {
                adj.values[i * p.n + j] = 1;
            }
        }
    }
    return adj;
}

namespace internal {

class DisjointSets {
public:
    explicit DisjointSets(std::size_t n) : parent_(n) {
        std::iota(parent_.begin(), parent_.end(), 0);
    }

    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a != b) {
            if (a < b) {
                parent_[b] = a;
            } else {
                parent_[a] = b;
            }
        }
    }

private:
    std::vector<std::size_t> parent_;
};

}

/**
 * Connected components of the (undirected) adjacency; isolated vertices become singletons.
 */
inline Partition components_partition(const Adjacency& adj) {
    internal::DisjointSets sets(adj.n);
    for (std::size_t i = 0; i < adj.n; ++i) {
        for (std::size_t j = i + 1; j < adj.n; ++j) {
            if (adj.values[i * adj.n + j] || adj.values[j * adj.n + i]) {
                sets.unite(i, j);
            }
        }
    }
    Partition out;
    out.labels.resize(adj.n);
    for (std::size_t i = 0; i < adj.n; ++i) {
        out.labels[i] = sets.find(i);
    }
    return out.canonical();
}

/**
 * @brief Full resampling routine with checkpointing and early stopping.
 *
 * Iterations run in batches of `record_every`; a batch may be spread over
 * `threads` workers, each with its own counters, which are summed afterwards
 * so the result matches a serial run exactly.
 *
 * @param length Series length, needed only when the sample size is derived from q.
 */
inline BootstrapResult run_bootstrap(const CorrelationMatrix& corr, const BootstrapConfig& cfg, std::optional<std::size_t> length = std::nullopt) {
    const std::size_t n = corr.size();
    if (!(cfg.omega >= 0 && cfg.omega <= 1)) {
        throw InputError("threshold omega must lie in [0, 1]");
    }
    if (cfg.max_iterations == 0) {
        throw InputError("at least one bootstrap iteration is required");
    }
    if (cfg.record_every == 0) {
        throw InputError("record_every must be positive");
    }
    if (cfg.ground_truth && cfg.ground_truth->size() != n) {
        throw InputError("ground truth covers " + std::to_string(cfg.ground_truth->size()) + " objects, data has " + std::to_string(n));
    }

    BootstrapResult result;
    result.sample_size = resolve_sample_size(cfg, n, length);
    result.state = BootstrapState(n);

    std::optional<double> ari_stop = cfg.ari_stop;
    if (!ari_stop && cfg.ground_truth) {
        ari_stop = 0.9;
    }
    const std::size_t workers = std::max<std::size_t>(1, cfg.threads);

    auto checkpoint = [&]() -> bool {
        result.probabilities = probability_matrix(result.state);
        result.adjacency = threshold_ordinal(result.probabilities, cfg.omega);
        result.partition = components_partition(result.adjacency);

        TrajectoryPoint point{result.state.iterations_done, std::numeric_limits<double>::quiet_NaN(), result.adjacency.edge_count(), result.partition.cluster_count()};
        if (cfg.ground_truth) {
            point.ari = adjusted_rand_index(result.partition, *cfg.ground_truth).ari;
        }
        result.trajectory.push_back(point);

        if (ari_stop && cfg.ground_truth && point.ari >= *ari_stop) {
            result.stop_reason = "ari";
            return true;
        }
        if (cfg.plateau_stop && point.iteration >= 100) {
            for (auto it = result.trajectory.rbegin(); it != result.trajectory.rend(); ++it) {
                if (it->iteration + 100 <= point.iteration) {
                    const double before = static_cast<double>(it->edge_count);
                    const double change = std::abs(static_cast<double>(point.edge_count) - before) / std::max(1.0, before);
                    if (change < 1e-3) {
                        result.stop_reason = "plateau";
                        return true;
                    }
                    break;
                }
            }
        }
        return false;
    };

    std::size_t done = 0;
    while (done < cfg.max_iterations) {
        const std::size_t batch = std::min(cfg.record_every, cfg.max_iterations - done);
        if (workers == 1 || batch == 1) {
            for (std::size_t k = done; k < done + batch; ++k) {
                bootstrap_iteration(corr, result.state, result.sample_size, cfg.seed, k);
            }
        } else {
            const std::size_t used = std::min(workers, batch);
            std::vector<BootstrapState> partial(used, BootstrapState(n));
            std::vector<std::thread> pool;
            std::vector<std::exception_ptr> errors(used);
            for (std::size_t w = 0; w < used; ++w) {
                pool.emplace_back([&, w]() {
                    try {
                        for (std::size_t k = done + w; k < done + batch; k += used) {
                            bootstrap_iteration(corr, partial[w], result.sample_size, cfg.seed, k);
                        }
                    } catch (...) {
                        errors[w] = std::current_exception();
                    }
                });
            }
            for (auto& t : pool) {
                t.join();
            }
            for (auto& e : errors) {
                if (e) {
                    std::rethrow_exception(e);
                }
            }
            for (const auto& part : partial) {
                result.state.absorb(part);
            }
        }
        done += batch;

        if (checkpoint()) {
            return result;
        }
    }

    result.stop_reason = "max_iterations";
    return result;
}

/**
 * Convenience overload estimating correlations from `data`; q is interpreted against its column count.
 */
inline BootstrapResult run_bootstrap(const DataMatrix& data, const BootstrapConfig& cfg) {
    return run_bootstrap(estimate_correlation(data), cfg, data.cols());
}

}

#endif
