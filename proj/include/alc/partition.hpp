#ifndef ALC_PARTITION_HPP
#define ALC_PARTITION_HPP

#include <cstddef>
#include <limits>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace alc {

/**
 * @brief Assignment of each object to exactly one cluster.
 *
 * `labels[i]` is the cluster of object `i`. Labels are arbitrary non-negative
 * integers; `canonical()` relabels by order of first occurrence so that two
 * partitions that differ only by label permutation compare equal.
 */
struct Partition {
    std::vector<std::size_t> labels;

    Partition() = default;
    explicit Partition(std::vector<std::size_t> l) : labels(std::move(l)) {}

    static Partition singletons(std::size_t n) {
        Partition p;
        p.labels.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            p.labels[i] = i;
        }
        return p;
    }

    static Partition single_cluster(std::size_t n) {
        return Partition(std::vector<std::size_t>(n, 0));
    }

    /**
     * Build from explicit member lists. Every index in [0, n) must appear exactly once.
     */
    static Partition from_clusters(const std::vector<std::vector<std::size_t> >& clusters, std::size_t n) {
        constexpr auto unset = std::numeric_limits<std::size_t>::max();
        std::vector<std::size_t> labels(n, unset);
        for (std::size_t c = 0; c < clusters.size(); ++c) {
            for (auto i : clusters[c]) {
                if (i >= n) {
                    throw InputError("cluster member " + std::to_string(i) + " out of range for " + std::to_string(n) + " objects");
                }
                if (labels[i] != unset) {
                    throw InputError("object " + std::to_string(i) + " assigned to more than one cluster");
                }
                labels[i] = c;
            }
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (labels[i] == unset) {
                throw InputError("object " + std::to_string(i) + " is not assigned to any cluster");
            }
        }
        return Partition(std::move(labels));
    }

    std::size_t size() const { return labels.size(); }

    Partition canonical() const {
        Partition out;
        out.labels.resize(labels.size());
        std::unordered_map<std::size_t, std::size_t> mapping;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            auto it = mapping.try_emplace(labels[i], mapping.size()).first;
            out.labels[i] = it->second;
        }
        return out;
    }

    /**
     * Member lists in canonical label order; members ascending within each cluster.
     */
    std::vector<std::vector<std::size_t> > clusters() const {
        const auto canon = canonical();
        std::vector<std::vector<std::size_t> > out;
        for (std::size_t i = 0; i < canon.labels.size(); ++i) {
            const auto l = canon.labels[i];
            if (l >= out.size()) {
                out.resize(l + 1);
            }
            out[l].push_back(i);
        }
        return out;
    }

    std::size_t cluster_count() const { return clusters().size(); }

    bool same_as(const Partition& other) const {
        return canonical().labels == other.canonical().labels;
    }
};

}

#endif
