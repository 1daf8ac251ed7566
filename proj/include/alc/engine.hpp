#ifndef ALC_ENGINE_HPP
#define ALC_ENGINE_HPP

#include <algorithm>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "correlation_matrix.hpp"
#include "errors.hpp"
#include "likelihood.hpp"
#include "partition.hpp"

/**
 * @file engine.hpp
 *
 * @brief Greedy agglomerative maximisation of the cluster likelihood.
 *
 * Starting from singletons, an initiator cluster is drawn from the active
 * queue and merged with whichever current cluster gives the largest
 * likelihood gain. If no gain exceeds the merge threshold the initiator
 * leaves the queue for good, though it stays available as a merge partner.
 * Each merged cluster gets a fresh label and joins the queue. The run ends
 * when the queue is empty.
 *
 * Cluster-level correlation sums are kept in a dense matrix that is updated
 * by row addition on every merge, so each candidate evaluation is O(1).
 */

namespace alc {

using Label = std::size_t;

struct EngineConfig {
    std::uint64_t seed = 0;

    /**
     * Take initiators in ascending label order instead of drawing them at random.
     */
    bool deterministic_order = false;

    double epsilon_merge = default_epsilon_merge;
};

struct MergeCandidate {
    Label partner;
    double delta;
    bool clamped;
};

struct ClusterResult {
    Partition partition;
    double likelihood = 0;
    std::size_t merges = 0;
    std::vector<std::string> warnings;
    double elapsed = 0;
};

class EngineState {
public:
    static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

    /**
     * Singleton configuration: label i holds object i and every object is an initiator.
     */
    static EngineState init(const CorrelationMatrix& corr) {
        if (corr.size() < 2) {
            throw InputError("clustering needs at least two objects");
        }

        EngineState state;
        const std::size_t n = corr.size();
        state.n_ = n;
        state.agg_ = corr.values();

        state.members_.resize(n);
        state.stats_.resize(n);
        state.own_.resize(n);
        state.label_of_slot_.resize(n);
        state.slot_of_label_.assign(2 * n - 1, npos);
        state.live_.resize(n);
        state.live_pos_.resize(n);
        state.queue_pos_.assign(2 * n - 1, npos);

        for (std::size_t i = 0; i < n; ++i) {
            state.members_[i] = {i};
            state.stats_[i] = ClusterStats{1, 1.0};
            state.label_of_slot_[i] = i;
            state.slot_of_label_[i] = i;
            state.live_[i] = i;
            state.live_pos_[i] = i;
            state.enqueue(i);
        }
        state.next_label_ = n;
        return state;
    }

    std::size_t object_count() const { return n_; }

    std::size_t cluster_count() const { return live_.size(); }

    Label next_label() const { return next_label_; }

    bool is_current(Label label) const {
        return label < slot_of_label_.size() && slot_of_label_[label] != npos;
    }

    /**
     * Current labels in ascending order.
     */
    std::vector<Label> labels() const {
        std::vector<Label> out;
        out.reserve(live_.size());
        for (auto s : live_) {
            out.push_back(label_of_slot_[s]);
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    const std::vector<std::size_t>& members(Label label) const { return members_[slot(label)]; }

    ClusterStats stats(Label label) const { return stats_[slot(label)]; }

    /**
     * Aggregated correlation between two current clusters; the correlation sum c_a when a == b.
     */
    double aggregated(Label a, Label b) const { return agg_[slot(a) * n_ + slot(b)]; }

    /**
     * Sum of the cached per-cluster likelihoods, i.e. the likelihood of the current partition.
     */
    double likelihood() const {
        double total = 0;
        for (auto s : live_) {
            total += own_[s].value;
        }
        return total;
    }

    bool any_clamped() const {
        for (auto s : live_) {
            if (own_[s].clamped) {
                return true;
            }
        }
        return false;
    }

    /**
     * Canonicalised partition of the objects under the current tracker.
     */
    Partition partition() const {
        std::vector<std::size_t> labels(n_);
        for (auto s : live_) {
            for (auto i : members_[s]) {
                labels[i] = label_of_slot_[s];
            }
        }
        return Partition(std::move(labels)).canonical();
    }

    const std::vector<Label>& active_queue() const { return queue_; }

    bool is_active(Label label) const { return label < queue_pos_.size() && queue_pos_[label] != npos; }

    /**
     * Best partner for `initiator` over all other current clusters. Ties go to
     * the smaller partner label; candidates outside the likelihood's domain
     * are skipped.
     *
     * @return The partner and its gain, or nothing if no gain exceeds `epsilon_merge`.
     */
    std::optional<MergeCandidate> best_merge(Label initiator, double epsilon_merge = default_epsilon_merge) const {
        const std::size_t si = slot(initiator);
        const auto& own_i = own_[si];
        const std::size_t size_i = stats_[si].size;
        const double sum_i = stats_[si].correlation_sum;
        const double* row = agg_.data() + si * n_;

        double best_delta = -std::numeric_limits<double>::infinity();
        Label best_label = npos;
        bool best_clamped = false;

        LikelihoodValue merged;
        for (auto st : live_) {
            if (st == si) {
                continue;
            }
            const auto& t = stats_[st];
            if (!internal::try_cluster_likelihood(size_i + t.size, sum_i + t.correlation_sum + 2 * row[st], merged)) {
                continue;
            }
            const double delta = merged.value - own_i.value - own_[st].value;
            const Label candidate = label_of_slot_[st];
            if (delta > best_delta || (delta == best_delta && candidate < best_label)) {
                best_delta = delta;
                best_label = candidate;
                best_clamped = merged.clamped;
            }
        }

        if (best_label == npos || !(best_delta > epsilon_merge)) {
            return std::nullopt;
        }
        return MergeCandidate{best_label, best_delta, best_clamped};
    }

    /**
     * Merge clusters `a` and `b` into a new cluster with label `next_label()`.
     * Members of `a` come first. Both constituents leave the active queue and
     * the new label joins it.
     */
    Label apply_merge(Label a, Label b) {
        if (a == b) {
            throw InternalError("cannot merge cluster " + std::to_string(a) + " with itself");
        }
        const std::size_t sa = slot(a);
        const std::size_t sb = slot(b);

        double* row_a = agg_.data() + sa * n_;
        const double* row_b = agg_.data() + sb * n_;
        const double cross = row_a[sb];
        for (auto st : live_) {
            if (st == sa || st == sb) {
                continue;
            }
            row_a[st] += row_b[st];
            agg_[st * n_ + sa] = row_a[st];
        }
        row_a[sa] = row_a[sa] + row_b[sb] + 2 * cross;

        stats_[sa] = ClusterStats{stats_[sa].size + stats_[sb].size, row_a[sa]};
        LikelihoodValue merged;
        if (!internal::try_cluster_likelihood(stats_[sa].size, stats_[sa].correlation_sum, merged)) {
            // A merge the optimiser would never pick; keep the state usable anyway.
            merged = LikelihoodValue{-std::numeric_limits<double>::infinity(), false};
        }
        own_[sa] = merged;

        auto& dest = members_[sa];
        auto& src = members_[sb];
        dest.insert(dest.end(), src.begin(), src.end());
        src.clear();
        src.shrink_to_fit();

        const std::size_t pos_b = live_pos_[sb];
        live_[pos_b] = live_.back();
        live_pos_[live_[pos_b]] = pos_b;
        live_.pop_back();
        live_pos_[sb] = npos;

        dequeue(a);
        dequeue(b);
        slot_of_label_[a] = npos;
        slot_of_label_[b] = npos;

        const Label k = next_label_++;
        label_of_slot_[sa] = k;
        label_of_slot_[sb] = npos;
        slot_of_label_[k] = sa;
        enqueue(k);
        return k;
    }

    /**
     * Remove `label` from the initiator queue; it remains a candidate partner.
     */
    void deactivate(Label label) {
        slot(label);
        dequeue(label);
    }

    /**
     * Pick the next initiator: uniformly at random, or the smallest label when `ascending`.
     */
    template<class Rng_>
    Label next_initiator(Rng_& rng, bool ascending) const {
        if (queue_.empty()) {
            throw InternalError("initiator requested from an empty queue");
        }
        if (ascending) {
            return *std::min_element(queue_.begin(), queue_.end());
        }
        std::uniform_int_distribution<std::size_t> dist(0, queue_.size() - 1);
        return queue_[dist(rng)];
    }

private:
    std::size_t slot(Label label) const {
        if (!is_current(label)) {
            throw InternalError("label " + std::to_string(label) + " is not a current cluster");
        }
        return slot_of_label_[label];
    }

    void enqueue(Label label) {
        queue_pos_[label] = queue_.size();
        queue_.push_back(label);
    }

    void dequeue(Label label) {
        const std::size_t pos = queue_pos_[label];
        if (pos == npos) {
            return;
        }
        queue_[pos] = queue_.back();
        queue_pos_[queue_[pos]] = pos;
        queue_.pop_back();
        queue_pos_[label] = npos;
    }

    std::size_t n_ = 0;

    // Row-major n x n, indexed by slot. Merged clusters reuse the first constituent's slot.
    std::vector<double> agg_;

    std::vector<std::vector<std::size_t> > members_;
    std::vector<ClusterStats> stats_;
    std::vector<LikelihoodValue> own_;

    std::vector<Label> label_of_slot_;
    std::vector<std::size_t> slot_of_label_;
    std::vector<std::size_t> live_;
    std::vector<std::size_t> live_pos_;

    std::vector<Label> queue_;
    std::vector<std::size_t> queue_pos_;
    Label next_label_ = 0;
};

/**
 * Called after every merge with the updated state, the merge's gain, and the new label.
 */
using MergeObserver = std::function<void(const EngineState&, double delta, Label merged)>;

/**
 * Run the optimiser to completion on `corr`.
 */
inline ClusterResult run(const CorrelationMatrix& corr, const EngineConfig& cfg = {}, const MergeObserver& observer = {}) {
    if (!(cfg.epsilon_merge >= 0)) {
        throw InputError("epsilon_merge must be non-negative");
    }

    const auto start = std::chrono::steady_clock::now();
    auto state = EngineState::init(corr);
    std::mt19937_64 rng(cfg.seed);

    ClusterResult result;
    bool clamp_seen = false;
    while (!state.active_queue().empty()) {
        const Label initiator = state.next_initiator(rng, cfg.deterministic_order);
        const auto best = state.best_merge(initiator, cfg.epsilon_merge);
        if (!best) {
            state.deactivate(initiator);
            continue;
        }
        const Label k = state.apply_merge(initiator, best->partner);
        ++result.merges;
        clamp_seen = clamp_seen || best->clamped;
        if (observer) {
            observer(state, best->delta, k);
        }
    }

    result.partition = state.partition();
    result.likelihood = state.likelihood();
    if (clamp_seen || state.any_clamped()) {
        result.warnings.push_back("clamped: a cluster reached the perfect-correlation bound (duplicate series); its likelihood was evaluated at c = n^2 (1 - 1e-12)");
    }
    result.elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

}

#endif
