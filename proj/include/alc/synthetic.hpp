#ifndef ALC_SYNTHETIC_HPP
#define ALC_SYNTHETIC_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "correlation_matrix.hpp"
#include "errors.hpp"
#include "partition.hpp"

namespace alc {

/**
 * @brief N x D matrix of observations, one row per object.
 */
class DataMatrix {
public:
    DataMatrix() = default;

    DataMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), values_(rows * cols, 0.0) {}

    DataMatrix(std::size_t rows, std::size_t cols, std::vector<double> values) : rows_(rows), cols_(cols), values_(std::move(values)) {
        if (values_.size() != rows_ * cols_) {
            throw InputError("data matrix expects " + std::to_string(rows_ * cols_) + " values, got " + std::to_string(values_.size()));
        }
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double operator()(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }
    double& operator()(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }

    std::span<const double> row(std::size_t r) const { return {values_.data() + r * cols_, cols_}; }
    std::span<double> row(std::size_t r) { return {values_.data() + r * cols_, cols_}; }

    const std::vector<double>& values() const { return values_; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> values_;
};

struct GeneratorSpec {
    std::vector<std::size_t> cluster_sizes;

    /**
     * One coupling per cluster, or a single value broadcast to every cluster.
     */
    std::vector<double> couplings;

    std::size_t length = 250;

    /**
     * Student-t degrees of freedom for the innovations (rescaled to unit
     * variance). Unset means standard normal innovations.
     */
    std::optional<double> df;

    std::uint64_t seed = 0;
};

struct GeneratedData {
    DataMatrix data;
    Partition truth;
};

namespace internal {

enum class Stream : std::uint32_t { white_noise = 1, factor = 2, idiosyncratic = 3 };

/*
 * Independent engine for (seed, stream, index) so that any row can be
 * generated without reference to the others.
 */
inline std::mt19937_64 stream_engine(std::uint64_t seed, Stream stream, std::uint64_t index) {
    std::seed_seq seq{
        static_cast<std::uint32_t>(seed & 0xffffffffu),
        static_cast<std::uint32_t>(seed >> 32),
        static_cast<std::uint32_t>(stream),
        static_cast<std::uint32_t>(index & 0xffffffffu),
        static_cast<std::uint32_t>(index >> 32)
    };
    return std::mt19937_64(seq);
}

/*
 * Unit-variance innovations: standard normal, or Student-t scaled by sqrt((df - 2) / df).
 */
class Innovation {
public:
    explicit Innovation(std::optional<double> df) : df_(df) {
        if (df_) {
            if (!(*df_ > 2)) {
                throw InputError("Student-t degrees of freedom must exceed 2 for finite variance, got " + std::to_string(*df_));
            }
            t_ = std::student_t_distribution<double>(*df_);
            scale_ = std::sqrt((*df_ - 2) / *df_);
        }
    }

    template<class Rng_>
    double operator()(Rng_& rng) {
        if (df_) {
            return scale_ * t_(rng);
        }
        return normal_(rng);
    }

private:
    std::optional<double> df_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::student_t_distribution<double> t_{3.0};
    double scale_ = 1;
};

inline void fill_row(std::span<double> row, std::uint64_t seed, Stream stream, std::uint64_t index, std::optional<double> df) {
    auto engine = stream_engine(seed, stream, index);
    Innovation draw(df);
    for (auto& x : row) {
        x = draw(engine);
    }
}

}

/**
 * Uncorrelated Student-t noise with unit variance, one independent series per row.
 */
inline DataMatrix gen_white_noise(std::size_t n, std::size_t length, double df, std::uint64_t seed) {
    if (n == 0 || length == 0) {
        throw InputError("white noise needs at least one row and one column");
    }
    internal::Innovation check(df); // validates df before any allocation

    DataMatrix out(n, length);
    for (std::size_t i = 0; i < n; ++i) {
        internal::fill_row(out.row(i), seed, internal::Stream::white_noise, i, df);
    }
    return out;
}

/**
 * @brief One-factor correlated series with planted clusters.
 *
 * Object i in cluster s has
 *
 *     x_i(d) = (sqrt(g_s) eta_s(d) + eps_i(d)) / sqrt(1 + g_s)
 *
 * with independent unit-variance cluster factors eta and object noise eps,
 * so members of one cluster have correlation g_s / (1 + g_s). Rows are laid
 * out cluster by cluster.
 */
inline GeneratedData gen_correlated(const GeneratorSpec& spec) {
    const std::size_t num_clusters = spec.cluster_sizes.size();
    if (num_clusters == 0) {
        throw InputError("at least one cluster size is required");
    }
    if (spec.length == 0) {
        throw InputError("series length must be positive");
    }
    if (spec.couplings.size() != num_clusters && spec.couplings.size() != 1) {
        throw InputError("expected 1 or " + std::to_string(num_clusters) + " couplings, got " + std::to_string(spec.couplings.size()));
    }

    std::vector<double> couplings(num_clusters);
    std::size_t total = 0;
    for (std::size_t s = 0; s < num_clusters; ++s) {
        couplings[s] = spec.couplings.size() == 1 ? spec.couplings[0] : spec.couplings[s];
        if (!(couplings[s] >= 0) || !std::isfinite(couplings[s])) {
            throw InputError("coupling for cluster " + std::to_string(s) + " must be a finite non-negative number");
        }
        if (spec.cluster_sizes[s] == 0) {
            throw InputError("cluster " + std::to_string(s) + " has size zero");
        }
        total += spec.cluster_sizes[s];
    }
    if (spec.df) {
        internal::Innovation check(spec.df);
    }

    const std::size_t length = spec.length;
    std::vector<double> factors(num_clusters * length);
    for (std::size_t s = 0; s < num_clusters; ++s) {
        internal::fill_row(std::span<double>(factors.data() + s * length, length), spec.seed, internal::Stream::factor, s, spec.df);
    }

    GeneratedData out{DataMatrix(total, length), Partition()};
    out.truth.labels.resize(total);

    std::size_t i = 0;
    for (std::size_t s = 0; s < num_clusters; ++s) {
        const double loading = std::sqrt(couplings[s]);
        const double norm = 1 / std::sqrt(1 + couplings[s]);
        const double* eta = factors.data() + s * length;
        for (std::size_t k = 0; k < spec.cluster_sizes[s]; ++k, ++i) {
            auto row = out.data.row(i);
            internal::fill_row(row, spec.seed, internal::Stream::idiosyncratic, i, spec.df);
            for (std::size_t d = 0; d < length; ++d) {
                row[d] = (loading * eta[d] + row[d]) * norm;
            }
            out.truth.labels[i] = s;
        }
    }
    return out;
}

/**
 * @brief Pearson correlation between rows.
 *
 * Each row is centred and scaled to unit norm, then C = Z Z^T. Entries are
 * clipped to [-1, 1] and the diagonal set to 1.
 */
inline CorrelationMatrix estimate_correlation(const DataMatrix& data) {
    const std::size_t n = data.rows();
    const std::size_t length = data.cols();
    if (n == 0) {
        throw InputError("cannot estimate correlations of an empty data matrix");
    }
    if (length < 2) {
        throw InputError("at least two observations per series are needed to estimate correlations");
    }

    using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    RowMatrix z(n, length);
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = data.row(i);
        double mean = 0;
        for (auto x : row) {
            if (!std::isfinite(x)) {
                throw InputError("non-finite value in series " + std::to_string(i));
            }
            mean += x;
        }
        mean /= static_cast<double>(length);

        double ss = 0;
        for (std::size_t d = 0; d < length; ++d) {
            const double centred = row[d] - mean;
            z(i, d) = centred;
            ss += centred * centred;
        }

        // Constant rows leave only round-off after centring.
        const double floor = 1e-14 * std::max(1.0, std::abs(mean));
        if (!(ss > static_cast<double>(length) * floor * floor)) {
            throw DegenerateSeriesError(i, "series " + std::to_string(i) + " has zero variance; its correlations are undefined");
        }
        z.row(i) /= std::sqrt(ss);
    }

    RowMatrix product(n, n);
    product.noalias() = z * z.transpose();

    std::vector<double> values(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            double v = i == j ? 1.0 : std::max(-1.0, std::min(1.0, 0.5 * (product(i, j) + product(j, i))));
            values[i * n + j] = v;
            values[j * n + i] = v;
        }
    }
    return CorrelationMatrix(n, std::move(values));
}

/**
 * Natural-log differences along each row, for converting price levels to returns.
 * The output has one column fewer than the input.
 */
inline DataMatrix log_returns(const DataMatrix& prices) {
    if (prices.cols() < 2) {
        throw InputError("log returns need at least two observations per series");
    }
    DataMatrix out(prices.rows(), prices.cols() - 1);
    for (std::size_t i = 0; i < prices.rows(); ++i) {
        const auto row = prices.row(i);
        for (std::size_t d = 0; d + 1 < row.size(); ++d) {
            if (!(row[d] > 0) || !(row[d + 1] > 0)) {
                throw InputError("log returns need positive prices; row " + std::to_string(i) + " column " + std::to_string(row[d] > 0 ? d + 1 : d) + " is not");
            }
            out(i, d) = std::log(row[d + 1] / row[d]);
        }
    }
    return out;
}

}

#endif
