#ifndef ALC_CORRELATION_MATRIX_HPP
#define ALC_CORRELATION_MATRIX_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace alc {

/**
 * @brief Dense symmetric correlation matrix with unit diagonal.
 *
 * Entries are stored row-major. Construction validates symmetry, the unit
 * diagonal and the [-1, 1] range; small asymmetries (within `tolerance`) are
 * averaged away and the diagonal is set to exactly 1.
 */
class CorrelationMatrix {
public:
    static constexpr double tolerance = 1e-9;

    CorrelationMatrix() = default;

    CorrelationMatrix(std::size_t n, std::vector<double> entries) : n_(n), values_(std::move(entries)) {
        if (n_ == 0) {
            throw InputError("correlation matrix must have at least one row");
        }
        if (values_.size() != n_ * n_) {
            throw InputError("correlation matrix expects " + std::to_string(n_ * n_) + " entries, got " + std::to_string(values_.size()));
        }

        for (std::size_t i = 0; i < n_; ++i) {
            double& diag = values_[i * n_ + i];
            if (!std::isfinite(diag) || std::abs(diag - 1.0) > tolerance) {
                throw InputError("correlation matrix diagonal entry (" + std::to_string(i) + ", " + std::to_string(i) + ") is not 1");
            }
            diag = 1.0;

            for (std::size_t j = i + 1; j < n_; ++j) {
                double& upper = values_[i * n_ + j];
                double& lower = values_[j * n_ + i];
                if (!std::isfinite(upper) || !std::isfinite(lower)) {
                    throw InputError("non-finite correlation at (" + std::to_string(i) + ", " + std::to_string(j) + ")");
                }
                if (std::abs(upper - lower) > tolerance) {
                    throw InputError("correlation matrix is not symmetric at (" + std::to_string(i) + ", " + std::to_string(j) + ")");
                }
                double mean = 0.5 * (upper + lower);
                if (mean > 1.0 + tolerance || mean < -1.0 - tolerance) {
                    throw InputError("correlation at (" + std::to_string(i) + ", " + std::to_string(j) + ") is outside [-1, 1]");
                }
                mean = std::max(-1.0, std::min(1.0, mean));
                upper = mean;
                lower = mean;
            }
        }
    }

    static CorrelationMatrix identity(std::size_t n) {
        std::vector<double> values(n * n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            values[i * n + i] = 1.0;
        }
        return CorrelationMatrix(n, std::move(values));
    }

    std::size_t size() const { return n_; }

    double operator()(std::size_t i, std::size_t j) const { return values_[i * n_ + j]; }

    std::span<const double> row(std::size_t i) const { return {values_.data() + i * n_, n_}; }

    const std::vector<double>& values() const { return values_; }

    /**
     * @param indices Rows/columns to keep, in the order they should appear.
     * @return The principal sub-matrix on `indices`.
     */
    CorrelationMatrix submatrix(std::span<const std::size_t> indices) const {
        const std::size_t m = indices.size();
        std::vector<double> out(m * m);
        for (std::size_t a = 0; a < m; ++a) {
            if (indices[a] >= n_) {
                throw InputError("submatrix index " + std::to_string(indices[a]) + " out of range");
            }
            const double* src = values_.data() + indices[a] * n_;
            double* dest = out.data() + a * m;
            for (std::size_t b = 0; b < m; ++b) {
                dest[b] = src[indices[b]];
            }
        }
        CorrelationMatrix sub;
        sub.n_ = m;
        sub.values_ = std::move(out);
        return sub;
    }

private:
    std::size_t n_ = 0;
    std::vector<double> values_;
};

}

#endif
