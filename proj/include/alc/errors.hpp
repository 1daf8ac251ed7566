#ifndef ALC_ERRORS_HPP
#define ALC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace alc {

/**
 * Malformed or out-of-range input supplied by the caller
 * (bad indices, unparseable files, invalid parameters).
 */
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/**
 * A series with zero sample variance, for which Pearson correlation is undefined.
 */
class DegenerateSeriesError : public InputError {
public:
    DegenerateSeriesError(std::size_t row, const std::string& what)
        : InputError(what), row_(row) {}

    std::size_t row() const { return row_; }

private:
    std::size_t row_;
};

/**
 * Cluster statistics outside the domain where the likelihood is defined.
 */
class ConstraintViolation : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/**
 * Internal bookkeeping went wrong, e.g. a stale cluster label was used.
 */
class InternalError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}

#endif
