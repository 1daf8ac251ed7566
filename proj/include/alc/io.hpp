#ifndef ALC_IO_HPP
#define ALC_IO_HPP

#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "correlation_matrix.hpp"
#include "errors.hpp"
#include "partition.hpp"
#include "synthetic.hpp"

/**
 * @file io.hpp
 *
 * @brief CSV input and output.
 *
 * Files are comma-separated with one object per row. A single header row is
 * allowed and detected by its first row containing a non-numeric cell. Every
 * parse error names the file, the 1-based line and the 1-based column.
 */

namespace alc {

class ParseError : public InputError {
public:
    using InputError::InputError;
};

namespace internal {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

inline std::vector<std::string_view> split_cells(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            cells.push_back(trim(line.substr(start)));
            break;
        }
        cells.push_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
    return cells;
}

inline std::optional<double> parse_double(std::string_view cell) {
    if (cell.empty()) {
        return std::nullopt;
    }
    if (cell.front() == '+') {
        cell.remove_prefix(1);
    }
    double value = 0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (ec != std::errc() || ptr != cell.data() + cell.size()) {
        return std::nullopt;
    }
    return value;
}

inline std::optional<std::size_t> parse_index(std::string_view cell) {
    if (cell.empty()) {
        return std::nullopt;
    }
    std::size_t value = 0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (ec != std::errc() || ptr != cell.data() + cell.size()) {
        return std::nullopt;
    }
    return value;
}

struct CsvLine {
    std::size_t number;
    std::string text;
};

inline std::vector<CsvLine> read_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot open '" + path + "' for reading");
    }
    std::vector<CsvLine> lines;
    std::string text;
    std::size_t number = 0;
    while (std::getline(in, text)) {
        ++number;
        if (trim(text).empty()) {
            continue;
        }
        lines.push_back(CsvLine{number, text});
    }
    return lines;
}

inline std::string location(const std::string& path, std::size_t line, std::size_t column) {
    return path + ": line " + std::to_string(line) + ", column " + std::to_string(column);
}

}

struct NumericTable {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> values;
    bool had_header = false;
};

/**
 * Parse a numeric CSV. Rejects ragged rows, non-numeric cells, empty cells and NaN/infinity.
 */
inline NumericTable read_numeric_csv(const std::string& path) {
    const auto lines = internal::read_lines(path);
    NumericTable table;
    std::size_t first = 0;

    if (!lines.empty()) {
        for (auto cell : internal::split_cells(lines[0].text)) {
            if (!internal::parse_double(cell)) {
                table.had_header = true;
                break;
            }
        }
        if (table.had_header) {
            first = 1;
        }
    }
    if (first >= lines.size()) {
        throw ParseError(path + ": no data rows");
    }

    for (std::size_t l = first; l < lines.size(); ++l) {
        const auto cells = internal::split_cells(lines[l].text);
        if (l == first) {
            table.cols = cells.size();
        } else if (cells.size() != table.cols) {
            throw ParseError(internal::location(path, lines[l].number, std::min(cells.size(), table.cols) + 1) + ": expected " + std::to_string(table.cols) + " values, found " + std::to_string(cells.size()));
        }
        for (std::size_t c = 0; c < cells.size(); ++c) {
            const auto value = internal::parse_double(cells[c]);
            if (!value) {
                throw ParseError(internal::location(path, lines[l].number, c + 1) + ": " + (cells[c].empty() ? std::string("missing value") : "non-numeric value '" + std::string(cells[c]) + "'"));
            }
            if (!std::isfinite(*value)) {
                throw ParseError(internal::location(path, lines[l].number, c + 1) + ": non-finite value '" + std::string(cells[c]) + "'");
            }
            table.values.push_back(*value);
        }
        ++table.rows;
    }
    return table;
}

inline DataMatrix read_data_csv(const std::string& path) {
    auto table = read_numeric_csv(path);
    return DataMatrix(table.rows, table.cols, std::move(table.values));
}

inline CorrelationMatrix read_correlation_csv(const std::string& path) {
    auto table = read_numeric_csv(path);
    if (table.rows != table.cols) {
        throw ParseError(path + ": correlation matrix must be square, got " + std::to_string(table.rows) + " x " + std::to_string(table.cols));
    }
    try {
        return CorrelationMatrix(table.rows, std::move(table.values));
    } catch (const InputError& e) {
        throw InputError(path + ": " + e.what());
    }
}

/**
 * @brief Read an `object_id,label` file.
 *
 * Object ids must be exactly 0..N-1, each once, in any order.
 *
 * @param expected_objects If set, the file must cover exactly this many objects.
 */
inline Partition read_labels_csv(const std::string& path, std::optional<std::size_t> expected_objects = std::nullopt) {
    const auto lines = internal::read_lines(path);
    std::size_t first = 0;
    if (!lines.empty()) {
        const auto cells = internal::split_cells(lines[0].text);
        if (cells.empty() || !internal::parse_index(cells[0])) {
            first = 1;
        }
    }

    constexpr auto unset = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> labels;
    for (std::size_t l = first; l < lines.size(); ++l) {
        const auto cells = internal::split_cells(lines[l].text);
        if (cells.size() != 2) {
            throw ParseError(internal::location(path, lines[l].number, 1) + ": expected 'object_id,label', found " + std::to_string(cells.size()) + " fields");
        }
        const auto id = internal::parse_index(cells[0]);
        if (!id) {
            throw ParseError(internal::location(path, lines[l].number, 1) + ": invalid object id '" + std::string(cells[0]) + "'");
        }
        const auto label = internal::parse_index(cells[1]);
        if (!label) {
            throw ParseError(internal::location(path, lines[l].number, 2) + ": invalid label '" + std::string(cells[1]) + "'");
        }
        if (*id >= labels.size()) {
            if (*id > 100'000'000) {
                throw ParseError(internal::location(path, lines[l].number, 1) + ": object id " + std::to_string(*id) + " is implausibly large");
            }
            labels.resize(*id + 1, unset);
        }
        if (labels[*id] != unset) {
            throw ParseError(internal::location(path, lines[l].number, 1) + ": object " + std::to_string(*id) + " appears more than once");
        }
        labels[*id] = *label;
    }

    const std::size_t n = expected_objects.value_or(labels.size());
    if (labels.size() > n) {
        throw InputError(path + ": object id " + std::to_string(labels.size() - 1) + " is outside the " + std::to_string(n) + " expected objects");
    }
    labels.resize(n, unset);
    for (std::size_t i = 0; i < n; ++i) {
        if (labels[i] == unset) {
            throw InputError(path + ": object " + std::to_string(i) + " is missing");
        }
    }
    if (n == 0) {
        throw ParseError(path + ": no labels");
    }
    return Partition(std::move(labels));
}

/**
 * Shortest decimal representation that round-trips to the same double.
 */
inline std::string format_double(double value) {
    char buffer[64];
    const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
    return std::string(buffer, ptr);
}

namespace internal {

inline std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw InputError("cannot open '" + path + "' for writing");
    }
    return out;
}

}

inline void write_data_csv(const std::string& path, const DataMatrix& data) {
    auto out = internal::open_output(path);
    std::string line;
    for (std::size_t i = 0; i < data.rows(); ++i) {
        line.clear();
        const auto row = data.row(i);
        for (std::size_t d = 0; d < row.size(); ++d) {
            if (d) {
                line += ',';
            }
            line += format_double(row[d]);
        }
        line += '\n';
        out << line;
    }
}

inline void write_correlation_csv(const std::string& path, const CorrelationMatrix& corr) {
    write_data_csv(path, DataMatrix(corr.size(), corr.size(), corr.values()));
}

inline void write_labels_csv(const std::string& path, const Partition& partition) {
    auto out = internal::open_output(path);
    out << "object_id,label\n";
    for (std::size_t i = 0; i < partition.size(); ++i) {
        out << i << ',' << partition.labels[i] << '\n';
    }
}

}

#endif
