#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace fsim {

/// m x n row-major matrix of output probability vectors, one row per input.
/// When `sigmoid_expanded` is set the matrix came from a single-unit sigmoid
/// head: column 1 holds the raw p and column 0 holds 1 - p.
struct PredictionMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> values;
    bool sigmoid_expanded = false;

    double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
    std::span<const double> row(std::size_t r) const { return {values.data() + r * cols, cols}; }
    std::vector<double> column(std::size_t c) const;

    /// Columns carrying independent information: the raw p column for
    /// sigmoid-sourced matrices, all columns otherwise.
    std::vector<std::size_t> informative_columns() const;

    bool operator==(const PredictionMatrix&) const = default;
};

/// Vertical concatenation; both matrices must have the same width and origin.
PredictionMatrix vconcat(const PredictionMatrix& top, const PredictionMatrix& bottom);

} // namespace fsim
