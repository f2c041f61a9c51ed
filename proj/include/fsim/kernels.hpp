#pragma once

// Data-parallel inner loops. Every kernel exists twice: `serial` is the
// reference kept for tests and benchmarks, `parallel` is the OpenMP build.
// Parallel kernels split work over independent outputs only (rows, column
// pairs, pool slices reduced with min), so their results are bit-identical
// to the serial ones under any thread count or schedule.

#include <cstddef>
#include <span>
#include <vector>

namespace fsim::kernels {

/// Fractional (average) 1-based ranks.
std::vector<double> fractional_ranks(std::span<const double> v);

/// Pearson correlation; 0 when either side has zero variance.
double pearson(std::span<const double> x, std::span<const double> y);

namespace serial {

template <typename Fn>
void for_each_index(std::size_t count, Fn&& fn) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
}

/// Column-centred covariance between the p columns of x and the q columns
/// of y (both row-major with m rows), divided by m - 1. Result is p x q.
std::vector<double> cross_covariance(std::span<const double> x, std::size_t p,
                                     std::span<const double> y, std::size_t q, std::size_t m);

/// Smallest Euclidean distance from probe to any width-long row of pool;
/// +inf for an empty pool.
double nearest_distance(std::span<const double> probe, std::span<const double> pool, std::size_t width);

/// Spearman rank correlation of each column pair x[:, i], y[:, i].
std::vector<double> column_rank_correlations(std::span<const double> x, std::span<const double> y,
                                             std::size_t m, std::size_t n);

} // namespace serial

namespace parallel {

template <typename Fn>
void for_each_index(std::size_t count, Fn&& fn) {
    const auto n = static_cast<long long>(count);
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < n; ++i) fn(static_cast<std::size_t>(i));
}

std::vector<double> cross_covariance(std::span<const double> x, std::size_t p,
                                     std::span<const double> y, std::size_t q, std::size_t m);

double nearest_distance(std::span<const double> probe, std::span<const double> pool, std::size_t width);

std::vector<double> column_rank_correlations(std::span<const double> x, std::span<const double> y,
                                             std::size_t m, std::size_t n);

} // namespace parallel

} // namespace fsim::kernels
