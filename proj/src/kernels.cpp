#include "fsim/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace fsim::kernels {

std::vector<double> fractional_ranks(std::span<const double> v) {
    const std::size_t n = v.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });

    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i + 1;
        while (j < n && v[order[j]] == v[order[i]]) ++j;
        // positions i..j-1 (0-based) share the mean of 1-based ranks i+1..j
        const double mean_rank = 0.5 * static_cast<double>(i + 1 + j);
        for (std::size_t k = i; k < j; ++k) ranks[order[k]] = mean_rank;
        i = j;
    }
    return ranks;
}

double pearson(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) return 0.0;
    const double r = sxy / std::sqrt(sxx * syy);
    return std::clamp(r, -1.0, 1.0);
}

namespace {

// Column-major, centred copy of a row-major m x p block.
std::vector<double> centred_columns(std::span<const double> x, std::size_t p, std::size_t m) {
    std::vector<double> cols(p * m);
    for (std::size_t c = 0; c < p; ++c) {
        double mean = 0.0;
        for (std::size_t r = 0; r < m; ++r) mean += x[r * p + c];
        mean /= static_cast<double>(m);
        for (std::size_t r = 0; r < m; ++r) cols[c * m + r] = x[r * p + c] - mean;
    }
    return cols;
}

double dot(const double* a, const double* b, std::size_t m) {
    double acc = 0.0;
    for (std::size_t r = 0; r < m; ++r) acc += a[r] * b[r];
    return acc;
}

double squared_distance(const double* a, const double* b, std::size_t width) {
    double acc = 0.0;
    for (std::size_t k = 0; k < width; ++k) {
        const double d = a[k] - b[k];
        acc += d * d;
    }
    return acc;
}

std::vector<double> column(std::span<const double> x, std::size_t m, std::size_t n, std::size_t c) {
    std::vector<double> out(m);
    for (std::size_t r = 0; r < m; ++r) out[r] = x[r * n + c];
    return out;
}

double column_spearman(std::span<const double> x, std::span<const double> y, std::size_t m, std::size_t n,
                       std::size_t c) {
    const auto rx = fractional_ranks(column(x, m, n, c));
    const auto ry = fractional_ranks(column(y, m, n, c));
    return pearson(rx, ry);
}

} // namespace

namespace serial {

std::vector<double> cross_covariance(std::span<const double> x, std::size_t p,
                                     std::span<const double> y, std::size_t q, std::size_t m) {
    const auto cx = centred_columns(x, p, m);
    const auto cy = centred_columns(y, q, m);
    const double denom = static_cast<double>(m - 1);
    std::vector<double> cov(p * q);
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = 0; j < q; ++j) cov[i * q + j] = dot(&cx[i * m], &cy[j * m], m) / denom;
    return cov;
}

double nearest_distance(std::span<const double> probe, std::span<const double> pool, std::size_t width) {
    const std::size_t rows = width ? pool.size() / width : 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < rows; ++r)
        best = std::min(best, squared_distance(probe.data(), pool.data() + r * width, width));
    return std::sqrt(best);
}

std::vector<double> column_rank_correlations(std::span<const double> x, std::span<const double> y,
                                             std::size_t m, std::size_t n) {
    std::vector<double> out(n);
    for (std::size_t c = 0; c < n; ++c) out[c] = column_spearman(x, y, m, n, c);
    return out;
}

} // namespace serial

namespace parallel {

std::vector<double> cross_covariance(std::span<const double> x, std::size_t p,
                                     std::span<const double> y, std::size_t q, std::size_t m) {
    const auto cx = centred_columns(x, p, m);
    const auto cy = centred_columns(y, q, m);
    const double denom = static_cast<double>(m - 1);
    std::vector<double> cov(p * q);
    const auto cells = static_cast<long long>(p * q);
#pragma omp parallel for schedule(static)
    for (long long cell = 0; cell < cells; ++cell) {
        const auto i = static_cast<std::size_t>(cell) / q;
        const auto j = static_cast<std::size_t>(cell) % q;
        cov[static_cast<std::size_t>(cell)] = dot(&cx[i * m], &cy[j * m], m) / denom;
    }
    return cov;
}

double nearest_distance(std::span<const double> probe, std::span<const double> pool, std::size_t width) {
    const auto rows = static_cast<long long>(width ? pool.size() / width : 0);
    double best = std::numeric_limits<double>::infinity();
#pragma omp parallel for schedule(static) reduction(min : best) if (rows > 4096)
    for (long long r = 0; r < rows; ++r)
        best = std::min(best, squared_distance(probe.data(), pool.data() + static_cast<std::size_t>(r) * width, width));
    return std::sqrt(best);
}

std::vector<double> column_rank_correlations(std::span<const double> x, std::span<const double> y,
                                             std::size_t m, std::size_t n) {
    std::vector<double> out(n);
    const auto cols = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic)
    for (long long c = 0; c < cols; ++c)
        out[static_cast<std::size_t>(c)] = column_spearman(x, y, m, n, static_cast<std::size_t>(c));
    return out;
}

} // namespace parallel

} // namespace fsim::kernels
