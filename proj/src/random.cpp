#include "fsim/random.hpp"

#include <cmath>
#include <numbers>
#include <unordered_set>

namespace fsim {

double RandomSource::unit_open() {
    // 53 random bits centred in their bucket: never 0, never 1.
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double RandomSource::uniform(double lo, double hi) {
    for (;;) {
        const double v = lo + (hi - lo) * unit_open();
        if (v > lo && v < hi) return v;
    }
}

std::size_t RandomSource::below(std::size_t n) {
    // Lemire's nearly-divisionless bounded integer.
    const std::uint64_t bound = n;
    unsigned __int128 m = static_cast<unsigned __int128>(engine_()) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
        const std::uint64_t threshold = (0 - bound) % bound;
        while (low < threshold) {
            m = static_cast<unsigned __int128>(engine_()) * bound;
            low = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::size_t>(m >> 64);
}

double RandomSource::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double u1 = unit_open();
    const double u2 = unit_open();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
}

std::vector<std::size_t> RandomSource::sample_indices(std::size_t n, std::size_t k) {
    std::vector<std::size_t> picked;
    picked.reserve(k);
    if (k * 4 >= n) {
        // Dense case: partial Fisher-Yates.
        std::vector<std::size_t> all(n);
        for (std::size_t i = 0; i < n; ++i) all[i] = i;
        for (std::size_t i = 0; i < k; ++i) {
            std::size_t j = i + below(n - i);
            std::swap(all[i], all[j]);
            picked.push_back(all[i]);
        }
        return picked;
    }
    std::unordered_set<std::size_t> seen;
    while (picked.size() < k) {
        std::size_t idx = below(n);
        if (seen.insert(idx).second) picked.push_back(idx);
    }
    return picked;
}

} // namespace fsim
