#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace fsim {

/// Seedable stream built on std::mt19937_64. The bit mapping from engine
/// output to doubles and integers is done here (not through the std
/// distributions) so streams are identical across standard libraries.
class RandomSource {
public:
    explicit RandomSource(std::uint64_t seed = 0) : seed_(seed), engine_(seed) {}

    std::uint64_t seed() const noexcept { return seed_; }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in the open interval (0, 1).
    double unit_open();

    /// Uniform strictly inside (lo, hi).
    double uniform(double lo, double hi);

    /// Uniform integer in [0, n). n must be > 0.
    std::size_t below(std::size_t n);

    /// Standard normal via Box-Muller.
    double normal();

    /// k distinct indices out of [0, n), in draw order.
    std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k);

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = below(i);
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

} // namespace fsim
