#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "fsim/corpus.hpp"
#include "fsim/model.hpp"
#include "fsim/random.hpp"

namespace fsim {

struct ValueRange {
    double lo = -1.0;
    double hi = 1.0;
    bool operator==(const ValueRange&) const = default;
};

/// Balanced-generation knobs; defaults are the suggested values.
struct BrincParams {
    double mut_per = 5.0;    // percent of input values resampled per mutation
    double distance = 0.001; // minimum Euclidean gap between prediction vectors
    std::vector<ValueRange> ranges{{-1.0, 0.0}, {0.0, 1.0}, {-1.0, 1.0}};
    std::size_t max_mut = 300;    // consecutive rejections tolerated per range
    std::size_t max_valid = 1000; // accepted mutants per range

    void validate() const;
};

inline constexpr std::size_t kDefaultSeedAttempts = 10000;

InputCorpus gen_uniform(const Shape& shape, std::size_t m, ValueRange range, std::uint64_t seed);

/// Resamples max(1, round(mut_per% of the flat length)) distinct positions.
Tensor mutate(const Tensor& input, ValueRange range, double mut_per, RandomSource& rng);
std::size_t mutation_count(std::size_t flat_len, double mut_per);

/// One input per output class, each predicted to its class, in class order.
/// Retained seeds are also kept more than `min_separation` apart in
/// prediction space.
InputCorpus generate_seeds(const Model& model, const std::vector<ValueRange>& ranges, RandomSource& rng,
                           std::size_t max_seed_attempts = kDefaultSeedAttempts, double min_separation = 0.0);

struct BrincAcceptance {
    std::size_t range_index;
    std::size_t target_label; // least frequent label when the mutant was drawn
    std::size_t parent_row;
};

/// Full trace of a balanced generation run.
struct BrincRun {
    InputCorpus corpus;
    std::vector<std::size_t> labels;   // reference label of each corpus row
    std::vector<double> predictions;   // expanded prediction vectors, row-major
    std::size_t width = 0;             // prediction vector length
    std::size_t seed_count = 0;
    std::vector<BrincAcceptance> accepted;
    std::vector<std::size_t> attempts_per_range;
};

BrincRun brinc_run(const Model& model, const BrincParams& params, RandomSource& rng,
                   std::size_t max_seed_attempts = kDefaultSeedAttempts);

InputCorpus brinc_generate(const Model& model, const BrincParams& params, RandomSource& rng);

std::vector<std::size_t> label_histogram(const Model& model, const InputCorpus& corpus);

} // namespace fsim
