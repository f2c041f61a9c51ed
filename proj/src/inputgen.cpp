#include "fsim/inputgen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include <json.hpp>

#include "fsim/error.hpp"
#include "fsim/kernels.hpp"

namespace fsim {

using nlohmann::json;

namespace {

constexpr double kSeedMutationPercents[] = {5.0, 10.0, 25.0, 50.0, 100.0};

json ranges_json(const std::vector<ValueRange>& ranges) {
    json arr = json::array();
    for (const auto& r : ranges) arr.push_back({r.lo, r.hi});
    return arr;
}

} // namespace

void BrincParams::validate() const {
    if (!(mut_per > 0.0 && mut_per <= 100.0)) throw Error(ErrorCode::InvalidModel, "mutPer must lie in (0, 100]");
    if (!(distance >= 0.0)) throw Error(ErrorCode::InvalidModel, "distance must be non-negative");
    if (ranges.empty()) throw Error(ErrorCode::InvalidModel, "at least one range is required");
    for (const auto& r : ranges)
        if (!(r.lo < r.hi)) throw Error(ErrorCode::InvalidModel, "range bounds must satisfy lo < hi");
    if (max_mut == 0 || max_valid == 0) throw Error(ErrorCode::InvalidModel, "maxMut and maxValid must be positive");
}

InputCorpus gen_uniform(const Shape& shape, std::size_t m, ValueRange range, std::uint64_t seed) {
    RandomSource rng(seed);
    InputCorpus c;
    c.shape = shape;
    c.provenance = {CorpusMode::Uniform, seed, json{{"count", m}, {"lo", range.lo}, {"hi", range.hi}}.dump()};
    const auto flat = shape_product(shape);
    c.rows.reserve(m);
    for (std::size_t i = 0; i < m; ++i) {
        std::vector<double> v(flat);
        for (auto& e : v) e = rng.uniform(range.lo, range.hi);
        c.rows.emplace_back(shape, std::move(v));
    }
    return c;
}

std::size_t mutation_count(std::size_t flat_len, double mut_per) {
    const auto k = static_cast<std::size_t>(std::llround(mut_per / 100.0 * static_cast<double>(flat_len)));
    return std::clamp<std::size_t>(k, 1, flat_len);
}

Tensor mutate(const Tensor& input, ValueRange range, double mut_per, RandomSource& rng) {
    Tensor out = input;
    const auto k = mutation_count(input.size(), mut_per);
    for (auto idx : rng.sample_indices(input.size(), k)) out[idx] = rng.uniform(range.lo, range.hi);
    return out;
}

InputCorpus generate_seeds(const Model& model, const std::vector<ValueRange>& ranges, RandomSource& rng,
                           std::size_t max_seed_attempts, double min_separation) {
    if (ranges.empty()) throw Error(ErrorCode::InvalidModel, "seed generation needs at least one range");
    const auto meta = inspect_meta(model);
    const auto n = meta.n_classes;
    const auto width = n;

    std::vector<std::optional<Tensor>> slots(n);
    std::vector<double> kept; // prediction vectors of retained seeds
    std::size_t covered = 0;

    auto offer = [&](const Tensor& x) {
        const auto pred = expanded_prediction(forward(model, x), meta.output_activation);
        const auto label = label_of(pred, meta.output_activation);
        if (slots[label]) return;
        if (kernels::serial::nearest_distance(pred, kept, width) <= min_separation) return;
        slots[label] = x;
        kept.insert(kept.end(), pred.begin(), pred.end());
        ++covered;
    };

    Tensor walker(model.input_shape);
    offer(walker);
    {
        std::vector<double> v(walker.size());
        for (auto& e : v) e = rng.uniform(-1.0, 1.0);
        walker = Tensor(model.input_shape, std::move(v));
    }
    offer(walker);

    constexpr std::size_t cycle = std::size(kSeedMutationPercents);
    for (std::size_t attempt = 0; attempt < max_seed_attempts && covered < n; ++attempt) {
        const double pct = kSeedMutationPercents[attempt % cycle];
        const auto& range = ranges[(attempt / cycle) % ranges.size()];
        walker = mutate(walker, range, pct, rng);
        offer(walker);
    }

    for (std::size_t label = 0; label < n; ++label)
        if (!slots[label])
            throw Error(ErrorCode::LabelUnreachable, "label " + std::to_string(label) + " never predicted within " +
                                                         std::to_string(max_seed_attempts) + " seed mutations");

    InputCorpus c;
    c.shape = model.input_shape;
    c.provenance = {CorpusMode::Brinc, rng.seed(), "{}"};
    for (auto& s : slots) c.rows.push_back(std::move(*s));
    return c;
}

BrincRun brinc_run(const Model& model, const BrincParams& params, RandomSource& rng, std::size_t max_seed_attempts) {
    params.validate();
    const auto meta = inspect_meta(model);
    const auto n = meta.n_classes;

    BrincRun run;
    run.width = n;
    run.corpus = generate_seeds(model, params.ranges, rng, max_seed_attempts, params.distance);
    run.seed_count = run.corpus.size();
    run.corpus.provenance.params_json = json{{"mutPer", params.mut_per},
                                             {"distance", params.distance},
                                             {"ranges", ranges_json(params.ranges)},
                                             {"maxMut", params.max_mut},
                                             {"maxValid", params.max_valid}}
                                            .dump();

    std::vector<std::vector<std::size_t>> rows_by_label(n);
    std::vector<std::size_t> counts(n, 0);
    for (const auto& seed : run.corpus.rows) {
        auto pred = expanded_prediction(forward(model, seed), meta.output_activation);
        const auto label = label_of(pred, meta.output_activation);
        rows_by_label[label].push_back(run.labels.size());
        run.predictions.insert(run.predictions.end(), pred.begin(), pred.end());
        run.labels.push_back(label);
        ++counts[label];
    }

    for (std::size_t ri = 0; ri < params.ranges.size(); ++ri) {
        const auto& range = params.ranges[ri];
        std::size_t generated = 0;
        std::size_t no_new = 0;
        std::size_t attempts = 0;
        while (no_new <= params.max_mut && generated <= params.max_valid) {
            const auto least = static_cast<std::size_t>(std::min_element(counts.begin(), counts.end()) - counts.begin());
            const auto& pool = rows_by_label[least];
            const auto parent = pool[rng.below(pool.size())];
            Tensor mutant = mutate(run.corpus.rows[parent], range, params.mut_per, rng);
            auto pred = expanded_prediction(forward(model, mutant), meta.output_activation);
            const auto label = label_of(pred, meta.output_activation);
            ++attempts;

            const bool accept = label == least &&
                                kernels::parallel::nearest_distance(pred, run.predictions, run.width) > params.distance;
            if (accept) {
                rows_by_label[label].push_back(run.labels.size());
                run.predictions.insert(run.predictions.end(), pred.begin(), pred.end());
                run.labels.push_back(label);
                ++counts[label];
                run.corpus.rows.push_back(std::move(mutant));
                run.accepted.push_back({ri, least, parent});
                ++generated;
                no_new = 0;
            } else {
                ++no_new;
            }
        }
        run.attempts_per_range.push_back(attempts);
    }
    return run;
}

InputCorpus brinc_generate(const Model& model, const BrincParams& params, RandomSource& rng) {
    return brinc_run(model, params, rng).corpus;
}

std::vector<std::size_t> label_histogram(const Model& model, const InputCorpus& corpus) {
    const auto meta = inspect_meta(model);
    std::vector<std::size_t> counts(meta.n_classes, 0);
    if (corpus.rows.empty()) return counts;
    for (auto label : predict_labels(predict_batch(model, corpus))) ++counts[label];
    return counts;
}

} // namespace fsim
