#include <doctest.h>

#include <cmath>
#include <set>

#include "fsim/error.hpp"
#include "fsim/inputgen.hpp"
#include "fsim/metrics.hpp"
#include "fsim/zoo.hpp"
#include "helpers.hpp"

using namespace fsim;
using namespace fsim::zoo;

namespace {

LabeledDataset binary_blobs(std::uint64_t seed) { return make_blobs(2, 8, 100, 0.15, seed); }

} // namespace

TEST_CASE("make_blobs") {
    const auto ds = make_blobs(4, 16, 100, 0.15, 7);
    CHECK(ds.rows == 400);
    CHECK(ds.dim == 16);
    CHECK(ds.n_classes() == 4);
    std::vector<std::size_t> counts(4, 0);
    for (auto y : ds.y) ++counts[y];
    CHECK(counts == std::vector<std::size_t>(4, 100));
    for (auto v : ds.x) {
        CHECK(v > -1.0);
        CHECK(v < 1.0);
    }
    CHECK(make_blobs(4, 16, 100, 0.15, 7) == ds);
    CHECK(make_blobs(4, 16, 100, 0.15, 8) != ds);

    const auto wide = make_blobs(3, 2, 50, 2.0, 1);
    for (auto v : wide.x) CHECK(std::abs(v) < 1.0);
}

TEST_CASE("dataset csv round trip") {
    const auto ds = make_blobs(3, 4, 10, 0.2, 2);
    CHECK(dataset_from_csv(dataset_to_csv(ds)) == ds);
    const auto dir = testutil::temp_dir("dataset");
    save_dataset(ds, dir / "d.csv");
    CHECK(load_dataset(dir / "d.csv") == ds);
    CHECK_THROWS_AS(dataset_from_csv("f0,label\n1.0,abc\n"), Error);
}

TEST_CASE("training separates blobs") {
    const auto ds = make_blobs(4, 16, 100, 0.1, 3);
    TrainConfig cfg;
    cfg.epochs = 10;
    cfg.learning_rate = 0.05;
    const auto run = train_mlp_logged({16, 32, 4}, ds, cfg);
    CHECK(run.epoch_losses.size() == 10);
    CHECK(train_accuracy(run.model, ds) >= 0.95);
    CHECK_NOTHROW(validate(run.model));

    const auto bin = binary_blobs(4);
    const auto m = train_mlp({8, 8, 1}, bin, cfg);
    CHECK(inspect_meta(m).output_activation == OutputKind::Sigmoid);
    CHECK(train_accuracy(m, bin) >= 0.95);

    CHECK_THROWS_AS(train_mlp({15, 32, 4}, ds, cfg), Error);
    CHECK_THROWS_AS(train_mlp({16, 32, 5}, ds, cfg), Error);
}

TEST_CASE("zero epochs returns the initialisation") {
    const auto ds = make_blobs(3, 5, 20, 0.1, 1);
    TrainConfig cfg;
    cfg.epochs = 0;
    CHECK(train_mlp({5, 7, 3}, ds, cfg) == init_mlp({5, 7, 3}, cfg));
}

TEST_CASE("training is deterministic to the byte") {
    const auto ds = make_blobs(3, 6, 40, 0.1, 1);
    TrainConfig cfg;
    cfg.epochs = 3;
    const auto a = serialize_model(train_mlp({6, 10, 3}, ds, cfg));
    CHECK(a == serialize_model(train_mlp({6, 10, 3}, ds, cfg)));
    cfg.seed = 2;
    CHECK(a != serialize_model(train_mlp({6, 10, 3}, ds, cfg)));
}

TEST_CASE("analytic gradients match finite differences") {
    for (int variant = 0; variant < 3; ++variant) {
        const auto ds = variant == 2 ? binary_blobs(5) : make_blobs(3, 5, 20, 0.3, 5);
        const std::vector<std::size_t> sizes = variant == 0   ? std::vector<std::size_t>{5, 6, 3}
                                               : variant == 1 ? std::vector<std::size_t>{5, 6, 4, 3}
                                                              : std::vector<std::size_t>{8, 6, 1};
        TrainConfig cfg;
        cfg.seed = 10 + variant;
        // perturb the zero biases so every parameter is exercised away from 0
        auto m = init_mlp(sizes, cfg);
        auto params = flatten_params(m);
        RandomSource rng(20 + variant);
        for (auto& p : params) p += rng.uniform(-0.1, 0.1);
        m = with_params(m, params);

        const auto lg = loss_and_gradient(m, ds);
        CHECK(lg.loss == doctest::Approx(mean_loss(m, ds)).epsilon(1e-12));
        REQUIRE(lg.gradient.size() == params.size());
        const auto coords = rng.sample_indices(params.size(), std::min<std::size_t>(50, params.size()));
        const double h = 1e-5;
        for (auto i : coords) {
            auto up = params, down = params;
            up[i] += h;
            down[i] -= h;
            const double fd = (mean_loss(with_params(m, up), ds) - mean_loss(with_params(m, down), ds)) / (2 * h);
            const double rel = std::abs(fd - lg.gradient[i]) / std::max(1e-8, std::abs(fd) + std::abs(lg.gradient[i]));
            CHECK(rel <= 1e-4);
        }
    }
}

TEST_CASE("loss mostly decreases at a small learning rate") {
    const auto ds = make_blobs(4, 16, 100, 0.1, 9);
    TrainConfig cfg;
    cfg.epochs = 30;
    cfg.learning_rate = 0.01;
    const auto run = train_mlp_logged({16, 32, 4}, ds, cfg);
    std::size_t ok = 0;
    for (std::size_t e = 1; e < run.epoch_losses.size(); ++e) ok += run.epoch_losses[e] <= run.epoch_losses[e - 1];
    CHECK(static_cast<double>(ok) >= 0.9 * static_cast<double>(run.epoch_losses.size() - 1));
}

TEST_CASE("invert_binary") {
    const auto ds = binary_blobs(6);
    TrainConfig cfg;
    cfg.epochs = 5;
    const auto m = train_mlp({8, 6, 1}, ds, cfg);
    const auto inv = invert_binary(m);
    const auto twice = invert_binary(inv);
    RandomSource rng(3);
    for (int t = 0; t < 200; ++t) {
        const auto x = testutil::random_tensor({8}, rng);
        const double p = forward(m, x)[0];
        CHECK(std::abs(forward(inv, x)[0] - (1.0 - p)) <= 1e-12);
        CHECK(std::abs(forward(twice, x)[0] - p) <= 1e-12);
    }
    const auto corpus = gen_uniform({8}, 500, {-1, 1}, 4);
    const auto pa = predict_batch(m, corpus), pb = predict_batch(inv, corpus);
    CHECK(spearman_mean(pa, pb).score == doctest::Approx(-1.0));
    CHECK(overlap(predict_labels(pa), predict_labels(pb)) == 0.0);

    RandomSource mrng(1);
    try {
        invert_binary(testutil::random_mlp({4, 3}, mrng));
        FAIL("expected NotSigmoid");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NotSigmoid);
    }
}

TEST_CASE("label permutations") {
    const auto ds = make_blobs(4, 3, 10, 0.1, 1);
    CHECK(permute_labels(ds, {0, 1, 2, 3}) == ds);
    RandomSource rng(2);
    for (int t = 0; t < 50; ++t) {
        const auto d = random_derangement(4, rng);
        CHECK(std::set<std::size_t>(d.begin(), d.end()).size() == 4);
        for (std::size_t i = 0; i < 4; ++i) CHECK(d[i] != i);
        const auto p = permute_labels(ds, d);
        for (std::size_t r = 0; r < ds.rows; ++r) CHECK(p.y[r] != ds.y[r]);
        CHECK(permute_labels(p, invert_permutation(d)) == ds);
    }
    for (const auto& bad : {std::vector<std::size_t>{0, 0, 1, 2}, std::vector<std::size_t>{0, 1, 2},
                            std::vector<std::size_t>{0, 1, 2, 4}}) {
        try {
            permute_labels(ds, bad);
            FAIL("expected BadPermutation");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::BadPermutation);
        }
    }
}

TEST_CASE("box_stats") {
    const auto b = box_stats({5, 1, 3, 2, 4});
    CHECK(b.min == 1);
    CHECK(b.q1 == 2);
    CHECK(b.median == 3);
    CHECK(b.q3 == 4);
    CHECK(b.max == 5);
    CHECK(box_stats({1, 2, 3, 4}).median == 2.5);
}

TEST_CASE("a tiny sensitivity suite has the expected shape") {
    SensitivityConfig cfg;
    cfg.runs = 2;
    cfg.inputs = 300;
    cfg.train.epochs = 3;
    cfg.per_class = 30;
    const auto s = sensitivity_suite(cfg);
    CHECK(s.groups.size() == 6);
    CHECK(s.rows.size() == 6 * 2 * 3);
    const auto csv = sensitivity_csv(s);
    CHECK(csv.rfind("group,model_id,metric,run_index,score\n", 0) == 0);
    CHECK(sensitivity_summary_csv(s).find("twin") != std::string::npos);
    CHECK(s.scores("twin", Metric::Cca).size() == 2);
}
