#include <doctest.h>

#include "fsim/compat.hpp"
#include "fsim/error.hpp"
#include "fsim/inputgen.hpp"
#include "helpers.hpp"

using namespace fsim;

namespace {

ModelMeta meta(Shape shape, std::size_t n, OutputKind kind = OutputKind::Softmax) {
    return {shape, shape_product(shape), n, kind};
}

} // namespace

TEST_CASE("flat_len") {
    CHECK(flat_len({28, 28}) == 784);
    CHECK(flat_len({4}) == 4);
    CHECK(flat_len({48, 48, 1}) == 2304);
}

TEST_CASE("check") {
    const auto r = check(meta({28, 28}, 10), meta({784}, 10));
    CHECK(r.input_compatible);
    CHECK(r.output_compatible);
    CHECK(r.reshape_required);
    CHECK(r.compatible());

    const auto classes = check(meta({784}, 10), meta({784}, 11));
    CHECK(classes.input_compatible);
    CHECK_FALSE(classes.output_compatible);
    CHECK(classes.reason.find("output incompatible") != std::string::npos);

    const auto sizes = check(meta({256, 256}, 10), meta({128, 128}, 10));
    CHECK_FALSE(sizes.input_compatible);
    CHECK_FALSE(sizes.reshape_required);

    const auto same = check(meta({784}, 10), meta({784}, 10));
    CHECK_FALSE(same.reshape_required);
    CHECK(same.reason.empty());

    // 2-class softmax and sigmoid heads are not comparable
    CHECK_FALSE(check(meta({26}, 2), meta({26}, 2, OutputKind::Sigmoid)).output_compatible);
}

TEST_CASE("check is symmetric in its booleans") {
    RandomSource rng(4);
    const std::vector<Shape> shapes{{784}, {28, 28}, {1, 28, 28}, {10}, {2, 5}, {256, 256}};
    for (int i = 0; i < 200; ++i) {
        const auto a = meta(shapes[rng.below(shapes.size())], 2 + rng.below(3),
                            rng.below(2) ? OutputKind::Softmax : OutputKind::Sigmoid);
        const auto b = meta(shapes[rng.below(shapes.size())], 2 + rng.below(3),
                            rng.below(2) ? OutputKind::Softmax : OutputKind::Sigmoid);
        const auto ab = check(a, b), ba = check(b, a);
        CHECK(ab.input_compatible == ba.input_compatible);
        CHECK(ab.output_compatible == ba.output_compatible);
        CHECK(ab.reshape_required == ba.reshape_required);
    }
}

TEST_CASE("adapt_input") {
    std::vector<double> v(784);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<double>(i);
    const auto x = Tensor::vector(v);
    const auto img = adapt_input(x, {28, 28});
    CHECK(img.shape() == Shape{28, 28});
    CHECK(img.values() == v);
    CHECK(adapt_input(img, {784}) == x);
    CHECK(adapt_input(x, {784}) == x);
    try {
        adapt_input(Tensor(Shape{783}), {28, 28});
        FAIL("expected failure");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ShapeMismatch);
    }
}

TEST_CASE("compatible pairs can both be driven by one corpus") {
    RandomSource rng(2);
    Model flat = testutil::random_mlp({16, 8, 3}, rng);
    Model grid;
    grid.input_shape = {1, 4, 4};
    grid.layers.push_back(FlattenLayer{});
    grid.layers.push_back(testutil::random_dense(16, 3, Activation::Softmax, rng));
    REQUIRE(check(inspect_meta(flat), inspect_meta(grid)).compatible());

    const auto corpus = gen_uniform(flat.input_shape, 50, {-1, 1}, 3);
    std::vector<Tensor> adapted;
    for (const auto& r : corpus.rows) adapted.push_back(adapt_input(r, grid.input_shape));
    CHECK(predict_batch(flat, corpus).rows == 50);
    CHECK(predict_batch(grid, adapted).rows == 50);
}
