#include <doctest.h>

#include <omp.h>

#include "fsim/inputgen.hpp"
#include "fsim/kernels.hpp"
#include "fsim/model.hpp"
#include "helpers.hpp"

using namespace fsim;

namespace {

struct ThreadScope {
    int saved;
    explicit ThreadScope(int n) : saved(omp_get_max_threads()) { omp_set_num_threads(n); }
    ~ThreadScope() { omp_set_num_threads(saved); }
};

std::vector<double> random_values(std::size_t n, RandomSource& rng) {
    std::vector<double> v(n);
    for (auto& e : v) e = rng.uniform(-1, 1);
    return v;
}

} // namespace

TEST_CASE("parallel kernels are bit-identical to the serial reference") {
    RandomSource rng(77);
    for (int threads : {1, 3, 4}) {
        ThreadScope scope(threads);
        const std::size_t m = 3001, p = 5, q = 7;
        const auto x = random_values(m * p, rng);
        const auto y = random_values(m * q, rng);
        CHECK(kernels::serial::cross_covariance(x, p, y, q, m) == kernels::parallel::cross_covariance(x, p, y, q, m));

        const auto y5 = random_values(m * p, rng);
        CHECK(kernels::serial::column_rank_correlations(x, y5, m, p) ==
              kernels::parallel::column_rank_correlations(x, y5, m, p));

        const auto pool = random_values(10000 * 4, rng);
        const auto probe = random_values(4, rng);
        CHECK(kernels::serial::nearest_distance(probe, pool, 4) == kernels::parallel::nearest_distance(probe, pool, 4));
    }
}

TEST_CASE("predict_batch matches the serial path regardless of threads") {
    RandomSource rng(5);
    const auto mlp = testutil::random_mlp({20, 16, 5}, rng);
    const auto cnn = testutil::random_cnn(8, 3, rng);
    const auto c1 = gen_uniform(mlp.input_shape, 500, {-1, 1}, 1);
    const auto c2 = gen_uniform(cnn.input_shape, 300, {-1, 1}, 2);
    const auto ref1 = predict_batch_serial(mlp, c1.rows);
    const auto ref2 = predict_batch_serial(cnn, c2.rows);
    for (int threads : {1, 2, 4}) {
        ThreadScope scope(threads);
        CHECK(predict_batch(mlp, c1) == ref1);
        CHECK(predict_batch(cnn, c2) == ref2);
    }
}

TEST_CASE("fractional ranks and pearson helpers") {
    CHECK(kernels::fractional_ranks(std::vector<double>{3, 1, 2}) == std::vector<double>{3, 1, 2});
    CHECK(kernels::fractional_ranks(std::vector<double>{2, 2, 2, 1}) == std::vector<double>{3, 3, 3, 1});
    CHECK(kernels::pearson(std::vector<double>{1, 2, 3}, std::vector<double>{5, 5, 5}) == 0.0);
    CHECK(kernels::pearson(std::vector<double>{1, 2, 3}, std::vector<double>{2, 4, 6}) == doctest::Approx(1.0));
}

TEST_CASE("nearest_distance of an empty pool is infinite") {
    const std::vector<double> probe{0.1, 0.2};
    CHECK(std::isinf(kernels::serial::nearest_distance(probe, {}, 2)));
    CHECK(std::isinf(kernels::parallel::nearest_distance(probe, {}, 2)));
}
