// Serial vs OpenMP timings for the data-parallel kernels.
//   bench_kernels [rows]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>

#include <omp.h>

#include "fsim/inputgen.hpp"
#include "fsim/kernels.hpp"
#include "fsim/model.hpp"
#include "fsim/zoo.hpp"

namespace {

double time_ms(const std::function<void()>& fn, int reps = 3) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        fn();
        const auto dt = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        best = dt < best ? dt : best;
    }
    return best;
}

void report(const char* name, double serial, double parallel) {
    std::printf("%-26s serial %9.2f ms   parallel %9.2f ms   speedup %5.2fx\n", name, serial, parallel,
                parallel > 0 ? serial / parallel : 0.0);
}

} // namespace

int main(int argc, char** argv) {
    using namespace fsim;
    const std::size_t rows = argc > 1 ? std::strtoul(argv[1], nullptr, 10) : 20000;
    std::printf("threads: %d, rows: %zu\n", omp_get_max_threads(), rows);

    zoo::TrainConfig tc;
    const auto model = zoo::init_mlp({784, 128, 10}, tc);
    const auto corpus = gen_uniform(model.input_shape, rows, {-1.0, 1.0}, 1);

    PredictionMatrix a, b;
    const double ps = time_ms([&] { a = predict_batch_serial(model, corpus.rows); }, 1);
    const double pp = time_ms([&] { b = predict_batch(model, corpus.rows); }, 1);
    report("predict_batch 784-128-10", ps, pp);
    if (a != b) std::printf("  MISMATCH between serial and parallel predictions\n");

    const auto& v = a.values;
    const auto n = a.cols;
    report("cross_covariance", time_ms([&] { (void)kernels::serial::cross_covariance(v, n, v, n, a.rows); }),
           time_ms([&] { (void)kernels::parallel::cross_covariance(v, n, v, n, a.rows); }));
    report("column_rank_correlations", time_ms([&] { (void)kernels::serial::column_rank_correlations(v, v, a.rows, n); }),
           time_ms([&] { (void)kernels::parallel::column_rank_correlations(v, v, a.rows, n); }));
    const std::vector<double> probe(a.row(0).begin(), a.row(0).end());
    report("nearest_distance", time_ms([&] {
               for (int i = 0; i < 200; ++i) (void)kernels::serial::nearest_distance(probe, v, n);
           }),
           time_ms([&] {
               for (int i = 0; i < 200; ++i) (void)kernels::parallel::nearest_distance(probe, v, n);
           }));
    return 0;
}
