#pragma once

#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "fsim/model.hpp"
#include "fsim/random.hpp"

namespace testutil {

inline fsim::Tensor random_tensor(const fsim::Shape& shape, fsim::RandomSource& rng, double lo = -1.0, double hi = 1.0) {
    std::vector<double> v(fsim::shape_product(shape));
    for (auto& e : v) e = rng.uniform(lo, hi);
    return fsim::Tensor(shape, std::move(v));
}

inline fsim::DenseLayer random_dense(std::size_t in, std::size_t out, fsim::Activation act, fsim::RandomSource& rng,
                                     double scale = 1.0) {
    const double b = scale / std::sqrt(static_cast<double>(in));
    return {random_tensor({out, in}, rng, -b, b), random_tensor({out}, rng, -0.1, 0.1), act};
}

/// Random MLP with ReLU hidden layers and a softmax (n >= 2) or sigmoid (n == 1) head.
inline fsim::Model random_mlp(const std::vector<std::size_t>& sizes, fsim::RandomSource& rng, double scale = 2.0) {
    fsim::Model m;
    m.input_shape = {sizes.front()};
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
        const bool last = l + 2 == sizes.size();
        const auto act = last ? (sizes[l + 1] == 1 ? fsim::Activation::Sigmoid : fsim::Activation::Softmax)
                              : fsim::Activation::Relu;
        m.layers.push_back(random_dense(sizes[l], sizes[l + 1], act, rng, scale));
    }
    return m;
}

/// conv(1->2, 3x3) relu -> maxpool 2 -> flatten -> dense softmax n
inline fsim::Model random_cnn(std::size_t side, std::size_t n, fsim::RandomSource& rng) {
    fsim::Model m;
    m.input_shape = {1, side, side};
    m.layers.push_back(fsim::Conv2DLayer{random_tensor({2, 1, 3, 3}, rng, -0.5, 0.5), random_tensor({2}, rng, -0.1, 0.1), 1,
                                         fsim::Activation::Relu});
    m.layers.push_back(fsim::MaxPool2DLayer{2, 2});
    m.layers.push_back(fsim::FlattenLayer{});
    const std::size_t pooled = (side - 2 - 2) / 2 + 1;
    m.layers.push_back(random_dense(2 * pooled * pooled, n, fsim::Activation::Softmax, rng, 3.0));
    return m;
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("fsim_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

} // namespace testutil
