#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace fsim {

using Shape = std::vector<std::size_t>;

std::size_t shape_product(const Shape& shape);

/// Dense row-major tensor of doubles. The shape is always non-empty with
/// every dimension >= 1, and the buffer length equals the shape product.
class Tensor {
public:
    Tensor() : shape_{1}, data_(1, 0.0) {}
    explicit Tensor(Shape shape);
    Tensor(Shape shape, std::vector<double> data);

    static Tensor vector(std::vector<double> data);

    const Shape& shape() const noexcept { return shape_; }
    std::size_t rank() const noexcept { return shape_.size(); }
    std::size_t size() const noexcept { return data_.size(); }

    std::span<const double> data() const noexcept { return data_; }
    std::span<double> data() noexcept { return data_; }
    const std::vector<double>& values() const noexcept { return data_; }

    double operator[](std::size_t i) const { return data_[i]; }
    double& operator[](std::size_t i) { return data_[i]; }

    bool operator==(const Tensor&) const = default;

private:
    Shape shape_;
    std::vector<double> data_;
};

enum class Activation { Relu, Sigmoid, Softmax, Linear };

Tensor reshape(const Tensor& t, const Shape& new_shape);

/// y = W x + b with W shaped [out, in].
Tensor dense_forward(const Tensor& weights, const Tensor& bias, const Tensor& x);

/// Valid-padding cross-correlation. kernels [outC, inC, kh, kw], x [inC, H, W].
Tensor conv2d_forward(const Tensor& kernels, const Tensor& bias, const Tensor& x, std::size_t stride);

Tensor maxpool2d(const Tensor& x, std::size_t window, std::size_t stride);

Tensor apply_activation(const Tensor& v, Activation kind);

} // namespace fsim
