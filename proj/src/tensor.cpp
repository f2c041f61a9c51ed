#include "fsim/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fsim/error.hpp"

namespace fsim {

namespace {

std::string shape_str(const Shape& s) {
    std::ostringstream os;
    os << '(';
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i) os << ',';
        os << s[i];
    }
    os << ')';
    return os.str();
}

void validate_shape(const Shape& shape) {
    if (shape.empty()) throw Error(ErrorCode::ShapeMismatch, "empty shape");
    for (auto d : shape)
        if (d == 0) throw Error(ErrorCode::ShapeMismatch, "zero dimension in " + shape_str(shape));
}

} // namespace

std::size_t shape_product(const Shape& shape) {
    std::size_t p = 1;
    for (auto d : shape) p *= d;
    return p;
}

Tensor::Tensor(Shape shape) : shape_(std::move(shape)) {
    validate_shape(shape_);
    data_.assign(shape_product(shape_), 0.0);
}

Tensor::Tensor(Shape shape, std::vector<double> data) : shape_(std::move(shape)), data_(std::move(data)) {
    validate_shape(shape_);
    if (shape_product(shape_) != data_.size())
        throw Error(ErrorCode::ShapeMismatch,
                    "shape " + shape_str(shape_) + " does not hold " + std::to_string(data_.size()) + " values");
}

Tensor Tensor::vector(std::vector<double> data) {
    Shape s{data.size()};
    return Tensor(std::move(s), std::move(data));
}

Tensor reshape(const Tensor& t, const Shape& new_shape) {
    validate_shape(new_shape);
    if (shape_product(new_shape) != t.size())
        throw Error(ErrorCode::ShapeMismatch,
                    "cannot reshape " + shape_str(t.shape()) + " to " + shape_str(new_shape));
    return Tensor(new_shape, t.values());
}

Tensor dense_forward(const Tensor& weights, const Tensor& bias, const Tensor& x) {
    if (weights.rank() != 2) throw Error(ErrorCode::ShapeMismatch, "dense weights must be rank 2");
    const std::size_t out = weights.shape()[0];
    const std::size_t in = weights.shape()[1];
    if (x.size() != in)
        throw Error(ErrorCode::ShapeMismatch,
                    "dense expects " + std::to_string(in) + " inputs, got " + std::to_string(x.size()));
    if (bias.size() != out)
        throw Error(ErrorCode::ShapeMismatch, "dense bias length differs from weight rows");

    std::vector<double> y(out);
    const auto w = weights.data();
    const auto xv = x.data();
    for (std::size_t j = 0; j < out; ++j) {
        double acc = 0.0;
        const double* row = w.data() + j * in;
        for (std::size_t k = 0; k < in; ++k) acc += row[k] * xv[k];
        y[j] = acc + bias[j];
    }
    return Tensor::vector(std::move(y));
}

Tensor conv2d_forward(const Tensor& kernels, const Tensor& bias, const Tensor& x, std::size_t stride) {
    if (kernels.rank() != 4) throw Error(ErrorCode::ShapeMismatch, "conv kernels must be rank 4");
    if (x.rank() != 3) throw Error(ErrorCode::ShapeMismatch, "conv input must be [C,H,W], got " + shape_str(x.shape()));
    if (stride == 0) throw Error(ErrorCode::ShapeMismatch, "conv stride must be positive");
    const auto& ks = kernels.shape();
    const std::size_t out_c = ks[0], in_c = ks[1], kh = ks[2], kw = ks[3];
    const std::size_t h = x.shape()[1], w = x.shape()[2];
    if (x.shape()[0] != in_c)
        throw Error(ErrorCode::ShapeMismatch, "conv input channels differ from kernel channels");
    if (bias.size() != out_c) throw Error(ErrorCode::ShapeMismatch, "conv bias length differs from output channels");
    if (kh > h || kw > w) throw Error(ErrorCode::KernelTooLarge, "kernel larger than input image");

    const std::size_t oh = (h - kh) / stride + 1;
    const std::size_t ow = (w - kw) / stride + 1;
    Tensor y(Shape{out_c, oh, ow});
    const auto kv = kernels.data();
    const auto xv = x.data();
    auto yv = y.data();
    for (std::size_t o = 0; o < out_c; ++o)
        for (std::size_t r = 0; r < oh; ++r)
            for (std::size_t c = 0; c < ow; ++c) {
                double acc = 0.0;
                for (std::size_t i = 0; i < in_c; ++i)
                    for (std::size_t dr = 0; dr < kh; ++dr) {
                        const double* xrow = xv.data() + (i * h + r * stride + dr) * w + c * stride;
                        const double* krow = kv.data() + ((o * in_c + i) * kh + dr) * kw;
                        for (std::size_t dc = 0; dc < kw; ++dc) acc += krow[dc] * xrow[dc];
                    }
                yv[(o * oh + r) * ow + c] = acc + bias[o];
            }
    return y;
}

Tensor maxpool2d(const Tensor& x, std::size_t window, std::size_t stride) {
    if (x.rank() != 3) throw Error(ErrorCode::ShapeMismatch, "maxpool input must be [C,H,W]");
    if (window == 0 || stride == 0) throw Error(ErrorCode::ShapeMismatch, "maxpool window and stride must be positive");
    const std::size_t ch = x.shape()[0], h = x.shape()[1], w = x.shape()[2];
    if (window > h || window > w) throw Error(ErrorCode::ShapeMismatch, "maxpool window larger than input");

    const std::size_t oh = (h - window) / stride + 1;
    const std::size_t ow = (w - window) / stride + 1;
    Tensor y(Shape{ch, oh, ow});
    const auto xv = x.data();
    auto yv = y.data();
    for (std::size_t k = 0; k < ch; ++k)
        for (std::size_t r = 0; r < oh; ++r)
            for (std::size_t c = 0; c < ow; ++c) {
                double best = xv[(k * h + r * stride) * w + c * stride];
                for (std::size_t dr = 0; dr < window; ++dr)
                    for (std::size_t dc = 0; dc < window; ++dc)
                        best = std::max(best, xv[(k * h + r * stride + dr) * w + c * stride + dc]);
                yv[(k * oh + r) * ow + c] = best;
            }
    return y;
}

Tensor apply_activation(const Tensor& v, Activation kind) {
    std::vector<double> out(v.values());
    switch (kind) {
    case Activation::Linear: break;
    case Activation::Relu:
        for (auto& e : out) e = e > 0.0 ? e : 0.0;
        break;
    case Activation::Sigmoid:
        for (auto& e : out) {
            if (e >= 0.0) {
                e = 1.0 / (1.0 + std::exp(-e));
            } else {
                const double z = std::exp(e);
                e = z / (1.0 + z);
            }
        }
        break;
    case Activation::Softmax: {
        if (out.size() < 2) throw Error(ErrorCode::SoftmaxOnScalar, "softmax needs at least two entries");
        const double peak = *std::max_element(out.begin(), out.end());
        double sum = 0.0;
        for (auto& e : out) {
            e = std::exp(e - peak);
            sum += e;
        }
        for (auto& e : out) e /= sum;
        break;
    }
    }
    return Tensor(v.shape(), std::move(out));
}

} // namespace fsim
