#include "fsim/compat.hpp"

#include "fsim/error.hpp"

namespace fsim {

std::size_t flat_len(const Shape& shape) { return shape_product(shape); }

CompatReport check(const ModelMeta& ref, const ModelMeta& cand) {
    CompatReport r;
    r.input_compatible = flat_len(ref.input_shape) == flat_len(cand.input_shape);
    r.output_compatible = ref.n_classes == cand.n_classes && ref.output_activation == cand.output_activation;
    r.reshape_required = r.input_compatible && ref.input_shape != cand.input_shape;

    if (!r.input_compatible)
        r.reason = "input incompatible: flat lengths " + std::to_string(flat_len(ref.input_shape)) + " vs " +
                   std::to_string(flat_len(cand.input_shape));
    if (!r.output_compatible) {
        if (!r.reason.empty()) r.reason += "; ";
        r.reason += "output incompatible: " + std::to_string(ref.n_classes) + "-class " +
                    std::string(to_string(ref.output_activation)) + " vs " + std::to_string(cand.n_classes) +
                    "-class " + std::string(to_string(cand.output_activation));
    }
    return r;
}

Tensor adapt_input(const Tensor& x, const Shape& target) {
    if (x.shape() == target) return x;
    if (flat_len(x.shape()) != flat_len(target))
        throw Error(ErrorCode::ShapeMismatch, "input cannot be reshaped to the candidate's input shape");
    return reshape(x, target);
}

} // namespace fsim
