#pragma once

#include <string>

#include "fsim/model.hpp"
#include "fsim/tensor.hpp"

namespace fsim {

/// Outcome of comparing two classifiers' interfaces. Incompatibility is a
/// report, never an exception. Label order is assumed to agree; it cannot
/// be checked from the files.
struct CompatReport {
    bool input_compatible = false;
    bool output_compatible = false;
    bool reshape_required = false;
    std::string reason;

    bool compatible() const noexcept { return input_compatible && output_compatible; }
    bool operator==(const CompatReport&) const = default;
};

std::size_t flat_len(const Shape& shape);

CompatReport check(const ModelMeta& ref, const ModelMeta& cand);

Tensor adapt_input(const Tensor& x, const Shape& target);

} // namespace fsim
