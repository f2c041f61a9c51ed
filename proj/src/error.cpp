#include "fsim/error.hpp"

namespace fsim {

std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::KernelTooLarge: return "KernelTooLarge";
    case ErrorCode::SoftmaxOnScalar: return "SoftmaxOnScalar";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::NotAClassifier: return "NotAClassifier";
    case ErrorCode::ShapeChainError: return "ShapeChainError";
    case ErrorCode::InvalidModel: return "InvalidModel";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::LabelUnreachable: return "LabelUnreachable";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::DegenerateInput: return "DegenerateInput";
    case ErrorCode::Incompatible: return "Incompatible";
    case ErrorCode::UnknownId: return "UnknownId";
    case ErrorCode::NotSigmoid: return "NotSigmoid";
    case ErrorCode::BadPermutation: return "BadPermutation";
    }
    return "Unknown";
}

} // namespace fsim
