#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "fsim/prediction.hpp"
#include "fsim/tensor.hpp"

namespace fsim {

struct InputCorpus;

struct DenseLayer {
    Tensor weights; // [units, in]
    Tensor bias;    // [units]
    Activation activation = Activation::Linear;
    bool operator==(const DenseLayer&) const = default;
};

struct Conv2DLayer {
    Tensor kernels; // [outC, inC, kh, kw]
    Tensor bias;    // [outC]
    std::size_t stride = 1;
    Activation activation = Activation::Linear;
    bool operator==(const Conv2DLayer&) const = default;
};

struct MaxPool2DLayer {
    std::size_t window = 2;
    std::size_t stride = 2;
    bool operator==(const MaxPool2DLayer&) const = default;
};

struct FlattenLayer {
    bool operator==(const FlattenLayer&) const = default;
};

using LayerSpec = std::variant<DenseLayer, Conv2DLayer, MaxPool2DLayer, FlattenLayer>;

/// A feed-forward classifier. Convolutional stages use channel-first
/// [C, H, W] activations; dense layers consume rank-1 activations.
struct Model {
    Shape input_shape;
    std::vector<LayerSpec> layers;
    bool operator==(const Model&) const = default;
};

enum class OutputKind { Softmax, Sigmoid };

struct ModelMeta {
    Shape input_shape;
    std::size_t flat_input_len = 0;
    std::size_t n_classes = 0;
    OutputKind output_activation = OutputKind::Softmax;
    bool operator==(const ModelMeta&) const = default;
};

std::string_view to_string(Activation a);
std::string_view to_string(OutputKind k);

/// Checks the classifier invariants and the shape chain. Throws
/// InvalidModel, ShapeChainError or NotAClassifier.
void validate(const Model& m);

Model load_model(const std::filesystem::path& path);
Model parse_model(const std::string& text);
std::string serialize_model(const Model& m);
void save_model(const Model& m, const std::filesystem::path& path);

ModelMeta inspect_meta(const Model& m);

/// Probability vector for one input; x may have any shape with the model's
/// flat input length.
Tensor forward(const Model& m, const Tensor& x);

PredictionMatrix predict_batch(const Model& m, std::span<const Tensor> rows);
PredictionMatrix predict_batch(const Model& m, const InputCorpus& corpus);
/// Single-threaded reference for predict_batch.
PredictionMatrix predict_batch_serial(const Model& m, std::span<const Tensor> rows);

/// Argmax per row, ties to the lowest index; sigmoid-sourced rows use p >= 0.5.
std::vector<std::size_t> predict_labels(const PredictionMatrix& pm);

/// The vector used for distance tests and labeling of a single forward output
/// (sigmoid heads are expanded to [1 - p, p]).
std::vector<double> expanded_prediction(const Tensor& out, OutputKind kind);
std::size_t label_of(std::span<const double> expanded, OutputKind kind);

} // namespace fsim
