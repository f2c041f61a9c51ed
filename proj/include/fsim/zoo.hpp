#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fsim/dataset.hpp"
#include "fsim/metrics.hpp"
#include "fsim/model.hpp"
#include "fsim/random.hpp"

namespace fsim::zoo {

/// Gaussian clusters around distinct corners of the [-0.5, 0.5] hypercube
/// (pairwise at least one unit apart), rescaled into (-1, 1) if needed.
/// Rows are grouped by class.
LabeledDataset make_blobs(std::size_t n_classes, std::size_t dim, std::size_t per_class, double spread,
                          std::uint64_t seed);

struct TrainConfig {
    std::size_t epochs = 10;
    double learning_rate = 0.01;
    std::size_t batch_size = 32;
    std::uint64_t seed = 1;
    Activation hidden = Activation::Relu;
};

struct TrainResult {
    Model model;
    std::vector<double> epoch_losses; // mean training loss after each epoch
};

/// Seeded initialisation (He-uniform weights, zero bias) for an MLP.
/// A final size of 1 with a binary dataset gives a sigmoid head.
Model init_mlp(const std::vector<std::size_t>& layer_sizes, const TrainConfig& cfg);

/// Plain mini-batch SGD on cross-entropy (softmax) or binary cross-entropy
/// (sigmoid head) with hand-written backprop.
TrainResult train_mlp_logged(const std::vector<std::size_t>& layer_sizes, const LabeledDataset& ds,
                             const TrainConfig& cfg);
Model train_mlp(const std::vector<std::size_t>& layer_sizes, const LabeledDataset& ds, const TrainConfig& cfg);

/// All dense parameters in layer order, weights (row-major) then bias.
std::vector<double> flatten_params(const Model& m);
Model with_params(const Model& m, const std::vector<double>& params);

struct LossGradient {
    double loss = 0.0;
    std::vector<double> gradient; // same layout as flatten_params
};

/// Mean loss and its analytic gradient over the whole dataset.
LossGradient loss_and_gradient(const Model& m, const LabeledDataset& ds);
double mean_loss(const Model& m, const LabeledDataset& ds);
double train_accuracy(const Model& m, const LabeledDataset& ds);

/// Negates the sigmoid head so the output becomes 1 - p.
Model invert_binary(const Model& m);

LabeledDataset permute_labels(const LabeledDataset& ds, const std::vector<std::size_t>& perm);
std::vector<std::size_t> random_derangement(std::size_t n, RandomSource& rng);
std::vector<std::size_t> invert_permutation(const std::vector<std::size_t>& perm);

struct SensitivityConfig {
    std::size_t classes = 4;
    std::size_t dim = 16;
    std::size_t per_class = 200;
    double spread = 0.15;
    std::uint64_t seed = 7;
    std::size_t runs = 10;
    std::size_t inputs = 20000;
    TrainConfig train{30, 0.05, 32, 1, Activation::Relu};
    std::size_t hidden = 32;
};

struct SensitivityRow {
    std::string group;
    std::string model_id;
    Metric metric;
    std::size_t run_index;
    double score;
};

struct BoxStats {
    double min, q1, median, q3, max;
};

BoxStats box_stats(std::vector<double> values);

struct SensitivitySuite {
    std::vector<SensitivityRow> rows;
    std::vector<std::string> groups;
    std::size_t n_classes = 0;

    std::vector<double> scores(const std::string& group, Metric metric) const;
};

SensitivitySuite sensitivity_suite(const SensitivityConfig& cfg);
std::string sensitivity_csv(const SensitivitySuite& s);
std::string sensitivity_summary_csv(const SensitivitySuite& s);

} // namespace fsim::zoo
