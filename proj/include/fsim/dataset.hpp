#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

namespace fsim {

/// Row-major feature matrix with integer labels in [0, n_classes).
struct LabeledDataset {
    std::size_t rows = 0;
    std::size_t dim = 0;
    std::vector<double> x;
    std::vector<std::size_t> y;

    const double* row(std::size_t r) const { return x.data() + r * dim; }
    std::size_t n_classes() const;
    bool operator==(const LabeledDataset&) const = default;
};

/// Header row, float feature columns, final integer label column.
std::string dataset_to_csv(const LabeledDataset& ds);
LabeledDataset dataset_from_csv(const std::string& text);
void save_dataset(const LabeledDataset& ds, const std::filesystem::path& path);
LabeledDataset load_dataset(const std::filesystem::path& path);

} // namespace fsim
