#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "fsim/tensor.hpp"

namespace fsim {

enum class CorpusMode { Uniform, Brinc };

struct Provenance {
    CorpusMode mode = CorpusMode::Uniform;
    std::uint64_t seed = 0;
    /// Generation parameters as a JSON object text, echoed into NIC files.
    std::string params_json = "{}";
    bool operator==(const Provenance&) const = default;
};

/// Ordered set of model inputs, all sharing `shape`.
struct InputCorpus {
    Shape shape;
    std::vector<Tensor> rows;
    Provenance provenance;

    std::size_t size() const noexcept { return rows.size(); }
    bool operator==(const InputCorpus&) const = default;
};

std::string_view to_string(CorpusMode mode);

std::string serialize_corpus(const InputCorpus& c);
InputCorpus parse_corpus(const std::string& text);
void save_corpus(const InputCorpus& c, const std::filesystem::path& path);
InputCorpus load_corpus(const std::filesystem::path& path);

} // namespace fsim
