#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fsim/compat.hpp"
#include "fsim/dataset.hpp"
#include "fsim/inputgen.hpp"
#include "fsim/metrics.hpp"
#include "fsim/model.hpp"

namespace fsim {

inline constexpr std::size_t kDefaultUniformInputs = 20000;
inline constexpr std::size_t kRecommendedMinInputs = 3000;

struct CompareConfig {
    std::size_t n_uniform = kDefaultUniformInputs;
    ValueRange uniform_range{-1.0, 1.0};
    BrincParams brinc;
    Thresholds thresholds;
    std::uint64_t seed = 42;
    std::vector<Metric> metrics{Metric::Cca, Metric::Spearman, Metric::Overlap};

    bool wants(Metric m) const;
    /// Throws on hard violations; returns warnings for soft ones.
    std::vector<std::string> validate() const;
};

struct Timings {
    double generate_ms = 0.0;
    double predict_ms = 0.0;
    double metrics_ms = 0.0;
};

struct SimilarityReport {
    std::string ref_id;
    std::string cand_id;
    CompatReport compat;
    std::vector<MetricResult> results;
    CompareConfig config;
    Timings timings;
};

/// Everything about the reference side of a comparison: both input corpora
/// and the reference predictions on them. Depends only on (reference, cfg),
/// so one probe serves any number of candidates.
struct ReferenceProbe {
    std::string ref_id;
    Model model;
    ModelMeta meta;
    CompareConfig config;
    InputCorpus uniform;
    PredictionMatrix uniform_predictions;
    InputCorpus balanced;
    std::vector<std::size_t> balanced_labels;
    Timings timings;
};

/// Seed of the balanced generator derived from the comparison seed.
std::uint64_t brinc_seed(std::uint64_t seed);

ReferenceProbe probe_reference(const Model& ref, std::string ref_id, const CompareConfig& cfg);

SimilarityReport evaluate_candidate(const ReferenceProbe& probe, const Model& cand, std::string cand_id);

SimilarityReport compare_models(const Model& ref, const Model& cand, const CompareConfig& cfg,
                                std::string ref_id = "ref", std::string cand_id = "cand");

SimilarityReport compare(const std::filesystem::path& ref, const std::filesystem::path& cand, const CompareConfig& cfg);

/// Report as JSON text. Timings are omitted unless requested so that the
/// document is a pure function of the inputs.
std::string report_json(const SimilarityReport& r, bool include_timings = false);
std::string config_json(const CompareConfig& cfg);

struct ScanEntry {
    std::string cand_id;
    bool ok = false;
    std::string reason;
    std::optional<SimilarityReport> report;
};

struct ScanResult {
    std::vector<ScanEntry> entries;
    std::vector<std::string> warnings;
};

/// Compares the reference against every *.nfm file in `dir` (sorted by
/// filename). Candidates that fail to load or are incompatible are kept as
/// skipped entries.
ScanResult scan(const std::filesystem::path& ref, const std::filesystem::path& dir, const CompareConfig& cfg);

std::string scan_csv(const ScanResult& s);
std::string scan_json(const ScanResult& s);

enum class Band { Match, Undecided, Different };
std::string_view to_string(Band b);
Band band_for(double accuracy);

enum class Scaling { Identity, Div255, MinMax01, MinMaxSym };
std::string_view to_string(Scaling s);

LabeledDataset apply_scaling(const LabeledDataset& ds, Scaling s);

struct AccuracyBand {
    double accuracy = 0.0;
    Band band = Band::Different;
    Scaling best_scaling = Scaling::Identity;
    std::vector<std::pair<Scaling, double>> per_scaling;
};

/// Label agreement under each feature scaling; the best one is kept.
AccuracyBand accuracy(const Model& model, const LabeledDataset& ds);
AccuracyBand accuracy(const std::filesystem::path& model, const std::filesystem::path& dataset);
std::string accuracy_json(const AccuracyBand& a);

/// Rows (cand_id, accuracy, metric, score, verdict, band, excluded);
/// Undecided-band candidates are flagged as excluded.
std::string emit_scatter(const std::vector<SimilarityReport>& reports,
                         const std::map<std::string, AccuracyBand>& accuracies);

std::string csv_field(const std::string& s);
std::string format_score(double v);

} // namespace fsim
