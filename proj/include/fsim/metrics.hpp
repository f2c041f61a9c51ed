#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "fsim/prediction.hpp"

namespace fsim {

enum class Metric { Cca, Spearman, Overlap };
enum class Verdict { Similar, Uncertain, Dissimilar };

std::string_view to_string(Metric m);
std::string_view to_string(Verdict v);
std::optional<Metric> parse_metric(std::string_view s);

struct Thresholds {
    double corr_dissim = 0.1;
    double corr_sim = 0.2;
    double alpha = 0.9;

    void validate() const;
};

struct MetricResult {
    Metric metric = Metric::Spearman;
    double score = 0.0;
    Verdict verdict = Verdict::Dissimilar;
    std::vector<double> per_class;
    bool inverse_relation = false;
};

std::vector<double> ranks(std::span<const double> v);

double spearman_col(std::span<const double> x, std::span<const double> y);

/// Mean per-column Spearman correlation over the informative columns.
MetricResult spearman_mean(const PredictionMatrix& a, const PredictionMatrix& b,
                           const Thresholds& th = {});

/// Canonical correlations between the informative columns of a and b.
/// Each side is whitened through the SVD of its covariance, discarding
/// directions with singular value below 1e-9 of the largest, and the score
/// is the mean over the min(rank_a, rank_b) retained correlations.
MetricResult cca_mean(const PredictionMatrix& a, const PredictionMatrix& b, const Thresholds& th = {});

double overlap(std::span<const std::size_t> labels_a, std::span<const std::size_t> labels_b);

/// Overlap on label vectors with its class-count-dependent verdict.
MetricResult overlap_result(std::span<const std::size_t> labels_a, std::span<const std::size_t> labels_b,
                            std::size_t n_classes, const Thresholds& th = {});

struct CorrVerdict {
    Verdict verdict;
    bool inverse_relation;
};

/// `signed_metric` enables the inverse-relation flag (Spearman only).
CorrVerdict verdict_corr(double score, const Thresholds& th = {}, bool signed_metric = true);

Verdict verdict_overlap(double score, std::size_t n_classes, const Thresholds& th = {});

bool check_equivalence(const PredictionMatrix& a, const PredictionMatrix& b, double eps);

} // namespace fsim
