#include "fsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Dense>

#include "fsim/error.hpp"
#include "fsim/kernels.hpp"

namespace fsim {

std::string_view to_string(Metric m) {
    switch (m) {
    case Metric::Cca: return "cca";
    case Metric::Spearman: return "spearman";
    case Metric::Overlap: return "overlap";
    }
    return "cca";
}

std::string_view to_string(Verdict v) {
    switch (v) {
    case Verdict::Similar: return "Similar";
    case Verdict::Uncertain: return "Uncertain";
    case Verdict::Dissimilar: return "Dissimilar";
    }
    return "Dissimilar";
}

std::optional<Metric> parse_metric(std::string_view s) {
    if (s == "cca") return Metric::Cca;
    if (s == "spearman") return Metric::Spearman;
    if (s == "overlap") return Metric::Overlap;
    return std::nullopt;
}

void Thresholds::validate() const {
    if (!(0.0 <= corr_dissim && corr_dissim < corr_sim && corr_sim <= 1.0))
        throw Error(ErrorCode::InvalidModel, "thresholds must satisfy 0 <= corr_dissim < corr_sim <= 1");
    if (!(alpha > 0.0 && alpha <= 1.0)) throw Error(ErrorCode::InvalidModel, "alpha must lie in (0, 1]");
}

std::vector<double> ranks(std::span<const double> v) {
    if (v.size() < 2) throw Error(ErrorCode::TooFewSamples, "ranking needs at least two values");
    return kernels::fractional_ranks(v);
}

double spearman_col(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw Error(ErrorCode::LengthMismatch, "spearman inputs differ in length");
    if (x.size() < 2) throw Error(ErrorCode::TooFewSamples, "spearman needs at least two samples");
    return kernels::pearson(kernels::fractional_ranks(x), kernels::fractional_ranks(y));
}

namespace {

// Row-major copy of the informative columns.
std::vector<double> informative_block(const PredictionMatrix& pm, std::size_t& width) {
    const auto cols = pm.informative_columns();
    width = cols.size();
    std::vector<double> out(pm.rows * width);
    for (std::size_t r = 0; r < pm.rows; ++r)
        for (std::size_t c = 0; c < width; ++c) out[r * width + c] = pm.at(r, cols[c]);
    return out;
}

double mean_of(const std::vector<double>& v) {
    return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Mat to_mat(const std::vector<double>& v, std::size_t r, std::size_t c) {
    return Eigen::Map<const Mat>(v.data(), static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
}

constexpr double kRankTolerance = 1e-9;

// Whitening transform (p x r) of a covariance matrix, r = effective rank.
Eigen::MatrixXd whitening(const Mat& cov) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(cov, Eigen::ComputeFullU);
    const auto& s = svd.singularValues();
    const double top = s.size() ? s(0) : 0.0;
    Eigen::Index rank = 0;
    if (top > 0.0)
        while (rank < s.size() && s(rank) > kRankTolerance * top) ++rank;
    Eigen::MatrixXd w = svd.matrixU().leftCols(rank);
    for (Eigen::Index k = 0; k < rank; ++k) w.col(k) /= std::sqrt(s(k));
    return w;
}

} // namespace

MetricResult spearman_mean(const PredictionMatrix& a, const PredictionMatrix& b, const Thresholds& th) {
    if (a.rows != b.rows || a.cols != b.cols || a.sigmoid_expanded != b.sigmoid_expanded)
        throw Error(ErrorCode::ShapeMismatch, "spearman needs prediction matrices of equal shape");
    if (a.rows < 2) throw Error(ErrorCode::TooFewSamples, "spearman needs at least two samples");
    std::size_t wa = 0, wb = 0;
    const auto xa = informative_block(a, wa);
    const auto xb = informative_block(b, wb);

    MetricResult r;
    r.metric = Metric::Spearman;
    r.per_class = kernels::parallel::column_rank_correlations(xa, xb, a.rows, wa);
    r.score = std::clamp(mean_of(r.per_class), -1.0, 1.0);
    const auto v = verdict_corr(r.score, th, true);
    r.verdict = v.verdict;
    r.inverse_relation = v.inverse_relation;
    return r;
}

MetricResult cca_mean(const PredictionMatrix& a, const PredictionMatrix& b, const Thresholds& th) {
    if (a.rows != b.rows) throw Error(ErrorCode::ShapeMismatch, "cca needs the same number of samples on both sides");
    std::size_t p = 0, q = 0;
    const auto xa = informative_block(a, p);
    const auto xb = informative_block(b, q);
    const std::size_t m = a.rows;
    if (m <= std::max(p, q) + 1)
        throw Error(ErrorCode::TooFewSamples, "cca needs more than max(n_a, n_b) + 1 samples");

    const Mat cxx = to_mat(kernels::parallel::cross_covariance(xa, p, xa, p, m), p, p);
    const Mat cyy = to_mat(kernels::parallel::cross_covariance(xb, q, xb, q, m), q, q);
    const Mat cxy = to_mat(kernels::parallel::cross_covariance(xa, p, xb, q, m), p, q);

    const Eigen::MatrixXd wx = whitening(cxx);
    const Eigen::MatrixXd wy = whitening(cyy);
    if (wx.cols() == 0 || wy.cols() == 0) throw Error(ErrorCode::DegenerateInput, "all prediction columns are constant");

    const Eigen::MatrixXd t = wx.transpose() * cxy * wy;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(t);
    const auto& s = svd.singularValues();
    const auto keep = std::min(wx.cols(), wy.cols());

    MetricResult r;
    r.metric = Metric::Cca;
    for (Eigen::Index k = 0; k < keep; ++k) r.per_class.push_back(std::clamp(s(k), 0.0, 1.0));
    r.score = std::clamp(mean_of(r.per_class), 0.0, 1.0);
    r.verdict = verdict_corr(r.score, th, false).verdict;
    return r;
}

double overlap(std::span<const std::size_t> labels_a, std::span<const std::size_t> labels_b) {
    if (labels_a.size() != labels_b.size()) throw Error(ErrorCode::LengthMismatch, "label vectors differ in length");
    if (labels_a.empty()) throw Error(ErrorCode::TooFewSamples, "overlap needs at least one label");
    std::size_t same = 0;
    for (std::size_t i = 0; i < labels_a.size(); ++i) same += labels_a[i] == labels_b[i];
    return static_cast<double>(same) / static_cast<double>(labels_a.size());
}

MetricResult overlap_result(std::span<const std::size_t> labels_a, std::span<const std::size_t> labels_b,
                            std::size_t n_classes, const Thresholds& th) {
    MetricResult r;
    r.metric = Metric::Overlap;
    r.score = overlap(labels_a, labels_b);
    r.verdict = verdict_overlap(r.score, n_classes, th);
    return r;
}

CorrVerdict verdict_corr(double score, const Thresholds& th, bool signed_metric) {
    CorrVerdict v{Verdict::Dissimilar, false};
    if (score >= th.corr_sim)
        v.verdict = Verdict::Similar;
    else if (score > th.corr_dissim)
        v.verdict = Verdict::Uncertain;
    v.inverse_relation = signed_metric && score <= -th.corr_sim;
    return v;
}

Verdict verdict_overlap(double score, std::size_t n_classes, const Thresholds& th) {
    const double n = static_cast<double>(n_classes);
    if (score <= 1.0 / n) return Verdict::Dissimilar;
    if (score >= 2.0 * th.alpha / n) return Verdict::Similar;
    return Verdict::Uncertain;
}

bool check_equivalence(const PredictionMatrix& a, const PredictionMatrix& b, double eps) {
    if (a.rows != b.rows || a.cols != b.cols) throw Error(ErrorCode::ShapeMismatch, "equivalence needs equal shapes");
    for (std::size_t i = 0; i < a.values.size(); ++i)
        if (std::abs(a.values[i] - b.values[i]) > eps) return false;
    return true;
}

} // namespace fsim
