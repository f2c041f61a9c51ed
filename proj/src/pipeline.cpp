#include "fsim/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>

#include <json.hpp>

#include "fsim/error.hpp"
#include "fsim/kernels.hpp"

namespace fsim {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

json result_json(const MetricResult& r) {
    return json{{"metric", std::string(to_string(r.metric))},
                {"score", r.score},
                {"verdict", std::string(to_string(r.verdict))},
                {"per_class", r.per_class},
                {"inverse_relation", r.inverse_relation}};
}

json compat_json(const CompatReport& c) {
    return json{{"input_compatible", c.input_compatible},
                {"output_compatible", c.output_compatible},
                {"reshape_required", c.reshape_required},
                {"reason", c.reason}};
}

json config_object(const CompareConfig& cfg) {
    json metrics = json::array();
    for (auto m : cfg.metrics) metrics.push_back(std::string(to_string(m)));
    json ranges = json::array();
    for (const auto& r : cfg.brinc.ranges) ranges.push_back({r.lo, r.hi});
    return json{{"inputs", cfg.n_uniform},
                {"uniform_range", {cfg.uniform_range.lo, cfg.uniform_range.hi}},
                {"seed", cfg.seed},
                {"metrics", metrics},
                {"thresholds",
                 {{"corr_dissim", cfg.thresholds.corr_dissim},
                  {"corr_sim", cfg.thresholds.corr_sim},
                  {"alpha", cfg.thresholds.alpha}}},
                {"brinc",
                 {{"mutPer", cfg.brinc.mut_per},
                  {"distance", cfg.brinc.distance},
                  {"ranges", ranges},
                  {"maxMut", cfg.brinc.max_mut},
                  {"maxValid", cfg.brinc.max_valid}}}};
}

json report_object(const SimilarityReport& r, bool include_timings) {
    json results = json::array();
    for (const auto& m : r.results) results.push_back(result_json(m));
    json doc{{"ref", r.ref_id},
             {"cand", r.cand_id},
             {"compat", compat_json(r.compat)},
             {"results", results},
             {"config", config_object(r.config)}};
    if (include_timings)
        doc["timings"] = {{"generate_ms", r.timings.generate_ms},
                          {"predict_ms", r.timings.predict_ms},
                          {"metrics_ms", r.timings.metrics_ms}};
    return doc;
}

} // namespace

bool CompareConfig::wants(Metric m) const { return std::find(metrics.begin(), metrics.end(), m) != metrics.end(); }

std::vector<std::string> CompareConfig::validate() const {
    std::vector<std::string> warnings;
    if (metrics.empty()) throw Error(ErrorCode::InvalidModel, "no metrics selected");
    thresholds.validate();
    if (wants(Metric::Overlap)) brinc.validate();
    if (!(uniform_range.lo < uniform_range.hi)) throw Error(ErrorCode::InvalidModel, "uniform range needs lo < hi");
    if (wants(Metric::Cca) || wants(Metric::Spearman)) {
        if (n_uniform < 2) throw Error(ErrorCode::TooFewSamples, "at least two uniform inputs are required");
        if (n_uniform < kRecommendedMinInputs)
            warnings.push_back("fewer than " + std::to_string(kRecommendedMinInputs) +
                               " uniform inputs; correlation scores may be noisy");
    }
    return warnings;
}

std::uint64_t brinc_seed(std::uint64_t seed) { return seed + 1; }

ReferenceProbe probe_reference(const Model& ref, std::string ref_id, const CompareConfig& cfg) {
    cfg.validate();
    ReferenceProbe p;
    p.ref_id = std::move(ref_id);
    p.model = ref;
    p.meta = inspect_meta(ref);
    p.config = cfg;

    if (cfg.wants(Metric::Cca) || cfg.wants(Metric::Spearman)) {
        auto t0 = Clock::now();
        p.uniform = gen_uniform(ref.input_shape, cfg.n_uniform, cfg.uniform_range, cfg.seed);
        p.timings.generate_ms += ms_since(t0);
        t0 = Clock::now();
        p.uniform_predictions = predict_batch(ref, p.uniform);
        p.timings.predict_ms += ms_since(t0);
    }
    if (cfg.wants(Metric::Overlap)) {
        auto t0 = Clock::now();
        RandomSource rng(brinc_seed(cfg.seed));
        p.balanced = brinc_generate(ref, cfg.brinc, rng);
        p.timings.generate_ms += ms_since(t0);
        t0 = Clock::now();
        p.balanced_labels = predict_labels(predict_batch(ref, p.balanced));
        p.timings.predict_ms += ms_since(t0);
    }
    return p;
}

SimilarityReport evaluate_candidate(const ReferenceProbe& probe, const Model& cand, std::string cand_id) {
    SimilarityReport r;
    r.ref_id = probe.ref_id;
    r.cand_id = std::move(cand_id);
    r.config = probe.config;
    r.timings = probe.timings;
    r.compat = check(probe.meta, inspect_meta(cand));
    if (!r.compat.compatible()) return r;

    auto adapted = [&](const InputCorpus& c) {
        std::vector<Tensor> rows;
        rows.reserve(c.size());
        for (const auto& row : c.rows) rows.push_back(adapt_input(row, cand.input_shape));
        return rows;
    };

    const auto& cfg = probe.config;
    PredictionMatrix cand_uniform;
    std::vector<std::size_t> cand_labels;
    auto t0 = Clock::now();
    if (cfg.wants(Metric::Cca) || cfg.wants(Metric::Spearman)) cand_uniform = predict_batch(cand, adapted(probe.uniform));
    if (cfg.wants(Metric::Overlap)) cand_labels = predict_labels(predict_batch(cand, adapted(probe.balanced)));
    r.timings.predict_ms += ms_since(t0);

    t0 = Clock::now();
    for (auto m : cfg.metrics) {
        switch (m) {
        case Metric::Cca: r.results.push_back(cca_mean(probe.uniform_predictions, cand_uniform, cfg.thresholds)); break;
        case Metric::Spearman:
            r.results.push_back(spearman_mean(probe.uniform_predictions, cand_uniform, cfg.thresholds));
            break;
        case Metric::Overlap:
            r.results.push_back(overlap_result(probe.balanced_labels, cand_labels, probe.meta.n_classes, cfg.thresholds));
            break;
        }
    }
    r.timings.metrics_ms += ms_since(t0);
    return r;
}

SimilarityReport compare_models(const Model& ref, const Model& cand, const CompareConfig& cfg, std::string ref_id,
                                std::string cand_id) {
    // Incompatible pairs are reported without generating any inputs.
    const auto compat = check(inspect_meta(ref), inspect_meta(cand));
    if (!compat.compatible()) {
        cfg.validate();
        SimilarityReport r;
        r.ref_id = std::move(ref_id);
        r.cand_id = std::move(cand_id);
        r.compat = compat;
        r.config = cfg;
        return r;
    }
    const auto probe = probe_reference(ref, std::move(ref_id), cfg);
    return evaluate_candidate(probe, cand, std::move(cand_id));
}

SimilarityReport compare(const fs::path& ref, const fs::path& cand, const CompareConfig& cfg) {
    const auto ref_model = load_model(ref);
    const auto cand_model = load_model(cand);
    return compare_models(ref_model, cand_model, cfg, ref.filename().string(), cand.filename().string());
}

std::string report_json(const SimilarityReport& r, bool include_timings) {
    return report_object(r, include_timings).dump(2) + "\n";
}

std::string config_json(const CompareConfig& cfg) { return config_object(cfg).dump(); }

ScanResult scan(const fs::path& ref, const fs::path& dir, const CompareConfig& cfg) {
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) throw Error(ErrorCode::IoError, "cannot read directory " + dir.string());
    std::vector<fs::path> files;
    for (fs::directory_iterator it(dir, ec), end; !ec && it != end; it.increment(ec))
        if (it->is_regular_file() && it->path().extension() == ".nfm") files.push_back(it->path());
    if (ec) throw Error(ErrorCode::IoError, "cannot read directory " + dir.string() + ": " + ec.message());
    std::sort(files.begin(), files.end(),
              [](const fs::path& a, const fs::path& b) { return a.filename().string() < b.filename().string(); });

    ScanResult out;
    out.warnings = cfg.validate();
    if (files.empty()) {
        out.warnings.push_back("no candidate models (*.nfm) in " + dir.string());
        return out;
    }

    const auto ref_model = load_model(ref);
    const auto probe = probe_reference(ref_model, ref.filename().string(), cfg);

    out.entries.resize(files.size());
    kernels::parallel::for_each_index(files.size(), [&](std::size_t i) {
        auto& e = out.entries[i];
        e.cand_id = files[i].filename().string();
        try {
            const auto cand = load_model(files[i]);
            auto report = evaluate_candidate(probe, cand, e.cand_id);
            e.ok = report.compat.compatible();
            if (!e.ok) e.reason = report.compat.reason;
            e.report = std::move(report);
        } catch (const std::exception& ex) {
            e.ok = false;
            e.reason = ex.what();
        }
    });
    return out;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char ch : s) {
        if (ch == '"') q += '"';
        q += ch;
    }
    return q + "\"";
}

std::string format_score(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12f", v);
    return buf;
}

std::string scan_csv(const ScanResult& s) {
    std::string out = "cand_id,status,metric,score,verdict,reason\n";
    for (const auto& e : s.entries) {
        if (!e.ok) {
            out += csv_field(e.cand_id) + ",skipped,,,," + csv_field(e.reason) + "\n";
            continue;
        }
        for (const auto& r : e.report->results)
            out += csv_field(e.cand_id) + ",ok," + std::string(to_string(r.metric)) + "," + format_score(r.score) + "," +
                   std::string(to_string(r.verdict)) + "," + (r.inverse_relation ? "inverse_relation" : "") + "\n";
    }
    return out;
}

std::string scan_json(const ScanResult& s) {
    json entries = json::array();
    for (const auto& e : s.entries) {
        json j{{"cand", e.cand_id}, {"status", e.ok ? "ok" : "skipped"}, {"reason", e.reason}};
        if (e.report) j["report"] = report_object(*e.report, false);
        entries.push_back(std::move(j));
    }
    return json{{"entries", entries}, {"warnings", s.warnings}}.dump(2) + "\n";
}

std::string_view to_string(Band b) {
    switch (b) {
    case Band::Match: return "Match";
    case Band::Undecided: return "Undecided";
    case Band::Different: return "Different";
    }
    return "Different";
}

Band band_for(double acc) {
    if (acc >= 0.65) return Band::Match;
    if (acc < 0.50) return Band::Different;
    return Band::Undecided;
}

std::string_view to_string(Scaling s) {
    switch (s) {
    case Scaling::Identity: return "identity";
    case Scaling::Div255: return "div255";
    case Scaling::MinMax01: return "minmax_0_1";
    case Scaling::MinMaxSym: return "minmax_-1_1";
    }
    return "identity";
}

LabeledDataset apply_scaling(const LabeledDataset& ds, Scaling s) {
    LabeledDataset out = ds;
    if (s == Scaling::Identity || ds.x.empty()) return out;
    if (s == Scaling::Div255) {
        for (auto& v : out.x) v /= 255.0;
        return out;
    }
    const auto [lo_it, hi_it] = std::minmax_element(ds.x.begin(), ds.x.end());
    const double lo = *lo_it, hi = *hi_it;
    const double span = hi - lo;
    for (auto& v : out.x) {
        const double unit = span > 0.0 ? (v - lo) / span : 0.0;
        v = s == Scaling::MinMax01 ? unit : 2.0 * unit - 1.0;
    }
    return out;
}

AccuracyBand accuracy(const Model& model, const LabeledDataset& ds) {
    const auto meta = inspect_meta(model);
    if (ds.dim != meta.flat_input_len)
        throw Error(ErrorCode::ShapeMismatch, "dataset has " + std::to_string(ds.dim) + " features, model expects " +
                                                  std::to_string(meta.flat_input_len));
    if (ds.rows == 0) throw Error(ErrorCode::ParseError, "dataset has no rows");

    AccuracyBand best;
    bool first = true;
    for (auto s : {Scaling::Identity, Scaling::Div255, Scaling::MinMax01, Scaling::MinMaxSym}) {
        const auto scaled = apply_scaling(ds, s);
        std::vector<Tensor> rows;
        rows.reserve(ds.rows);
        for (std::size_t r = 0; r < ds.rows; ++r)
            rows.push_back(Tensor::vector(std::vector<double>(scaled.row(r), scaled.row(r) + ds.dim)));
        const auto labels = predict_labels(predict_batch(model, rows));
        std::size_t hits = 0;
        for (std::size_t r = 0; r < ds.rows; ++r) hits += labels[r] == ds.y[r];
        const double acc = static_cast<double>(hits) / static_cast<double>(ds.rows);
        best.per_scaling.emplace_back(s, acc);
        if (first || acc > best.accuracy) {
            best.accuracy = acc;
            best.best_scaling = s;
            first = false;
        }
    }
    best.band = band_for(best.accuracy);
    return best;
}

AccuracyBand accuracy(const fs::path& model, const fs::path& dataset) {
    return accuracy(load_model(model), load_dataset(dataset));
}

std::string accuracy_json(const AccuracyBand& a) {
    json per = json::object();
    for (const auto& [s, v] : a.per_scaling) per[std::string(to_string(s))] = v;
    return json{{"accuracy", a.accuracy},
                {"band", std::string(to_string(a.band))},
                {"best_scaling", std::string(to_string(a.best_scaling))},
                {"per_scaling", per}}
               .dump(2) +
           "\n";
}

std::string emit_scatter(const std::vector<SimilarityReport>& reports,
                         const std::map<std::string, AccuracyBand>& accuracies) {
    std::string out = "cand_id,accuracy,metric,score,verdict,band,excluded\n";
    for (const auto& r : reports) {
        const auto it = accuracies.find(r.cand_id);
        if (it == accuracies.end()) throw Error(ErrorCode::UnknownId, "no accuracy recorded for " + r.cand_id);
        const auto& acc = it->second;
        for (const auto& m : r.results)
            out += csv_field(r.cand_id) + "," + format_score(acc.accuracy) + "," + std::string(to_string(m.metric)) + "," +
                   format_score(m.score) + "," + std::string(to_string(m.verdict)) + "," +
                   std::string(to_string(acc.band)) + "," + (acc.band == Band::Undecided ? "true" : "false") + "\n";
    }
    return out;
}

} // namespace fsim
