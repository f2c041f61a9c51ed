// fsim: functional similarity of black-box classifiers on random inputs.
//
//   fsim compare   --ref a.nfm --cand b.nfm [--out report.json]
//   fsim scan      --ref a.nfm --dir models/ [--out results.csv] [--json reports.json]
//   fsim accuracy  --model a.nfm --data test.csv [--out band.json]
//   fsim geninputs --model a.nfm --mode uniform|brinc --out corpus.nic
//
// Exit codes: 0 report produced, 2 incompatible models, 3 load failure,
// 4 input generation failure, 1 anything else.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "fsim/error.hpp"
#include "fsim/inputgen.hpp"
#include "fsim/pipeline.hpp"

namespace {

using namespace fsim;

constexpr int kExitIncompatible = 2;
constexpr int kExitLoad = 3;
constexpr int kExitGeneration = 4;

int exit_code_for(ErrorCode code) {
    switch (code) {
    case ErrorCode::ParseError:
    case ErrorCode::NotAClassifier:
    case ErrorCode::ShapeChainError:
    case ErrorCode::InvalidModel:
    case ErrorCode::IoError: return kExitLoad;
    case ErrorCode::LabelUnreachable: return kExitGeneration;
    default: return 1;
    }
}

void write_or_print(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
    out << text;
}

struct CommonFlags {
    std::size_t inputs = kDefaultUniformInputs;
    std::uint64_t seed = 42;
    std::string metrics = "cca,spearman,overlap";
    double alpha = 0.9;
    std::size_t max_valid = 1000;

    void attach(CLI::App* app) {
        app->add_option("--inputs", inputs, "Number of uniform random inputs")->capture_default_str();
        app->add_option("--seed", seed, "Master seed")->capture_default_str();
        app->add_option("--metrics", metrics, "Comma-separated subset of cca,spearman,overlap")->capture_default_str();
        app->add_option("--alpha", alpha, "Overlap similarity factor")->capture_default_str();
        app->add_option("--brinc-max-valid", max_valid, "Accepted balanced mutants per range")->capture_default_str();
    }

    CompareConfig config() const {
        CompareConfig cfg;
        cfg.n_uniform = inputs;
        cfg.seed = seed;
        cfg.thresholds.alpha = alpha;
        cfg.brinc.max_valid = max_valid;
        cfg.metrics.clear();
        std::stringstream ss(metrics);
        std::string item;
        while (std::getline(ss, item, ',')) {
            const auto m = parse_metric(item);
            if (!m) throw CLI::ValidationError("--metrics", "unknown metric '" + item + "'");
            if (!cfg.wants(*m)) cfg.metrics.push_back(*m);
        }
        return cfg;
    }
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Functional similarity of black-box neural classifiers"};
    app.require_subcommand(1);

    CommonFlags compare_flags, scan_flags;
    std::string ref, cand, dir, out, json_out, model_path, data_path, mode = "uniform";
    bool timings = false;
    std::size_t count = kDefaultUniformInputs;
    std::uint64_t gen_seed = 42;

    auto* cmp = app.add_subcommand("compare", "Compare a candidate model against a reference");
    cmp->add_option("--ref", ref, "Reference model (.nfm)")->required();
    cmp->add_option("--cand", cand, "Candidate model (.nfm)")->required();
    cmp->add_option("--out", out, "Report JSON path (stdout if omitted)");
    cmp->add_flag("--timings", timings, "Include wall-clock timings in the report");
    compare_flags.attach(cmp);

    auto* scn = app.add_subcommand("scan", "Compare a reference against every model in a directory");
    scn->add_option("--ref", ref, "Reference model (.nfm)")->required();
    scn->add_option("--dir", dir, "Directory of candidate *.nfm files")->required();
    scn->add_option("--out", out, "Results CSV path (stdout if omitted)");
    scn->add_option("--json", json_out, "Also write every report as JSON");
    scan_flags.attach(scn);

    auto* acc = app.add_subcommand("accuracy", "Ground-truth accuracy band on a labelled dataset");
    acc->add_option("--model", model_path, "Model (.nfm)")->required();
    acc->add_option("--data", data_path, "Labelled CSV")->required();
    acc->add_option("--out", out, "Band JSON path (stdout if omitted)");

    auto* gen = app.add_subcommand("geninputs", "Generate a random input corpus for a model");
    gen->add_option("--model", model_path, "Model (.nfm)")->required();
    gen->add_option("--mode", mode, "uniform or brinc")->check(CLI::IsMember({"uniform", "brinc"}));
    gen->add_option("--count", count, "Rows for uniform mode")->capture_default_str();
    gen->add_option("--seed", gen_seed, "Seed")->capture_default_str();
    gen->add_option("--out", out, "Corpus path (.nic)")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*cmp) {
            const auto cfg = compare_flags.config();
            for (const auto& w : cfg.validate()) std::cerr << "warning: " << w << "\n";
            const auto report = compare(ref, cand, cfg);
            write_or_print(out, report_json(report, timings));
            if (!report.compat.compatible()) {
                std::cerr << "incompatible: " << report.compat.reason << "\n";
                return kExitIncompatible;
            }
            return 0;
        }
        if (*scn) {
            const auto cfg = scan_flags.config();
            const auto result = scan(ref, dir, cfg);
            for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
            write_or_print(out, scan_csv(result));
            if (!json_out.empty()) write_or_print(json_out, scan_json(result));
            return 0;
        }
        if (*acc) {
            write_or_print(out, accuracy_json(accuracy(model_path, data_path)));
            return 0;
        }
        if (*gen) {
            const auto model = load_model(model_path);
            InputCorpus corpus;
            if (mode == "uniform") {
                corpus = gen_uniform(model.input_shape, count, {-1.0, 1.0}, gen_seed);
            } else {
                RandomSource rng(gen_seed);
                corpus = brinc_generate(model, BrincParams{}, rng);
            }
            save_corpus(corpus, out);
            std::cerr << "wrote " << corpus.size() << " inputs to " << out << "\n";
            return 0;
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
