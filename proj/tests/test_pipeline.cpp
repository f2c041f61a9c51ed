#include <doctest.h>

#include <cmath>
#include <fstream>

#include "fsim/error.hpp"
#include "fsim/pipeline.hpp"
#include "fsim/zoo.hpp"
#include "helpers.hpp"

using namespace fsim;

namespace {

CompareConfig small_config() {
    CompareConfig cfg;
    cfg.n_uniform = 600;
    cfg.brinc.max_valid = 40;
    cfg.seed = 11;
    return cfg;
}

const MetricResult& result_for(const SimilarityReport& r, Metric m) {
    for (const auto& x : r.results)
        if (x.metric == m) return x;
    throw std::runtime_error("metric missing");
}

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

} // namespace

TEST_CASE("self comparison") {
    RandomSource rng(1);
    const auto m = testutil::random_mlp({8, 12, 4}, rng);
    const auto r = compare_models(m, m, small_config());
    REQUIRE(r.compat.compatible());
    REQUIRE(r.results.size() == 3);
    CHECK(std::abs(result_for(r, Metric::Spearman).score - 1.0) <= 1e-9);
    CHECK(std::abs(result_for(r, Metric::Cca).score - 1.0) <= 1e-6);
    CHECK(result_for(r, Metric::Overlap).score == 1.0);
    for (const auto& x : r.results) CHECK(x.verdict == Verdict::Similar);
}

TEST_CASE("incompatible pairs give an empty report") {
    RandomSource rng(2);
    const auto ten = testutil::random_mlp({6, 10}, rng);
    const auto eleven = testutil::random_mlp({6, 11}, rng);
    const auto r = compare_models(ten, eleven, small_config());
    CHECK_FALSE(r.compat.compatible());
    CHECK(r.results.empty());
    CHECK(r.compat.reason.find("output incompatible") != std::string::npos);
    const auto js = report_json(r);
    CHECK(js.find("\"results\": []") != std::string::npos);
}

TEST_CASE("correlation scores are symmetric across reference and candidate") {
    RandomSource rng(3);
    const auto a = testutil::random_mlp({8, 10, 3}, rng);
    const auto b = testutil::random_mlp({8, 10, 3}, rng);
    const auto ab = compare_models(a, b, small_config());
    const auto ba = compare_models(b, a, small_config());
    for (auto m : {Metric::Cca, Metric::Spearman})
        CHECK(std::abs(result_for(ab, m).score - result_for(ba, m).score) <= 1e-9);
}

TEST_CASE("report verdicts agree with their scores") {
    RandomSource rng(4);
    for (int t = 0; t < 5; ++t) {
        const auto a = testutil::random_mlp({6, 8, 3}, rng);
        const auto b = testutil::random_mlp({6, 8, 3}, rng);
        const auto r = compare_models(a, b, small_config());
        for (const auto& x : r.results) {
            if (x.metric == Metric::Overlap)
                CHECK(x.verdict == verdict_overlap(x.score, 3));
            else
                CHECK(x.verdict == verdict_corr(x.score, {}, x.metric == Metric::Spearman).verdict);
        }
    }
}

TEST_CASE("compare is deterministic and file based") {
    const auto dir = testutil::temp_dir("compare");
    RandomSource rng(5);
    save_model(testutil::random_mlp({5, 6, 3}, rng), dir / "a.nfm");
    save_model(testutil::random_mlp({5, 6, 3}, rng), dir / "b.nfm");
    const auto r1 = compare(dir / "a.nfm", dir / "b.nfm", small_config());
    const auto r2 = compare(dir / "a.nfm", dir / "b.nfm", small_config());
    CHECK(r1.ref_id == "a.nfm");
    CHECK(r1.cand_id == "b.nfm");
    CHECK(report_json(r1) == report_json(r2));
    CHECK(report_json(r1, true).find("timings") != std::string::npos);
    CHECK(report_json(r1).find("timings") == std::string::npos);

    auto other = small_config();
    other.seed = 12;
    CHECK(report_json(compare(dir / "a.nfm", dir / "b.nfm", other)) != report_json(r1));
    CHECK_THROWS_AS(compare(dir / "a.nfm", dir / "missing.nfm", small_config()), Error);
}

TEST_CASE("metric selection") {
    RandomSource rng(6);
    const auto m = testutil::random_mlp({4, 3}, rng);
    auto cfg = small_config();
    cfg.metrics = {Metric::Spearman};
    const auto r = compare_models(m, m, cfg);
    REQUIRE(r.results.size() == 1);
    CHECK(r.results[0].metric == Metric::Spearman);
}

TEST_CASE("config validation") {
    CompareConfig cfg;
    CHECK(cfg.validate().empty());
    cfg.n_uniform = 1000;
    CHECK(cfg.validate().size() == 1);
    cfg.n_uniform = 1;
    CHECK_THROWS_AS(cfg.validate(), Error);
    cfg = {};
    cfg.metrics.clear();
    CHECK_THROWS_AS(cfg.validate(), Error);
}

TEST_CASE("scan keeps every candidate") {
    const auto dir = testutil::temp_dir("scan");
    const auto cands = dir / "cands";
    std::filesystem::create_directories(cands);
    RandomSource rng(7);
    save_model(testutil::random_mlp({6, 8, 3}, rng), dir / "ref.nfm");
    save_model(testutil::random_mlp({6, 8, 3}, rng), cands / "c1.nfm");
    save_model(testutil::random_mlp({6, 8, 3}, rng), cands / "c2.nfm");
    save_model(testutil::random_mlp({6, 8, 4}, rng), cands / "c3.nfm");
    auto cfg = small_config();
    cfg.metrics = {Metric::Spearman};

    const auto s = scan(dir / "ref.nfm", cands, cfg);
    REQUIRE(s.entries.size() == 3);
    CHECK(s.entries[0].cand_id == "c1.nfm");
    CHECK_FALSE(s.entries[2].ok);
    const auto csv = scan_csv(s);
    CHECK(csv.rfind("cand_id,status,metric,score,verdict,reason\n", 0) == 0);
    CHECK(count_lines(csv) == 4);
    CHECK(csv.find("c3.nfm,skipped") != std::string::npos);
    CHECK(scan_csv(scan(dir / "ref.nfm", cands, cfg)) == csv);
    CHECK(scan_json(scan(dir / "ref.nfm", cands, cfg)) == scan_json(s));

    // scan results match individual comparisons
    const auto single = compare(dir / "ref.nfm", cands / "c2.nfm", cfg);
    CHECK(report_json(single) == report_json(*s.entries[1].report));

    // unreadable candidates are skipped, not fatal
    std::ofstream(cands / "broken.nfm") << "{not json";
    const auto s2 = scan(dir / "ref.nfm", cands, cfg);
    CHECK(s2.entries.size() == 4);
    CHECK_FALSE(s2.entries[0].ok);
    CHECK(s2.entries[0].cand_id == "broken.nfm");
}

TEST_CASE("scan of an empty directory") {
    const auto dir = testutil::temp_dir("scan_empty");
    std::filesystem::create_directories(dir / "none");
    RandomSource rng(8);
    save_model(testutil::random_mlp({4, 3}, rng), dir / "ref.nfm");
    const auto s = scan(dir / "ref.nfm", dir / "none", small_config());
    CHECK(s.entries.empty());
    CHECK_FALSE(s.warnings.empty());
    CHECK(scan_csv(s) == "cand_id,status,metric,score,verdict,reason\n");
    CHECK_THROWS_AS(scan(dir / "ref.nfm", dir / "nope", small_config()), Error);
}

TEST_CASE("bands") {
    CHECK(band_for(0.65) == Band::Match);
    CHECK(band_for(0.9) == Band::Match);
    CHECK(band_for(0.60) == Band::Undecided);
    CHECK(band_for(0.50) == Band::Undecided);
    CHECK(band_for(0.4999) == Band::Different);
}

TEST_CASE("feature scalings") {
    LabeledDataset ds{2, 2, {0, 255, 51, 102}, {0, 1}};
    CHECK(apply_scaling(ds, Scaling::Identity) == ds);
    CHECK(apply_scaling(ds, Scaling::Div255).x == std::vector<double>{0, 1, 0.2, 0.4});
    CHECK(apply_scaling(ds, Scaling::MinMax01).x == std::vector<double>{0, 1, 0.2, 0.4});
    const auto sym = apply_scaling(ds, Scaling::MinMaxSym).x;
    CHECK(sym[0] == -1.0);
    CHECK(sym[1] == 1.0);
    CHECK(sym[2] == doctest::Approx(-0.6));
}

TEST_CASE("accuracy") {
    const auto ds = zoo::make_blobs(3, 6, 100, 0.1, 3);
    zoo::TrainConfig tc;
    tc.epochs = 30;
    tc.learning_rate = 0.05;
    const auto trained = zoo::train_mlp({6, 16, 3}, ds, tc);
    const auto a = accuracy(trained, ds);
    CHECK(a.band == Band::Match);
    CHECK(a.per_scaling.size() == 4);
    CHECK(a.accuracy == doctest::Approx(zoo::train_accuracy(trained, ds)).epsilon(0.05));

    // scaled copy of the data: the /255 scaling recovers the original accuracy
    auto big = ds;
    for (auto& v : big.x) v = (v + 1.0) * 127.5;
    const auto a255 = accuracy(trained, big);
    CHECK(a255.accuracy >= 0.5);

    RandomSource rng(9);
    double total = 0;
    const int trials = 10;
    for (int t = 0; t < trials; ++t) {
        const auto r = testutil::random_mlp({6, 3}, rng, 0.01);
        total += accuracy(r, ds).per_scaling[0].second;
    }
    CHECK(total / trials < 0.5);

    LabeledDataset wrong{1, 5, {0, 0, 0, 0, 0}, {0}};
    CHECK_THROWS_AS(accuracy(trained, wrong), Error);
    CHECK(accuracy_json(a).find("\"band\"") != std::string::npos);
}

TEST_CASE("emit_scatter") {
    RandomSource rng(10);
    const auto a = testutil::random_mlp({4, 3}, rng);
    const auto b = testutil::random_mlp({4, 3}, rng);
    const auto c = testutil::random_mlp({4, 3}, rng);
    std::vector<SimilarityReport> reports{compare_models(a, b, small_config(), "a", "b"),
                                          compare_models(a, c, small_config(), "a", "c")};
    std::map<std::string, AccuracyBand> acc;
    acc["b"].accuracy = 0.9;
    acc["b"].band = Band::Match;
    acc["c"].accuracy = 0.6;
    acc["c"].band = Band::Undecided;
    const auto csv = emit_scatter(reports, acc);
    CHECK(count_lines(csv) == 7);
    CHECK(csv.rfind("cand_id,accuracy,metric,score,verdict,band,excluded\n", 0) == 0);
    CHECK(csv.find("Undecided,true") != std::string::npos);
    CHECK(csv.find("Match,false") != std::string::npos);

    acc.erase("c");
    CHECK_THROWS_AS(emit_scatter(reports, acc), Error);
    CHECK(count_lines(emit_scatter({}, {})) == 1);
}

TEST_CASE("csv quoting") {
    CHECK(csv_field("plain") == "plain");
    CHECK(csv_field("a,b") == "\"a,b\"");
    CHECK(csv_field("say \"x\"") == "\"say \"\"x\"\"\"");
}
