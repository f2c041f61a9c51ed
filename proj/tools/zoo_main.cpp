// zoo: desk-scale model factory for exercising the similarity metrics.
//
//   zoo make-blobs --classes 4 --dim 16 --per-class 200 --seed 7 --out blobs.csv
//   zoo train --data blobs.csv --layers 16,32,4 --epochs 10 --lr 0.01 --seed 1 --out model.nfm
//   zoo sensitivity --out sensitivity.csv [--seed S]

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "fsim/error.hpp"
#include "fsim/zoo.hpp"

namespace {

std::vector<std::size_t> parse_layers(const std::string& text) {
    std::vector<std::size_t> sizes;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) sizes.push_back(std::stoul(item));
    return sizes;
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw fsim::Error(fsim::ErrorCode::IoError, "cannot write " + path);
    out << text;
}

} // namespace

int main(int argc, char** argv) {
    using namespace fsim;
    CLI::App app{"Synthetic datasets, trainer and sensitivity suite"};
    app.require_subcommand(1);

    std::size_t classes = 4, dim = 16, per_class = 200;
    double spread = 0.15;
    std::uint64_t blob_seed = 7;
    std::string out;
    auto* blobs = app.add_subcommand("make-blobs", "Write a Gaussian-blob dataset as CSV");
    blobs->add_option("--classes", classes)->capture_default_str();
    blobs->add_option("--dim", dim)->capture_default_str();
    blobs->add_option("--per-class", per_class)->capture_default_str();
    blobs->add_option("--spread", spread)->capture_default_str();
    blobs->add_option("--seed", blob_seed)->capture_default_str();
    blobs->add_option("--out", out)->required();

    std::string data, layers;
    zoo::TrainConfig tc;
    auto* train = app.add_subcommand("train", "Train an MLP classifier and save it as NFM");
    train->add_option("--data", data)->required();
    train->add_option("--layers", layers, "Comma-separated layer sizes, input first")->required();
    train->add_option("--epochs", tc.epochs)->capture_default_str();
    train->add_option("--lr", tc.learning_rate)->capture_default_str();
    train->add_option("--batch", tc.batch_size)->capture_default_str();
    train->add_option("--seed", tc.seed)->capture_default_str();
    train->add_option("--out", out)->required();

    zoo::SensitivityConfig sc;
    std::string summary;
    auto* sens = app.add_subcommand("sensitivity", "Run the sensitivity suite and write per-run scores");
    sens->add_option("--out", out)->required();
    sens->add_option("--seed", sc.seed)->capture_default_str();
    sens->add_option("--runs", sc.runs)->capture_default_str();
    sens->add_option("--inputs", sc.inputs)->capture_default_str();
    sens->add_option("--summary", summary, "Also write box statistics per group and metric");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*blobs) {
            save_dataset(zoo::make_blobs(classes, dim, per_class, spread, blob_seed), out);
        } else if (*train) {
            const auto ds = load_dataset(data);
            const auto res = zoo::train_mlp_logged(parse_layers(layers), ds, tc);
            for (std::size_t e = 0; e < res.epoch_losses.size(); ++e)
                std::cerr << "epoch " << e + 1 << " loss " << res.epoch_losses[e] << "\n";
            std::cerr << "train accuracy " << zoo::train_accuracy(res.model, ds) << "\n";
            save_model(res.model, out);
        } else if (*sens) {
            const auto suite = zoo::sensitivity_suite(sc);
            write_file(out, zoo::sensitivity_csv(suite));
            const auto box = zoo::sensitivity_summary_csv(suite);
            if (!summary.empty()) write_file(summary, box);
            std::cout << box;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
