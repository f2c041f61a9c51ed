#include "fsim/corpus.hpp"

#include <set>

#include <json.hpp>

#include "file_io.hpp"
#include "fsim/error.hpp"

namespace fsim {

using nlohmann::json;

std::string_view to_string(CorpusMode mode) { return mode == CorpusMode::Uniform ? "uniform" : "brinc"; }

std::string serialize_corpus(const InputCorpus& c) {
    json doc;
    doc["format"] = "nic";
    doc["version"] = 1;
    doc["shape"] = c.shape;
    doc["mode"] = std::string(to_string(c.provenance.mode));
    doc["seed"] = c.provenance.seed;
    doc["params"] = json::parse(c.provenance.params_json);
    json rows = json::array();
    for (const auto& r : c.rows) rows.push_back(r.values());
    doc["rows"] = std::move(rows);
    return doc.dump() + "\n";
}

InputCorpus parse_corpus(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::ParseError, e.what());
    }
    static const std::set<std::string> keys{"format", "version", "shape", "mode", "seed", "params", "rows"};
    if (!doc.is_object()) throw Error(ErrorCode::ParseError, "corpus must be a JSON object");
    for (auto it = doc.begin(); it != doc.end(); ++it)
        if (!keys.count(it.key())) throw Error(ErrorCode::ParseError, "corpus: unknown field '" + it.key() + "'");
    for (const auto& k : keys)
        if (!doc.contains(k)) throw Error(ErrorCode::ParseError, "corpus: missing field '" + k + "'");
    if (doc["format"] != "nic" || doc["version"] != 1) throw Error(ErrorCode::ParseError, "not a version 1 NIC file");

    InputCorpus c;
    try {
        c.shape = doc["shape"].get<Shape>();
        const auto mode = doc["mode"].get<std::string>();
        if (mode == "uniform")
            c.provenance.mode = CorpusMode::Uniform;
        else if (mode == "brinc")
            c.provenance.mode = CorpusMode::Brinc;
        else
            throw Error(ErrorCode::ParseError, "unknown corpus mode '" + mode + "'");
        c.provenance.seed = doc["seed"].get<std::uint64_t>();
        if (!doc["params"].is_object()) throw Error(ErrorCode::ParseError, "corpus params must be an object");
        c.provenance.params_json = doc["params"].dump();
        for (const auto& row : doc["rows"]) c.rows.emplace_back(c.shape, row.get<std::vector<double>>());
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ParseError, e.what());
    } catch (const Error& e) {
        if (e.code() == ErrorCode::ShapeMismatch) throw Error(ErrorCode::ParseError, e.what());
        throw;
    }
    return c;
}

void save_corpus(const InputCorpus& c, const std::filesystem::path& path) {
    detail::write_text(path, serialize_corpus(c));
}

InputCorpus load_corpus(const std::filesystem::path& path) { return parse_corpus(detail::read_text(path)); }

} // namespace fsim
