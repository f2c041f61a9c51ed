#include "fsim/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <sstream>

#include "file_io.hpp"
#include "fsim/error.hpp"

namespace fsim {

std::size_t LabeledDataset::n_classes() const { return y.empty() ? 0 : *std::max_element(y.begin(), y.end()) + 1; }

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            cells.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur.push_back(ch);
        }
    }
    cells.push_back(cur);
    return cells;
}

std::string format_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

} // namespace

std::string dataset_to_csv(const LabeledDataset& ds) {
    std::string out;
    for (std::size_t c = 0; c < ds.dim; ++c) out += "f" + std::to_string(c) + ",";
    out += "label\n";
    for (std::size_t r = 0; r < ds.rows; ++r) {
        for (std::size_t c = 0; c < ds.dim; ++c) out += format_double(ds.x[r * ds.dim + c]) + ",";
        out += std::to_string(ds.y[r]) + "\n";
    }
    return out;
}

LabeledDataset dataset_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorCode::ParseError, "dataset is empty (no header)");
    const auto header = split(line);
    if (header.size() < 2) throw Error(ErrorCode::ParseError, "dataset needs at least one feature and a label column");

    LabeledDataset ds;
    ds.dim = header.size() - 1;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto cells = split(line);
        if (cells.size() != header.size())
            throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": expected " +
                                                   std::to_string(header.size()) + " columns");
        for (std::size_t c = 0; c < ds.dim; ++c) {
            double v = 0.0;
            const auto& s = cells[c];
            auto res = std::from_chars(s.data(), s.data() + s.size(), v);
            if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
                throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": bad number '" + s + "'");
            ds.x.push_back(v);
        }
        const auto& ls = cells.back();
        std::size_t label = 0;
        auto res = std::from_chars(ls.data(), ls.data() + ls.size(), label);
        if (res.ec != std::errc{} || res.ptr != ls.data() + ls.size())
            throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": bad label '" + ls + "'");
        ds.y.push_back(label);
        ++ds.rows;
    }
    return ds;
}

void save_dataset(const LabeledDataset& ds, const std::filesystem::path& path) {
    detail::write_text(path, dataset_to_csv(ds));
}

LabeledDataset load_dataset(const std::filesystem::path& path) { return dataset_from_csv(detail::read_text(path)); }

} // namespace fsim
