#include "fsim/model.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "fsim/corpus.hpp"
#include "fsim/error.hpp"
#include "fsim/kernels.hpp"
#include "file_io.hpp"

namespace fsim {

using nlohmann::json;

std::vector<double> PredictionMatrix::column(std::size_t c) const {
    std::vector<double> out(rows);
    for (std::size_t r = 0; r < rows; ++r) out[r] = values[r * cols + c];
    return out;
}

std::vector<std::size_t> PredictionMatrix::informative_columns() const {
    if (sigmoid_expanded) return {1};
    std::vector<std::size_t> idx(cols);
    for (std::size_t c = 0; c < cols; ++c) idx[c] = c;
    return idx;
}

PredictionMatrix vconcat(const PredictionMatrix& top, const PredictionMatrix& bottom) {
    if (top.cols != bottom.cols || top.sigmoid_expanded != bottom.sigmoid_expanded)
        throw Error(ErrorCode::ShapeMismatch, "cannot stack prediction matrices of different widths");
    PredictionMatrix out = top;
    out.rows += bottom.rows;
    out.values.insert(out.values.end(), bottom.values.begin(), bottom.values.end());
    return out;
}

std::string_view to_string(Activation a) {
    switch (a) {
    case Activation::Relu: return "relu";
    case Activation::Sigmoid: return "sigmoid";
    case Activation::Softmax: return "softmax";
    case Activation::Linear: return "linear";
    }
    return "linear";
}

std::string_view to_string(OutputKind k) { return k == OutputKind::Softmax ? "softmax" : "sigmoid"; }

namespace {

Activation parse_activation(const std::string& s) {
    if (s == "relu") return Activation::Relu;
    if (s == "sigmoid") return Activation::Sigmoid;
    if (s == "softmax") return Activation::Softmax;
    if (s == "linear") return Activation::Linear;
    throw Error(ErrorCode::ParseError, "unknown activation '" + s + "'");
}

std::string describe(const Shape& s) {
    std::ostringstream os;
    os << '(';
    for (std::size_t i = 0; i < s.size(); ++i) os << (i ? "," : "") << s[i];
    os << ')';
    return os.str();
}

// Output shape of one layer applied to `in`; throws ShapeChainError.
Shape chain_step(const LayerSpec& layer, const Shape& in, std::size_t index) {
    const std::string where = "layer " + std::to_string(index) + ": ";
    return std::visit(
        [&](const auto& l) -> Shape {
            using L = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<L, DenseLayer>) {
                if (l.weights.rank() != 2) throw Error(ErrorCode::ShapeChainError, where + "dense weights must be 2-D");
                const auto units = l.weights.shape()[0];
                const auto fan_in = l.weights.shape()[1];
                if (in.size() != 1)
                    throw Error(ErrorCode::ShapeChainError,
                                where + "dense layer needs a rank-1 input, got " + describe(in) + " (add flatten)");
                if (in[0] != fan_in)
                    throw Error(ErrorCode::ShapeChainError, where + "dense layer declares " + std::to_string(fan_in) +
                                                                " inputs after a layer producing " +
                                                                std::to_string(in[0]));
                if (l.bias.size() != units) throw Error(ErrorCode::ShapeChainError, where + "bias length differs from units");
                return Shape{units};
            } else if constexpr (std::is_same_v<L, Conv2DLayer>) {
                if (l.kernels.rank() != 4) throw Error(ErrorCode::ShapeChainError, where + "conv kernels must be 4-D");
                const auto& k = l.kernels.shape();
                if (in.size() != 3)
                    throw Error(ErrorCode::ShapeChainError, where + "conv2d needs a [C,H,W] input, got " + describe(in));
                if (in[0] != k[1]) throw Error(ErrorCode::ShapeChainError, where + "conv2d input channel mismatch");
                if (k[2] > in[1] || k[3] > in[2]) throw Error(ErrorCode::ShapeChainError, where + "conv2d kernel larger than input");
                if (l.stride == 0) throw Error(ErrorCode::ShapeChainError, where + "conv2d stride must be positive");
                if (l.bias.size() != k[0]) throw Error(ErrorCode::ShapeChainError, where + "conv2d bias length mismatch");
                if (l.activation == Activation::Softmax)
                    throw Error(ErrorCode::ShapeChainError, where + "softmax is not an elementwise conv activation");
                return Shape{k[0], (in[1] - k[2]) / l.stride + 1, (in[2] - k[3]) / l.stride + 1};
            } else if constexpr (std::is_same_v<L, MaxPool2DLayer>) {
                if (in.size() != 3)
                    throw Error(ErrorCode::ShapeChainError, where + "maxpool2d needs a [C,H,W] input, got " + describe(in));
                if (l.window == 0 || l.stride == 0)
                    throw Error(ErrorCode::ShapeChainError, where + "maxpool2d window and stride must be positive");
                if (l.window > in[1] || l.window > in[2])
                    throw Error(ErrorCode::ShapeChainError, where + "maxpool2d window larger than input");
                return Shape{in[0], (in[1] - l.window) / l.stride + 1, (in[2] - l.window) / l.stride + 1};
            } else {
                return Shape{shape_product(in)};
            }
        },
        layer);
}

} // namespace

void validate(const Model& m) {
    if (m.input_shape.empty()) throw Error(ErrorCode::InvalidModel, "model has no input shape");
    for (auto d : m.input_shape)
        if (d == 0) throw Error(ErrorCode::InvalidModel, "input shape has a zero dimension");
    if (m.layers.empty()) throw Error(ErrorCode::InvalidModel, "model has no layers");

    Shape cur = m.input_shape;
    for (std::size_t i = 0; i < m.layers.size(); ++i) cur = chain_step(m.layers[i], cur, i);

    const auto* head = std::get_if<DenseLayer>(&m.layers.back());
    if (!head) throw Error(ErrorCode::NotAClassifier, "final layer is not dense");
    const auto units = head->weights.shape()[0];
    if (head->activation == Activation::Softmax) {
        if (units < 2) throw Error(ErrorCode::NotAClassifier, "softmax head needs at least two units");
    } else if (head->activation == Activation::Sigmoid) {
        if (units != 1) throw Error(ErrorCode::NotAClassifier, "sigmoid head must have exactly one unit");
    } else {
        throw Error(ErrorCode::NotAClassifier,
                    "final activation '" + std::string(to_string(head->activation)) + "' is neither softmax nor sigmoid");
    }
}

// ---- NFM ----------------------------------------------------------------

namespace {

void require_keys(const json& obj, const std::set<std::string>& allowed, const std::set<std::string>& required,
                  const std::string& what) {
    if (!obj.is_object()) throw Error(ErrorCode::ParseError, what + " must be an object");
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key())) throw Error(ErrorCode::ParseError, what + ": unknown field '" + it.key() + "'");
    for (const auto& k : required)
        if (!obj.contains(k)) throw Error(ErrorCode::ParseError, what + ": missing field '" + k + "'");
}

std::size_t positive_int(const json& j, const std::string& what) {
    if (!j.is_number_integer() || j.get<long long>() <= 0)
        throw Error(ErrorCode::ParseError, what + " must be a positive integer");
    return j.get<std::size_t>();
}

double number(const json& j) {
    if (!j.is_number()) throw Error(ErrorCode::ParseError, "expected a number");
    return j.get<double>();
}

// Nested rectangular array of numbers of the given depth.
Tensor nested_tensor(const json& j, std::size_t depth, const std::string& what) {
    Shape shape;
    const json* probe = &j;
    for (std::size_t d = 0; d < depth; ++d) {
        if (!probe->is_array() || probe->empty())
            throw Error(ErrorCode::ParseError, what + " must be a non-empty " + std::to_string(depth) + "-D array");
        shape.push_back(probe->size());
        probe = &(*probe)[0];
    }
    std::vector<double> flat;
    flat.reserve(shape_product(shape));
    auto walk = [&](auto&& self, const json& node, std::size_t d) -> void {
        if (d == depth) {
            flat.push_back(number(node));
            return;
        }
        if (!node.is_array() || node.size() != shape[d])
            throw Error(ErrorCode::ParseError, what + " is not rectangular");
        for (const auto& child : node) self(self, child, d + 1);
    };
    walk(walk, j, 0);
    return Tensor(shape, std::move(flat));
}

json tensor_json(const Tensor& t, std::size_t dim, std::size_t offset) {
    const auto& s = t.shape();
    json arr = json::array();
    std::size_t stride = 1;
    for (std::size_t d = dim + 1; d < s.size(); ++d) stride *= s[d];
    for (std::size_t i = 0; i < s[dim]; ++i) {
        if (dim + 1 == s.size())
            arr.push_back(t[offset + i]);
        else
            arr.push_back(tensor_json(t, dim + 1, offset + i * stride));
    }
    return arr;
}

Shape parse_shape(const json& j, const std::string& what) {
    if (!j.is_array() || j.empty()) throw Error(ErrorCode::ParseError, what + " must be a non-empty array");
    Shape s;
    for (const auto& d : j) s.push_back(positive_int(d, what + " entry"));
    return s;
}

LayerSpec parse_layer(const json& j, std::size_t index) {
    const std::string what = "layer " + std::to_string(index);
    if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
        throw Error(ErrorCode::ParseError, what + ": missing kind");
    const auto kind = j["kind"].get<std::string>();
    if (kind == "dense") {
        require_keys(j, {"kind", "units", "activation", "weights", "bias"}, {"kind", "units", "activation", "weights", "bias"},
                     what);
        DenseLayer l;
        const auto units = positive_int(j["units"], what + " units");
        l.weights = nested_tensor(j["weights"], 2, what + " weights");
        l.bias = nested_tensor(j["bias"], 1, what + " bias");
        if (!j["activation"].is_string()) throw Error(ErrorCode::ParseError, what + ": activation must be a string");
        l.activation = parse_activation(j["activation"].get<std::string>());
        if (l.weights.shape()[0] != units)
            throw Error(ErrorCode::ParseError, what + ": units disagree with weight rows");
        return l;
    }
    if (kind == "conv2d") {
        require_keys(j, {"kind", "kernels", "bias", "stride", "activation"}, {"kind", "kernels", "bias", "stride", "activation"},
                     what);
        Conv2DLayer l;
        l.kernels = nested_tensor(j["kernels"], 4, what + " kernels");
        l.bias = nested_tensor(j["bias"], 1, what + " bias");
        l.stride = positive_int(j["stride"], what + " stride");
        if (!j["activation"].is_string()) throw Error(ErrorCode::ParseError, what + ": activation must be a string");
        l.activation = parse_activation(j["activation"].get<std::string>());
        return l;
    }
    if (kind == "maxpool2d") {
        require_keys(j, {"kind", "window", "stride"}, {"kind", "window", "stride"}, what);
        return MaxPool2DLayer{positive_int(j["window"], what + " window"), positive_int(j["stride"], what + " stride")};
    }
    if (kind == "flatten") {
        require_keys(j, {"kind"}, {"kind"}, what);
        return FlattenLayer{};
    }
    throw Error(ErrorCode::ParseError, what + ": unknown layer kind '" + kind + "'");
}

json layer_json(const LayerSpec& layer) {
    return std::visit(
        [](const auto& l) -> json {
            using L = std::decay_t<decltype(l)>;
            json j;
            if constexpr (std::is_same_v<L, DenseLayer>) {
                j["kind"] = "dense";
                j["units"] = l.weights.shape()[0];
                j["activation"] = std::string(to_string(l.activation));
                j["weights"] = tensor_json(l.weights, 0, 0);
                j["bias"] = tensor_json(l.bias, 0, 0);
            } else if constexpr (std::is_same_v<L, Conv2DLayer>) {
                j["kind"] = "conv2d";
                j["kernels"] = tensor_json(l.kernels, 0, 0);
                j["bias"] = tensor_json(l.bias, 0, 0);
                j["stride"] = l.stride;
                j["activation"] = std::string(to_string(l.activation));
            } else if constexpr (std::is_same_v<L, MaxPool2DLayer>) {
                j["kind"] = "maxpool2d";
                j["window"] = l.window;
                j["stride"] = l.stride;
            } else {
                j["kind"] = "flatten";
            }
            return j;
        },
        layer);
}

} // namespace

Model parse_model(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::ParseError, e.what());
    }
    require_keys(doc, {"format", "version", "input_shape", "layers"}, {"format", "version", "input_shape", "layers"}, "model");
    if (doc["format"] != "nfm") throw Error(ErrorCode::ParseError, "format must be \"nfm\"");
    if (doc["version"] != 1) throw Error(ErrorCode::ParseError, "unsupported NFM version");

    Model m;
    m.input_shape = parse_shape(doc["input_shape"], "input_shape");
    if (!doc["layers"].is_array()) throw Error(ErrorCode::ParseError, "layers must be an array");
    for (std::size_t i = 0; i < doc["layers"].size(); ++i) m.layers.push_back(parse_layer(doc["layers"][i], i));
    validate(m);
    return m;
}

std::string serialize_model(const Model& m) {
    validate(m);
    json doc;
    doc["format"] = "nfm";
    doc["version"] = 1;
    doc["input_shape"] = m.input_shape;
    doc["layers"] = json::array();
    for (const auto& l : m.layers) doc["layers"].push_back(layer_json(l));
    return doc.dump() + "\n";
}

Model load_model(const std::filesystem::path& path) { return parse_model(detail::read_text(path)); }

void save_model(const Model& m, const std::filesystem::path& path) { detail::write_text(path, serialize_model(m)); }

ModelMeta inspect_meta(const Model& m) {
    const auto& head = std::get<DenseLayer>(m.layers.back());
    ModelMeta meta;
    meta.input_shape = m.input_shape;
    meta.flat_input_len = shape_product(m.input_shape);
    if (head.activation == Activation::Sigmoid) {
        meta.output_activation = OutputKind::Sigmoid;
        meta.n_classes = 2;
    } else {
        meta.output_activation = OutputKind::Softmax;
        meta.n_classes = head.weights.shape()[0];
    }
    return meta;
}

Tensor forward(const Model& m, const Tensor& x) {
    const auto flat = shape_product(m.input_shape);
    if (x.size() != flat)
        throw Error(ErrorCode::ShapeMismatch, "input has " + std::to_string(x.size()) +
                                                  " values, model expects " + std::to_string(flat));
    Tensor cur = x.shape() == m.input_shape ? x : reshape(x, m.input_shape);
    for (const auto& layer : m.layers) {
        cur = std::visit(
            [&](const auto& l) -> Tensor {
                using L = std::decay_t<decltype(l)>;
                if constexpr (std::is_same_v<L, DenseLayer>) {
                    return apply_activation(dense_forward(l.weights, l.bias, cur), l.activation);
                } else if constexpr (std::is_same_v<L, Conv2DLayer>) {
                    return apply_activation(conv2d_forward(l.kernels, l.bias, cur, l.stride), l.activation);
                } else if constexpr (std::is_same_v<L, MaxPool2DLayer>) {
                    return maxpool2d(cur, l.window, l.stride);
                } else {
                    return reshape(cur, Shape{cur.size()});
                }
            },
            layer);
    }
    return cur;
}

std::vector<double> expanded_prediction(const Tensor& out, OutputKind kind) {
    if (kind == OutputKind::Sigmoid) return {1.0 - out[0], out[0]};
    return out.values();
}

std::size_t label_of(std::span<const double> expanded, OutputKind kind) {
    if (kind == OutputKind::Sigmoid) return expanded[1] >= 0.5 ? 1 : 0;
    std::size_t best = 0;
    for (std::size_t c = 1; c < expanded.size(); ++c)
        if (expanded[c] > expanded[best]) best = c;
    return best;
}

namespace {

template <typename ForEach>
PredictionMatrix predict_with(const Model& m, std::span<const Tensor> rows, ForEach&& for_each) {
    const auto meta = inspect_meta(m);
    const auto flat = meta.flat_input_len;
    for (const auto& r : rows)
        if (r.size() != flat)
            throw Error(ErrorCode::ShapeMismatch, "corpus row has " + std::to_string(r.size()) +
                                                      " values, model expects " + std::to_string(flat));
    PredictionMatrix pm;
    pm.rows = rows.size();
    pm.cols = meta.n_classes;
    pm.sigmoid_expanded = meta.output_activation == OutputKind::Sigmoid;
    pm.values.assign(pm.rows * pm.cols, 0.0);
    for_each(rows.size(), [&](std::size_t k) {
        const auto out = expanded_prediction(forward(m, rows[k]), meta.output_activation);
        std::copy(out.begin(), out.end(), pm.values.begin() + static_cast<std::ptrdiff_t>(k * pm.cols));
    });
    return pm;
}

} // namespace

PredictionMatrix predict_batch(const Model& m, std::span<const Tensor> rows) {
    return predict_with(m, rows, [](std::size_t n, auto&& fn) { kernels::parallel::for_each_index(n, fn); });
}

PredictionMatrix predict_batch_serial(const Model& m, std::span<const Tensor> rows) {
    return predict_with(m, rows, [](std::size_t n, auto&& fn) { kernels::serial::for_each_index(n, fn); });
}

PredictionMatrix predict_batch(const Model& m, const InputCorpus& corpus) { return predict_batch(m, corpus.rows); }

std::vector<std::size_t> predict_labels(const PredictionMatrix& pm) {
    std::vector<std::size_t> labels(pm.rows);
    const auto kind = pm.sigmoid_expanded ? OutputKind::Sigmoid : OutputKind::Softmax;
    for (std::size_t r = 0; r < pm.rows; ++r) labels[r] = label_of(pm.row(r), kind);
    return labels;
}

} // namespace fsim
