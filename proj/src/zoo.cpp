#include "fsim/zoo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "fsim/error.hpp"
#include "fsim/pipeline.hpp"

namespace fsim::zoo {

LabeledDataset make_blobs(std::size_t n_classes, std::size_t dim, std::size_t per_class, double spread,
                          std::uint64_t seed) {
    if (n_classes < 2 || dim < 1) throw Error(ErrorCode::ShapeMismatch, "blobs need >= 2 classes and >= 1 dimension");
    RandomSource rng(seed);

    std::vector<std::vector<double>> means;
    const bool corners = dim >= 63 || (std::size_t{1} << dim) >= n_classes;
    if (corners) {
        std::set<std::vector<double>> used;
        while (means.size() < n_classes) {
            std::vector<double> m(dim);
            for (auto& v : m) v = (rng.next_u64() >> 63) ? 0.5 : -0.5;
            if (used.insert(m).second) means.push_back(std::move(m));
        }
    } else {
        // Too few corners: spread the means along the first axis instead.
        for (std::size_t c = 0; c < n_classes; ++c) {
            std::vector<double> m(dim, 0.0);
            m[0] = -0.5 + static_cast<double>(c) / static_cast<double>(n_classes - 1);
            means.push_back(std::move(m));
        }
    }

    LabeledDataset ds;
    ds.dim = dim;
    ds.rows = n_classes * per_class;
    ds.x.reserve(ds.rows * dim);
    for (std::size_t c = 0; c < n_classes; ++c)
        for (std::size_t i = 0; i < per_class; ++i) {
            for (std::size_t d = 0; d < dim; ++d) ds.x.push_back(means[c][d] + spread * rng.normal());
            ds.y.push_back(c);
        }

    double peak = 0.0;
    for (auto v : ds.x) peak = std::max(peak, std::abs(v));
    if (peak >= 1.0)
        for (auto& v : ds.x) v *= 0.999 / peak;
    return ds;
}

namespace {

struct DenseView {
    std::size_t in, out;
};

std::vector<DenseView> dense_views(const Model& m) {
    std::vector<DenseView> views;
    for (const auto& l : m.layers) {
        const auto* d = std::get_if<DenseLayer>(&l);
        if (!d) throw Error(ErrorCode::InvalidModel, "the trainer only handles dense-only models");
        views.push_back({d->weights.shape()[1], d->weights.shape()[0]});
    }
    return views;
}

double act(double z, Activation a) {
    switch (a) {
    case Activation::Relu: return z > 0.0 ? z : 0.0;
    case Activation::Sigmoid: return z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
    default: return z;
    }
}

// derivative in terms of pre-activation z and activation value h
double act_grad(double z, double h, Activation a) {
    switch (a) {
    case Activation::Relu: return z > 0.0 ? 1.0 : 0.0;
    case Activation::Sigmoid: return h * (1.0 - h);
    default: return 1.0;
    }
}

// Accumulates the loss of one sample and (optionally) its gradient into `grad`.
double sample_backprop(const Model& m, const double* x, std::size_t label, std::vector<double>* grad) {
    const std::size_t L = m.layers.size();
    std::vector<std::vector<double>> pre(L), post(L + 1);
    post[0].assign(x, x + std::get<DenseLayer>(m.layers[0]).weights.shape()[1]);
    for (std::size_t l = 0; l < L; ++l) {
        const auto& d = std::get<DenseLayer>(m.layers[l]);
        const auto out = d.weights.shape()[0], in = d.weights.shape()[1];
        pre[l].resize(out);
        for (std::size_t j = 0; j < out; ++j) {
            double acc = d.bias[j];
            for (std::size_t k = 0; k < in; ++k) acc += d.weights[j * in + k] * post[l][k];
            pre[l][j] = acc;
        }
        if (l + 1 < L) {
            post[l + 1].resize(out);
            for (std::size_t j = 0; j < out; ++j) post[l + 1][j] = act(pre[l][j], d.activation);
        }
    }

    const auto& head = std::get<DenseLayer>(m.layers.back());
    std::vector<double> delta(pre.back().size());
    double loss = 0.0;
    if (head.activation == Activation::Sigmoid) {
        const double z = pre.back()[0];
        const double y = label == 1 ? 1.0 : 0.0;
        // log(1 + e^-|z|) form of binary cross-entropy
        loss = std::max(z, 0.0) - z * y + std::log1p(std::exp(-std::abs(z)));
        delta[0] = act(z, Activation::Sigmoid) - y;
    } else {
        const auto& z = pre.back();
        const double peak = *std::max_element(z.begin(), z.end());
        double sum = 0.0;
        for (auto v : z) sum += std::exp(v - peak);
        const double lse = peak + std::log(sum);
        loss = lse - z[label];
        for (std::size_t j = 0; j < z.size(); ++j) delta[j] = std::exp(z[j] - lse) - (j == label ? 1.0 : 0.0);
    }
    if (!grad) return loss;

    // parameter offsets per layer
    std::vector<std::size_t> offset(L);
    std::size_t off = 0;
    for (std::size_t l = 0; l < L; ++l) {
        offset[l] = off;
        const auto& d = std::get<DenseLayer>(m.layers[l]);
        off += d.weights.size() + d.bias.size();
    }

    for (std::size_t l = L; l-- > 0;) {
        const auto& d = std::get<DenseLayer>(m.layers[l]);
        const auto out = d.weights.shape()[0], in = d.weights.shape()[1];
        double* gw = grad->data() + offset[l];
        double* gb = gw + out * in;
        for (std::size_t j = 0; j < out; ++j) {
            for (std::size_t k = 0; k < in; ++k) gw[j * in + k] += delta[j] * post[l][k];
            gb[j] += delta[j];
        }
        if (l == 0) break;
        const auto& below = std::get<DenseLayer>(m.layers[l - 1]);
        std::vector<double> next(in, 0.0);
        for (std::size_t j = 0; j < out; ++j)
            for (std::size_t k = 0; k < in; ++k) next[k] += d.weights[j * in + k] * delta[j];
        for (std::size_t k = 0; k < in; ++k) next[k] *= act_grad(pre[l - 1][k], post[l][k], below.activation);
        delta = std::move(next);
    }
    return loss;
}

void check_layers(const std::vector<std::size_t>& sizes, const LabeledDataset& ds) {
    if (sizes.size() < 2) throw Error(ErrorCode::ShapeMismatch, "an MLP needs at least input and output sizes");
    if (sizes.front() != ds.dim)
        throw Error(ErrorCode::ShapeMismatch, "first layer size must equal the dataset dimension");
    const auto n = ds.n_classes();
    const bool sigmoid_head = sizes.back() == 1 && n <= 2;
    if (!sigmoid_head && sizes.back() != n)
        throw Error(ErrorCode::ShapeMismatch, "last layer size must equal the number of classes");
}

} // namespace

Model init_mlp(const std::vector<std::size_t>& sizes, const TrainConfig& cfg) {
    if (sizes.size() < 2) throw Error(ErrorCode::ShapeMismatch, "an MLP needs at least input and output sizes");
    RandomSource rng(cfg.seed);
    Model m;
    m.input_shape = {sizes.front()};
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
        const auto in = sizes[l], out = sizes[l + 1];
        const double bound = std::sqrt(6.0 / static_cast<double>(in));
        std::vector<double> w(out * in);
        for (auto& v : w) v = rng.uniform(-bound, bound);
        DenseLayer d;
        d.weights = Tensor(Shape{out, in}, std::move(w));
        d.bias = Tensor(Shape{out});
        const bool last = l + 2 == sizes.size();
        d.activation = last ? (out == 1 ? Activation::Sigmoid : Activation::Softmax) : cfg.hidden;
        m.layers.push_back(std::move(d));
    }
    validate(m);
    return m;
}

std::vector<double> flatten_params(const Model& m) {
    std::vector<double> p;
    for (const auto& l : m.layers) {
        const auto& d = std::get<DenseLayer>(l);
        p.insert(p.end(), d.weights.values().begin(), d.weights.values().end());
        p.insert(p.end(), d.bias.values().begin(), d.bias.values().end());
    }
    return p;
}

Model with_params(const Model& m, const std::vector<double>& params) {
    Model out = m;
    std::size_t off = 0;
    for (auto& l : out.layers) {
        auto& d = std::get<DenseLayer>(l);
        for (std::size_t i = 0; i < d.weights.size(); ++i) d.weights[i] = params.at(off++);
        for (std::size_t i = 0; i < d.bias.size(); ++i) d.bias[i] = params.at(off++);
    }
    if (off != params.size()) throw Error(ErrorCode::ShapeMismatch, "parameter vector length mismatch");
    return out;
}

LossGradient loss_and_gradient(const Model& m, const LabeledDataset& ds) {
    (void)dense_views(m);
    LossGradient lg;
    lg.gradient.assign(flatten_params(m).size(), 0.0);
    for (std::size_t r = 0; r < ds.rows; ++r) lg.loss += sample_backprop(m, ds.row(r), ds.y[r], &lg.gradient);
    const double inv = 1.0 / static_cast<double>(ds.rows);
    lg.loss *= inv;
    for (auto& g : lg.gradient) g *= inv;
    return lg;
}

double mean_loss(const Model& m, const LabeledDataset& ds) {
    double total = 0.0;
    for (std::size_t r = 0; r < ds.rows; ++r) total += sample_backprop(m, ds.row(r), ds.y[r], nullptr);
    return total / static_cast<double>(ds.rows);
}

double train_accuracy(const Model& m, const LabeledDataset& ds) {
    const auto kind = inspect_meta(m).output_activation;
    std::size_t hits = 0;
    for (std::size_t r = 0; r < ds.rows; ++r) {
        const auto out = forward(m, Tensor::vector(std::vector<double>(ds.row(r), ds.row(r) + ds.dim)));
        hits += label_of(expanded_prediction(out, kind), kind) == ds.y[r];
    }
    return static_cast<double>(hits) / static_cast<double>(ds.rows);
}

TrainResult train_mlp_logged(const std::vector<std::size_t>& sizes, const LabeledDataset& ds, const TrainConfig& cfg) {
    check_layers(sizes, ds);
    if (!(cfg.learning_rate > 0.0)) throw Error(ErrorCode::InvalidModel, "learning rate must be positive");
    if (cfg.batch_size == 0) throw Error(ErrorCode::InvalidModel, "batch size must be positive");

    TrainResult res;
    res.model = init_mlp(sizes, cfg);
    // Shuffling draws from its own stream so that init is unaffected by epochs.
    RandomSource shuffle_rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
    std::vector<std::size_t> order(ds.rows);
    std::iota(order.begin(), order.end(), std::size_t{0});
    auto params = flatten_params(res.model);
    std::vector<double> grad(params.size());

    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        shuffle_rng.shuffle(order);
        for (std::size_t start = 0; start < ds.rows; start += cfg.batch_size) {
            const auto end = std::min(ds.rows, start + cfg.batch_size);
            std::fill(grad.begin(), grad.end(), 0.0);
            for (std::size_t i = start; i < end; ++i) sample_backprop(res.model, ds.row(order[i]), ds.y[order[i]], &grad);
            const double step = cfg.learning_rate / static_cast<double>(end - start);
            for (std::size_t p = 0; p < params.size(); ++p) params[p] -= step * grad[p];
            res.model = with_params(res.model, params);
        }
        res.epoch_losses.push_back(mean_loss(res.model, ds));
    }
    return res;
}

Model train_mlp(const std::vector<std::size_t>& sizes, const LabeledDataset& ds, const TrainConfig& cfg) {
    return train_mlp_logged(sizes, ds, cfg).model;
}

Model invert_binary(const Model& m) {
    validate(m);
    if (inspect_meta(m).output_activation != OutputKind::Sigmoid)
        throw Error(ErrorCode::NotSigmoid, "inversion needs a sigmoid output layer");
    Model out = m;
    auto& head = std::get<DenseLayer>(out.layers.back());
    for (auto& w : head.weights.data()) w = -w;
    for (auto& b : head.bias.data()) b = -b;
    return out;
}

LabeledDataset permute_labels(const LabeledDataset& ds, const std::vector<std::size_t>& perm) {
    std::vector<bool> hit(perm.size(), false);
    for (auto p : perm) {
        if (p >= perm.size() || hit[p]) throw Error(ErrorCode::BadPermutation, "labels map is not a bijection");
        hit[p] = true;
    }
    if (ds.n_classes() > perm.size()) throw Error(ErrorCode::BadPermutation, "permutation does not cover every label");
    LabeledDataset out = ds;
    for (auto& y : out.y) y = perm[y];
    return out;
}

std::vector<std::size_t> random_derangement(std::size_t n, RandomSource& rng) {
    if (n < 2) throw Error(ErrorCode::BadPermutation, "no derangement exists for fewer than two labels");
    std::vector<std::size_t> p(n);
    for (;;) {
        std::iota(p.begin(), p.end(), std::size_t{0});
        rng.shuffle(p);
        bool fixed = false;
        for (std::size_t i = 0; i < n; ++i) fixed |= p[i] == i;
        if (!fixed) return p;
    }
}

std::vector<std::size_t> invert_permutation(const std::vector<std::size_t>& perm) {
    std::vector<std::size_t> inv(perm.size());
    for (std::size_t i = 0; i < perm.size(); ++i) inv.at(perm[i]) = i;
    return inv;
}

BoxStats box_stats(std::vector<double> v) {
    if (v.empty()) return {0, 0, 0, 0, 0};
    std::sort(v.begin(), v.end());
    auto quantile = [&](double q) {
        const double pos = q * static_cast<double>(v.size() - 1);
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const auto hi = std::min(lo + 1, v.size() - 1);
        return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
    };
    return {v.front(), quantile(0.25), quantile(0.5), quantile(0.75), v.back()};
}

std::vector<double> SensitivitySuite::scores(const std::string& group, Metric metric) const {
    std::vector<double> out;
    for (const auto& r : rows)
        if (r.group == group && r.metric == metric) out.push_back(r.score);
    return out;
}

SensitivitySuite sensitivity_suite(const SensitivityConfig& cfg) {
    const auto data = make_blobs(cfg.classes, cfg.dim, cfg.per_class, cfg.spread, cfg.seed);
    const std::vector<std::size_t> arch{cfg.dim, cfg.hidden, cfg.classes};
    const std::vector<std::size_t> deep{cfg.dim, cfg.hidden, cfg.hidden, cfg.hidden, cfg.classes};

    const auto reference = train_mlp(arch, data, cfg.train);

    struct Member {
        std::string group;
        Model model;
    };
    std::vector<Member> members;
    {
        auto twin_cfg = cfg.train;
        twin_cfg.seed = cfg.train.seed + 1000;
        members.push_back({"twin", train_mlp(arch, data, twin_cfg)});

        auto long_cfg = cfg.train;
        long_cfg.epochs = cfg.train.epochs * 5;
        members.push_back({"long_train", train_mlp(arch, data, long_cfg)});

        auto lr_cfg = cfg.train;
        lr_cfg.learning_rate = cfg.train.learning_rate * 10.0;
        members.push_back({"high_lr", train_mlp(arch, data, lr_cfg)});

        members.push_back({"deeper", train_mlp(deep, data, cfg.train)});

        RandomSource perm_rng(cfg.seed + 2);
        const auto perm = random_derangement(cfg.classes, perm_rng);
        members.push_back({"permuted_labels", train_mlp(arch, permute_labels(data, perm), cfg.train)});

        const auto other = make_blobs(cfg.classes, cfg.dim, cfg.per_class, cfg.spread, cfg.seed + 1);
        members.push_back({"different_blobs", train_mlp(arch, other, cfg.train)});
    }

    SensitivitySuite suite;
    suite.n_classes = cfg.classes;
    for (const auto& m : members) suite.groups.push_back(m.group);

    for (std::size_t run = 0; run < cfg.runs; ++run) {
        CompareConfig cc;
        cc.n_uniform = cfg.inputs;
        cc.seed = cfg.seed * 1000 + 100 + run;
        const auto probe = probe_reference(reference, "reference", cc);
        for (const auto& m : members) {
            const auto report = evaluate_candidate(probe, m.model, m.group);
            for (const auto& r : report.results) suite.rows.push_back({m.group, m.group, r.metric, run, r.score});
        }
    }
    return suite;
}

std::string sensitivity_csv(const SensitivitySuite& s) {
    std::string out = "group,model_id,metric,run_index,score\n";
    for (const auto& r : s.rows)
        out += r.group + "," + r.model_id + "," + std::string(to_string(r.metric)) + "," + std::to_string(r.run_index) +
               "," + format_score(r.score) + "\n";
    return out;
}

std::string sensitivity_summary_csv(const SensitivitySuite& s) {
    std::string out = "group,metric,min,q1,median,q3,max,median_verdict\n";
    for (const auto& g : s.groups)
        for (auto m : {Metric::Cca, Metric::Spearman, Metric::Overlap}) {
            const auto b = box_stats(s.scores(g, m));
            const auto v = m == Metric::Overlap ? verdict_overlap(b.median, s.n_classes)
                                                : verdict_corr(b.median, {}, m == Metric::Spearman).verdict;
            out += g + "," + std::string(to_string(m)) + "," + format_score(b.min) + "," + format_score(b.q1) + "," +
                   format_score(b.median) + "," + format_score(b.q3) + "," + format_score(b.max) + "," +
                   std::string(to_string(v)) + "\n";
        }
    return out;
}

} // namespace fsim::zoo
