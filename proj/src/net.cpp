#include "emp/net.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include <json.hpp>

#include "emp/bounds.hpp"
#include "emp/io.hpp"
#include "emp/parallel.hpp"
#include "emp/seed.hpp"

namespace emp::net {
namespace {

void split_rows(Dataset& d, std::uint64_t seed, double test_fraction) {
    if (!(test_fraction >= 0.0 && test_fraction < 1.0)) throw DomainError("test fraction must lie in [0, 1)");
    std::vector<std::size_t> order(d.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(derive_seed(seed, {0x5711u}));
    std::shuffle(order.begin(), order.end(), rng);
    const auto n_test = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(d.size())));
    d.test.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_test));
    d.train.assign(order.begin() + static_cast<std::ptrdiff_t>(n_test), order.end());
    std::sort(d.test.begin(), d.test.end());
    std::sort(d.train.begin(), d.train.end());
}

// Activations of every layer for one sample; acts[0] is the input, acts.back() the logits.
std::vector<std::vector<double>> forward_all(const DenseNet& net, std::span<const double> x) {
    const auto& layers = net.layers();
    std::vector<std::vector<double>> acts;
    acts.reserve(layers.size() + 1);
    acts.emplace_back(x.begin(), x.end());
    for (std::size_t l = 0; l < layers.size(); ++l) {
        const Layer& layer = layers[l];
        const auto& in = acts.back();
        std::vector<double> z(layer.outputs);
        for (std::size_t o = 0; o < layer.outputs; ++o) {
            double acc = layer.bias[o];
            const double* w = layer.weights.data() + o * layer.inputs;
            for (std::size_t i = 0; i < layer.inputs; ++i) acc += w[i] * in[i];
            z[o] = (l + 1 < layers.size()) ? std::max(0.0, acc) : acc;
        }
        acts.push_back(std::move(z));
    }
    return acts;
}

std::vector<double> softmax(const std::vector<double>& z) {
    const double peak = *std::max_element(z.begin(), z.end());
    std::vector<double> p(z.size());
    double total = 0.0;
    for (std::size_t k = 0; k < z.size(); ++k) total += (p[k] = std::exp(z[k] - peak));
    for (double& v : p) v /= total;
    return p;
}

double cross_entropy(const std::vector<double>& z, std::size_t label) {
    const double peak = *std::max_element(z.begin(), z.end());
    double total = 0.0;
    for (double v : z) total += std::exp(v - peak);
    return std::log(total) + peak - z[label];
}

std::vector<double> weight_part(const DenseNet& net, const std::vector<double>& params) {
    std::vector<double> out;
    out.reserve(net.weight_count());
    std::size_t offset = 0;
    for (const Layer& layer : net.layers()) {
        out.insert(out.end(), params.begin() + static_cast<std::ptrdiff_t>(offset),
                   params.begin() + static_cast<std::ptrdiff_t>(offset + layer.weights.size()));
        offset += layer.weights.size() + layer.bias.size();
    }
    return out;
}

void put_u64_le(std::string& out, std::uint64_t v) {
    for (int b = 0; b < 8; ++b) out.push_back(static_cast<char>((v >> (8 * b)) & 0xFF));
}

std::uint32_t read_be32(const std::string& bytes, std::size_t offset) {
    if (offset + 4 > bytes.size()) throw ParseError("truncated IDX header");
    std::uint32_t v = 0;
    for (std::size_t k = 0; k < 4; ++k) v = (v << 8) | static_cast<std::uint8_t>(bytes[offset + k]);
    return v;
}

}  // namespace

DenseNet DenseNet::initialize(std::vector<std::size_t> widths, std::uint64_t seed) {
    if (widths.size() < 2) throw DomainError("a network needs at least input and output widths");
    DenseNet net;
    net.widths_ = std::move(widths);
    std::mt19937_64 rng(seed);
    for (std::size_t l = 0; l + 1 < net.widths_.size(); ++l) {
        Layer layer;
        layer.inputs = net.widths_[l];
        layer.outputs = net.widths_[l + 1];
        if (layer.inputs == 0 || layer.outputs == 0) throw DomainError("layer widths must be positive");
        const double limit = std::sqrt(6.0 / static_cast<double>(layer.inputs));
        std::uniform_real_distribution<double> init(-limit, limit);
        layer.weights.resize(layer.inputs * layer.outputs);
        for (double& w : layer.weights) w = init(rng);
        layer.bias.assign(layer.outputs, 0.0);
        net.layers_.push_back(std::move(layer));
    }
    return net;
}

DenseNet DenseNet::from_parameters(std::vector<std::size_t> widths, std::span<const double> params) {
    DenseNet net = initialize(std::move(widths), 0);
    net.set_parameters(params);
    return net;
}

std::size_t DenseNet::parameter_count() const noexcept {
    std::size_t n = 0;
    for (const Layer& l : layers_) n += l.weights.size() + l.bias.size();
    return n;
}

std::size_t DenseNet::weight_count() const noexcept {
    std::size_t n = 0;
    for (const Layer& l : layers_) n += l.weights.size();
    return n;
}

std::vector<double> DenseNet::parameters() const {
    std::vector<double> p;
    p.reserve(parameter_count());
    for (const Layer& l : layers_) {
        p.insert(p.end(), l.weights.begin(), l.weights.end());
        p.insert(p.end(), l.bias.begin(), l.bias.end());
    }
    return p;
}

void DenseNet::set_parameters(std::span<const double> params) {
    if (params.size() != parameter_count()) throw LengthMismatch("parameter vector length differs from network");
    std::size_t offset = 0;
    for (Layer& l : layers_) {
        std::copy_n(params.begin() + static_cast<std::ptrdiff_t>(offset), l.weights.size(), l.weights.begin());
        offset += l.weights.size();
        std::copy_n(params.begin() + static_cast<std::ptrdiff_t>(offset), l.bias.size(), l.bias.begin());
        offset += l.bias.size();
    }
}

std::vector<double> DenseNet::weights() const {
    std::vector<double> w;
    w.reserve(weight_count());
    for (const Layer& l : layers_) w.insert(w.end(), l.weights.begin(), l.weights.end());
    return w;
}

void DenseNet::set_weights(std::span<const double> w) {
    if (w.size() != weight_count()) throw LengthMismatch("weight vector length differs from network");
    std::size_t offset = 0;
    for (Layer& l : layers_) {
        std::copy_n(w.begin() + static_cast<std::ptrdiff_t>(offset), l.weights.size(), l.weights.begin());
        offset += l.weights.size();
    }
}

std::vector<double> DenseNet::logits(std::span<const double> x) const {
    if (layers_.empty() || x.size() != layers_.front().inputs) throw DimensionMismatch("input width mismatch");
    return forward_all(*this, x).back();
}

std::size_t DenseNet::predict(std::span<const double> x) const {
    const auto z = logits(x);
    return static_cast<std::size_t>(std::max_element(z.begin(), z.end()) - z.begin());
}

void DenseNet::validate() const {
    if (layers_.size() + 1 != widths_.size()) throw DimensionMismatch("layer count disagrees with widths");
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        const Layer& layer = layers_[l];
        if (layer.inputs != widths_[l] || layer.outputs != widths_[l + 1] ||
            layer.weights.size() != layer.inputs * layer.outputs || layer.bias.size() != layer.outputs) {
            throw DimensionMismatch("layer " + std::to_string(l) + " has inconsistent shapes");
        }
        for (double v : layer.weights) {
            if (!std::isfinite(v)) throw NonFiniteScore("non-finite weight in layer " + std::to_string(l));
        }
        for (double v : layer.bias) {
            if (!std::isfinite(v)) throw NonFiniteScore("non-finite bias in layer " + std::to_string(l));
        }
    }
}

void Dataset::validate() const {
    if (input_dim == 0 || num_classes == 0) throw DimensionMismatch("dataset needs positive input dim and classes");
    if (features.size() != labels.size() * input_dim) throw DimensionMismatch("feature matrix shape mismatch");
    for (double v : features) {
        if (!std::isfinite(v)) throw NonFiniteScore("dataset contains non-finite features");
    }
    for (std::size_t y : labels) {
        if (y >= num_classes) throw DomainError("label out of range");
    }
    for (std::size_t i : train) {
        if (i >= size()) throw IndexOutOfRange("train index out of range");
    }
    for (std::size_t i : test) {
        if (i >= size()) throw IndexOutOfRange("test index out of range");
    }
}

Dataset make_blobs(std::size_t per_class, std::size_t classes, std::size_t dim, double spread, double radius,
                   std::uint64_t seed, double test_fraction) {
    if (classes < 2 || dim < 1 || per_class < 1) throw DomainError("blobs need >= 2 classes, dim >= 1, samples >= 1");
    Dataset d;
    d.input_dim = dim;
    d.num_classes = classes;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, spread);
    for (std::size_t k = 0; k < classes; ++k) {
        std::vector<double> center(dim, 0.0);
        const double angle = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(classes);
        if (dim == 1) {
            center[0] = radius * (2.0 * static_cast<double>(k) / static_cast<double>(classes - 1) - 1.0);
        } else {
            center[0] = radius * std::cos(angle);
            center[1] = radius * std::sin(angle);
        }
        for (std::size_t s = 0; s < per_class; ++s) {
            for (std::size_t j = 0; j < dim; ++j) d.features.push_back(center[j] + noise(rng));
            d.labels.push_back(k);
        }
    }
    split_rows(d, seed, test_fraction);
    return d;
}

Dataset make_moons(std::size_t samples, double noise_sd, std::uint64_t seed, double test_fraction) {
    if (samples < 2) throw DomainError("moons need at least two samples");
    Dataset d;
    d.input_dim = 2;
    d.num_classes = 2;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> angle(0.0, std::numbers::pi);
    std::normal_distribution<double> noise(0.0, noise_sd);
    for (std::size_t s = 0; s < samples; ++s) {
        const std::size_t label = s % 2;
        const double t = angle(rng);
        const double x = label == 0 ? std::cos(t) : 1.0 - std::cos(t);
        const double y = label == 0 ? std::sin(t) : 0.5 - std::sin(t);
        d.features.push_back(x + noise(rng));
        d.features.push_back(y + noise(rng));
        d.labels.push_back(label);
    }
    split_rows(d, seed, test_fraction);
    return d;
}

Dataset make_digits(std::size_t per_class, double noise_sd, std::uint64_t seed, double test_fraction) {
    // Segments a..g of a seven-segment glyph on an 8x8 grid.
    static constexpr const char* kGlyphs[10] = {"abcdef", "bc", "abdeg", "abcdg", "bcfg",
                                                "acdfg", "acdefg", "abc", "abcdefg", "abcdfg"};
    auto segment_cells = [](char seg) {
        std::vector<std::pair<std::size_t, std::size_t>> cells;  // (row, col)
        auto hline = [&](std::size_t r) {
            for (std::size_t c = 1; c <= 6; ++c) cells.emplace_back(r, c);
        };
        auto vline = [&](std::size_t c, std::size_t r0, std::size_t r1) {
            for (std::size_t r = r0; r <= r1; ++r) cells.emplace_back(r, c);
        };
        switch (seg) {
            case 'a': hline(0); break;
            case 'b': vline(6, 0, 3); break;
            case 'c': vline(6, 4, 7); break;
            case 'd': hline(7); break;
            case 'e': vline(1, 4, 7); break;
            case 'f': vline(1, 0, 3); break;
            case 'g': hline(4); break;
            default: break;
        }
        return cells;
    };
    std::vector<std::vector<double>> templates(10, std::vector<double>(64, 0.0));
    for (std::size_t digit = 0; digit < 10; ++digit) {
        for (const char* s = kGlyphs[digit]; *s; ++s) {
            for (auto [r, c] : segment_cells(*s)) templates[digit][r * 8 + c] = 1.0;
        }
    }

    Dataset d;
    d.input_dim = 64;
    d.num_classes = 10;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, noise_sd);
    std::uniform_real_distribution<double> intensity(0.7, 1.0);
    for (std::size_t digit = 0; digit < 10; ++digit) {
        for (std::size_t s = 0; s < per_class; ++s) {
            const double gain = intensity(rng);
            for (double t : templates[digit]) d.features.push_back(std::clamp(gain * t + noise(rng), 0.0, 1.0));
            d.labels.push_back(digit);
        }
    }
    split_rows(d, seed, test_fraction);
    return d;
}

Dataset load_idx(const std::filesystem::path& images, const std::filesystem::path& labels, std::uint64_t seed,
                 double test_fraction, std::size_t max_samples) {
    const std::string img = io::read_file(images);
    const std::string lab = io::read_file(labels);
    if (read_be32(img, 0) != 0x00000803u) throw ParseError("not an IDX3 unsigned-byte image file");
    if (read_be32(lab, 0) != 0x00000801u) throw ParseError("not an IDX1 unsigned-byte label file");
    std::size_t count = read_be32(img, 4);
    const std::size_t rows = read_be32(img, 8);
    const std::size_t cols = read_be32(img, 12);
    if (read_be32(lab, 4) != count) throw ParseError("IDX image and label counts differ");
    if (img.size() < 16 + count * rows * cols || lab.size() < 8 + count) throw ParseError("truncated IDX payload");
    if (max_samples > 0) count = std::min(count, max_samples);

    Dataset d;
    d.input_dim = rows * cols;
    d.features.reserve(count * d.input_dim);
    std::size_t max_label = 0;
    for (std::size_t s = 0; s < count; ++s) {
        for (std::size_t p = 0; p < d.input_dim; ++p) {
            d.features.push_back(static_cast<std::uint8_t>(img[16 + s * d.input_dim + p]) / 255.0);
        }
        const std::size_t y = static_cast<std::uint8_t>(lab[8 + s]);
        max_label = std::max(max_label, y);
        d.labels.push_back(y);
    }
    d.num_classes = max_label + 1;
    split_rows(d, seed, test_fraction);
    return d;
}

double loss(const DenseNet& net, const Dataset& data, std::span<const std::size_t> rows) {
    if (rows.empty()) return 0.0;
    double total = 0.0;
    for (std::size_t r : rows) total += cross_entropy(forward_all(net, data.row(r)).back(), data.labels[r]);
    return total / static_cast<double>(rows.size());
}

double accuracy(const DenseNet& net, const Dataset& data, std::span<const std::size_t> rows) {
    if (rows.empty()) return 0.0;
    std::size_t correct = 0;
    for (std::size_t r : rows) correct += net.predict(data.row(r)) == data.labels[r] ? 1 : 0;
    return static_cast<double>(correct) / static_cast<double>(rows.size());
}

std::vector<double> loss_gradient(const DenseNet& net, const Dataset& data, std::span<const std::size_t> rows) {
    const auto& layers = net.layers();
    std::vector<double> grad(net.parameter_count(), 0.0);
    std::vector<std::size_t> offsets(layers.size());
    for (std::size_t l = 0, off = 0; l < layers.size(); ++l) {
        offsets[l] = off;
        off += layers[l].weights.size() + layers[l].bias.size();
    }
    if (rows.empty()) return grad;
    const double scale = 1.0 / static_cast<double>(rows.size());

    for (std::size_t r : rows) {
        const auto acts = forward_all(net, data.row(r));
        std::vector<double> delta = softmax(acts.back());
        delta[data.labels[r]] -= 1.0;
        for (std::size_t l = layers.size(); l-- > 0;) {
            const Layer& layer = layers[l];
            const auto& in = acts[l];
            double* gw = grad.data() + offsets[l];
            double* gb = gw + layer.weights.size();
            for (std::size_t o = 0; o < layer.outputs; ++o) {
                const double d = delta[o] * scale;
                gb[o] += d;
                for (std::size_t i = 0; i < layer.inputs; ++i) gw[o * layer.inputs + i] += d * in[i];
            }
            if (l == 0) break;
            std::vector<double> prev(layer.inputs, 0.0);
            for (std::size_t o = 0; o < layer.outputs; ++o) {
                const double* w = layer.weights.data() + o * layer.inputs;
                for (std::size_t i = 0; i < layer.inputs; ++i) prev[i] += w[i] * delta[o];
            }
            // acts[l] holds the ReLU outputs of layer l-1; a zero output has zero slope.
            for (std::size_t i = 0; i < layer.inputs; ++i) {
                if (in[i] <= 0.0) prev[i] = 0.0;
            }
            delta.swap(prev);
        }
    }
    return grad;
}

TrainResult train(DenseNet net, const Dataset& data, const TrainConfig& cfg) {
    net.validate();
    data.validate();
    if (net.widths().front() != data.input_dim || net.widths().back() != data.num_classes) {
        throw DimensionMismatch("network widths do not match the dataset");
    }
    if (cfg.batch_size == 0) throw DomainError("batch size must be positive");
    if (!(cfg.learning_rate >= 0.0)) throw DomainError("learning rate must be >= 0");

    std::vector<double> params = net.parameters();
    std::vector<double> velocity(params.size(), 0.0);
    std::vector<std::size_t> order = data.train;
    std::mt19937_64 rng(derive_seed(cfg.seed, {0x7a11u}));

    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            const std::size_t stop = std::min(order.size(), start + cfg.batch_size);
            const std::span<const std::size_t> batch(order.data() + start, stop - start);
            const std::vector<double> g = loss_gradient(net, data, batch);
            for (std::size_t k = 0; k < params.size(); ++k) {
                velocity[k] = cfg.momentum * velocity[k] + g[k];
                params[k] -= cfg.learning_rate * velocity[k];
            }
            net.set_parameters(params);
        }
        if (!std::isfinite(loss(net, data, data.train))) {
            throw DivergenceDetected("training loss became non-finite at epoch " + std::to_string(epoch));
        }
    }

    TrainResult result;
    result.train_loss = loss(net, data, data.train);
    result.test_loss = loss(net, data, data.test);
    result.train_accuracy = accuracy(net, data, data.train);
    result.test_accuracy = accuracy(net, data, data.test);
    result.net = std::move(net);
    return result;
}

MagnitudeScores magnitude_scores(const DenseNet& net) {
    std::vector<double> scores;
    std::vector<WeightRef> index;
    std::vector<std::size_t> sizes;
    for (std::size_t l = 0; l < net.layers().size(); ++l) {
        const auto& w = net.layers()[l].weights;
        sizes.push_back(w.size());
        for (std::size_t k = 0; k < w.size(); ++k) {
            scores.push_back(std::abs(w[k]));
            index.push_back({l, k});
        }
    }
    return {ScoreVector(std::move(scores)), std::move(index), Partition::contiguous(sizes)};
}

DenseNet apply_mask(const DenseNet& net, const std::vector<bool>& weight_mask) {
    if (weight_mask.size() != net.weight_count()) throw LengthMismatch("mask length differs from weight count");
    DenseNet out = net;
    std::size_t k = 0;
    for (Layer& layer : out.layers()) {
        for (double& w : layer.weights) {
            if (!weight_mask[k++]) w = 0.0;
        }
    }
    return out;
}

double weight_distance_sq(const DenseNet& a, const DenseNet& b) {
    const auto wa = a.weights();
    const auto wb = b.weights();
    if (wa.size() != wb.size()) throw LengthMismatch("networks have different weight counts");
    double total = 0.0;
    for (std::size_t k = 0; k < wa.size(); ++k) total += (wa[k] - wb[k]) * (wa[k] - wb[k]);
    return total;
}

double dropped_weight_energy(const DenseNet& net, const std::vector<bool>& weight_mask) {
    const auto w = net.weights();
    if (weight_mask.size() != w.size()) throw LengthMismatch("mask length differs from weight count");
    double total = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) {
        if (!weight_mask[k]) total += w[k] * w[k];
    }
    return total;
}

const char* to_string(PruneMode m) noexcept { return m == PruneMode::global ? "global" : "block"; }

PruneMode parse_prune_mode(const std::string& s) {
    if (s == "global") return PruneMode::global;
    if (s == "block") return PruneMode::block;
    throw ParseError("unknown prune mode '" + s + "' (expected global or block)");
}

SweepResult beta_sweep(const DenseNet& net, const Dataset& data, const SweepConfig& cfg) {
    for (double b : cfg.betas) {
        if (!(b > 0.0) || !std::isfinite(b)) throw NonPositiveBeta("sweep betas must be positive");
    }
    const MagnitudeScores scores = magnitude_scores(net);
    const double dense_loss = loss(net, data, data.train);
    const double dense_acc = accuracy(net, data, data.test);
    const auto dense_weights = net.weights();
    const double theta_l1 =
        std::accumulate(dense_weights.begin(), dense_weights.end(), 0.0, [](double a, double w) { return a + std::abs(w); });

    SweepResult out;
    if (cfg.trace_probes > 0) out.trace = estimate_trace_h(net, data, cfg.trace_probes, cfg.trace_seed);

    const std::size_t cells = cfg.modes.size() * cfg.betas.size();
    out.rows.resize(cells);
    parallel_for(cells, [&](std::size_t cell) {
        const PruneMode mode = cfg.modes[cell / cfg.betas.size()];
        const double beta = cfg.betas[cell % cfg.betas.size()];
        PruneExperimentResult r;
        r.beta = beta;
        r.mode = mode;
        r.weight_count = net.weight_count();
        std::vector<bool> mask;
        if (mode == PruneMode::global) {
            const EmpDecision d = emp_decide(scores.scores, beta);
            mask = d.mask;
            r.keep_count = d.keep_count;
            r.sparsity = d.sparsity();
        } else {
            const PartitionedDecision d =
                emp_decide_partitioned(scores.scores, scores.by_layer, beta, ZeroGroupPolicy::keep_all);
            mask = d.mask;
            r.keep_count = d.keep_count;
            r.sparsity = d.sparsity();
        }
        r.rho = static_cast<double>(r.keep_count) / static_cast<double>(r.weight_count);
        const DenseNet pruned = apply_mask(net, mask);
        r.dense_loss = dense_loss;
        r.pruned_loss = loss(pruned, data, data.train);
        r.epsilon = std::abs(dense_loss - r.pruned_loss);
        r.dense_acc = dense_acc;
        r.pruned_acc = accuracy(pruned, data, data.test);
        r.delta_theta_sq = weight_distance_sq(net, pruned);
        r.theta_l1 = theta_l1;
        if (out.trace) {
            const BoundGapReport gap = evaluate_bound_gap(r, out.trace->mean);
            r.trace_h_estimate = out.trace->mean;
            r.lemma_bound = gap.lemma_bound;
            r.asymptotic_bound = gap.asymptotic_bound;
        }
        out.rows[cell] = r;
    });
    return out;
}

TraceEstimate hutchinson_trace(const GradientFn& gradient, std::span<const double> theta, std::size_t probes,
                               std::uint64_t seed) {
    if (probes < 2) throw DomainError("Hutchinson estimate needs at least 2 probes");
    double sup = 0.0;
    for (double t : theta) sup = std::max(sup, std::abs(t));
    const double h = 1e-4 * (1.0 + sup);

    std::vector<double> samples(probes);
    parallel_for(probes, [&](std::size_t p) {
        std::mt19937_64 rng(derive_seed(seed, {p}));
        std::bernoulli_distribution coin(0.5);
        std::vector<double> v(theta.size());
        for (double& x : v) x = coin(rng) ? 1.0 : -1.0;
        std::vector<double> plus(theta.begin(), theta.end());
        std::vector<double> minus(theta.begin(), theta.end());
        for (std::size_t k = 0; k < v.size(); ++k) {
            plus[k] += h * v[k];
            minus[k] -= h * v[k];
        }
        const auto gp = gradient(plus);
        const auto gm = gradient(minus);
        if (gp.size() != v.size() || gm.size() != v.size()) throw LengthMismatch("gradient has the wrong length");
        double quad = 0.0;
        for (std::size_t k = 0; k < v.size(); ++k) quad += v[k] * (gp[k] - gm[k]) / (2.0 * h);
        samples[p] = quad;
    });

    const double mean = std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(probes);
    double var = 0.0;
    for (double s : samples) var += (s - mean) * (s - mean);
    var /= static_cast<double>(probes - 1);
    TraceEstimate est{mean, std::sqrt(var / static_cast<double>(probes)), probes};
    if (!std::isfinite(est.mean) || !std::isfinite(est.std_error)) throw NonFiniteEstimate("trace estimate is not finite");
    return est;
}

TraceEstimate estimate_trace_h(const DenseNet& net, const Dataset& data, std::size_t probes, std::uint64_t seed) {
    if (probes < kMinTraceProbes) throw DomainError("trace estimate needs at least 10 probes");
    const GradientFn gradient = [&](std::span<const double> w) {
        DenseNet moved = net;
        moved.set_weights(w);
        return weight_part(moved, loss_gradient(moved, data, data.train));
    };
    return hutchinson_trace(gradient, net.weights(), probes, seed);
}

BoundGapReport evaluate_bound_gap(const PruneExperimentResult& result, double trace_h, double slack_factor) {
    BoundGapReport report;
    report.epsilon = result.epsilon;
    report.rho = result.rho;
    report.trace_h = trace_h;
    report.slack_factor = slack_factor;
    if (result.keep_count >= result.weight_count) {
        // Nothing pruned: both bounds collapse to zero with the (1 - rho) factor.
        report.lemma_bound = 0.0;
        report.asymptotic_bound = 0.0;
    } else {
        bounds::LossBoundInputs in;
        in.rho = result.rho;
        in.n = result.weight_count;
        in.theta_l1 = result.theta_l1;
        in.trace_h = std::max(0.0, trace_h);
        in.delta_theta_sq = result.delta_theta_sq;
        report.lemma_bound = bounds::epsilon_bound_lemma(in);
        report.asymptotic_bound = bounds::epsilon_bound_asymptotic(in);
    }
    report.exceeds_lemma = report.epsilon > slack_factor * report.lemma_bound;
    return report;
}

void save_checkpoint(const DenseNet& net, const std::filesystem::path& prefix) {
    net.validate();
    const auto params = net.parameters();
    std::string bin;
    bin.reserve(params.size() * 8);
    for (double p : params) put_u64_le(bin, std::bit_cast<std::uint64_t>(p));
    const nlohmann::json header = {
        {"format", "emp-densenet"},
        {"version", 1},
        {"widths", net.widths()},
        {"hidden_activation", "relu"},
        {"output", "softmax-cross-entropy"},
        {"dtype", "float64-le"},
        {"parameter_count", params.size()},
        {"layout", "per layer: weights (outputs x inputs, row-major) then bias"},
    };
    std::filesystem::path bin_path = prefix;
    bin_path += ".bin";
    std::filesystem::path json_path = prefix;
    json_path += ".json";
    io::write_file_atomic(bin_path, bin);
    io::write_file_atomic(json_path, header.dump(2) + "\n");
}

DenseNet load_checkpoint(const std::filesystem::path& prefix) {
    std::filesystem::path bin_path = prefix;
    bin_path += ".bin";
    std::filesystem::path json_path = prefix;
    json_path += ".json";
    nlohmann::json header;
    try {
        header = nlohmann::json::parse(io::read_file(json_path));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad checkpoint header: ") + e.what());
    }
    if (header.value("format", "") != "emp-densenet") throw ParseError("not an emp-densenet checkpoint");
    const auto widths = header.at("widths").get<std::vector<std::size_t>>();
    const std::string bin = io::read_file(bin_path);
    if (bin.size() % 8 != 0) throw ParseError("checkpoint payload is not a whole number of float64 values");
    std::vector<double> params(bin.size() / 8);
    for (std::size_t k = 0; k < params.size(); ++k) {
        std::uint64_t bits = 0;
        for (int b = 7; b >= 0; --b) bits = (bits << 8) | static_cast<std::uint8_t>(bin[k * 8 + static_cast<std::size_t>(b)]);
        params[k] = std::bit_cast<double>(bits);
    }
    if (params.size() != header.at("parameter_count").get<std::size_t>()) {
        throw ParseError("checkpoint payload length disagrees with its header");
    }
    DenseNet net = DenseNet::from_parameters(widths, params);
    net.validate();
    return net;
}

}  // namespace emp::net
