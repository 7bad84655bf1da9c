#pragma once

// Desk-scale experiment rig: a small fully-connected ReLU classifier trained with
// momentum SGD, magnitude scores for its weights, one-shot masking, beta sweeps,
// and a Hutchinson estimate of the Hessian trace for the loss-change bound.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "emp/core.hpp"

namespace emp::net {

struct Layer {
    std::size_t inputs = 0;
    std::size_t outputs = 0;
    std::vector<double> weights;  // outputs x inputs, row-major
    std::vector<double> bias;     // outputs
};

/// ReLU hidden layers, identity output layer, softmax cross-entropy loss.
class DenseNet {
public:
    DenseNet() = default;

    /// He-uniform weights, zero biases.
    static DenseNet initialize(std::vector<std::size_t> widths, std::uint64_t seed);
    /// Parameters in the flat layout of parameters().
    static DenseNet from_parameters(std::vector<std::size_t> widths, std::span<const double> params);

    const std::vector<std::size_t>& widths() const noexcept { return widths_; }
    const std::vector<Layer>& layers() const noexcept { return layers_; }
    std::vector<Layer>& layers() noexcept { return layers_; }

    std::size_t parameter_count() const noexcept;
    std::size_t weight_count() const noexcept;

    /// Layer by layer: weights then bias.
    std::vector<double> parameters() const;
    void set_parameters(std::span<const double> params);

    /// Weights only, layer by layer (biases are never pruned).
    std::vector<double> weights() const;
    void set_weights(std::span<const double> w);

    std::vector<double> logits(std::span<const double> x) const;
    std::size_t predict(std::span<const double> x) const;

    void validate() const;

private:
    std::vector<std::size_t> widths_;
    std::vector<Layer> layers_;
};

struct Dataset {
    std::size_t input_dim = 0;
    std::size_t num_classes = 0;
    std::vector<double> features;  // samples x input_dim, row-major
    std::vector<std::size_t> labels;
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;

    std::size_t size() const noexcept { return labels.size(); }
    std::span<const double> row(std::size_t i) const { return {features.data() + i * input_dim, input_dim}; }
    void validate() const;
};

/// Isotropic Gaussian clusters; centers are spread on a circle (dim >= 2) of the given radius.
Dataset make_blobs(std::size_t per_class, std::size_t classes, std::size_t dim, double spread, double radius,
                   std::uint64_t seed, double test_fraction = 0.25);
Dataset make_moons(std::size_t samples, double noise, std::uint64_t seed, double test_fraction = 0.25);
/// Noisy 8x8 seven-segment digits, 64 features in [0, 1], 10 classes.
Dataset make_digits(std::size_t per_class, double noise, std::uint64_t seed, double test_fraction = 0.25);
/// IDX image/label files (MNIST layout); pixels scaled to [0, 1].
Dataset load_idx(const std::filesystem::path& images, const std::filesystem::path& labels, std::uint64_t seed,
                 double test_fraction = 0.25, std::size_t max_samples = 0);

/// Mean cross-entropy over the given rows.
double loss(const DenseNet& net, const Dataset& data, std::span<const std::size_t> rows);
double accuracy(const DenseNet& net, const Dataset& data, std::span<const std::size_t> rows);

/// Gradient of loss() with respect to parameters(), by backpropagation.
std::vector<double> loss_gradient(const DenseNet& net, const Dataset& data, std::span<const std::size_t> rows);

struct TrainConfig {
    std::size_t epochs = 200;
    double learning_rate = 0.05;
    std::size_t batch_size = 16;
    double momentum = 0.9;
    std::uint64_t seed = 7;
};

struct TrainResult {
    DenseNet net;
    double train_loss = 0.0;
    double test_loss = 0.0;
    double train_accuracy = 0.0;
    double test_accuracy = 0.0;
};

/// Mini-batch SGD with momentum. Deterministic for a fixed seed.
/// Throws DivergenceDetected if the loss becomes non-finite.
TrainResult train(DenseNet net, const Dataset& data, const TrainConfig& cfg);

struct WeightRef {
    std::size_t layer = 0;
    std::size_t offset = 0;  // into Layer::weights
};

struct MagnitudeScores {
    ScoreVector scores;            // |w| over every weight, layer order
    std::vector<WeightRef> index;  // score position -> weight
    Partition by_layer;            // one group per layer ("block" pruning)
};

MagnitudeScores magnitude_scores(const DenseNet& net);

/// Copy of the network with dropped weights zeroed; biases untouched.
DenseNet apply_mask(const DenseNet& net, const std::vector<bool>& weight_mask);

/// ||w_a - w_b||^2 over weights.
double weight_distance_sq(const DenseNet& a, const DenseNet& b);
/// Sum of squared weights where the mask is false.
double dropped_weight_energy(const DenseNet& net, const std::vector<bool>& weight_mask);

enum class PruneMode { global, block };

const char* to_string(PruneMode m) noexcept;
PruneMode parse_prune_mode(const std::string& s);

struct PruneExperimentResult {
    double beta = 1.0;
    PruneMode mode = PruneMode::global;
    std::size_t weight_count = 0;
    std::size_t keep_count = 0;
    double sparsity = 0.0;
    double rho = 1.0;  // keep_count / weight_count
    double dense_loss = 0.0;
    double pruned_loss = 0.0;
    double epsilon = 0.0;  // |dense_loss - pruned_loss| on the training split
    double dense_acc = 0.0;
    double pruned_acc = 0.0;
    double delta_theta_sq = 0.0;
    double theta_l1 = 0.0;
    std::optional<double> trace_h_estimate;
    std::optional<double> lemma_bound;
    std::optional<double> asymptotic_bound;
};

struct TraceEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t probes = 0;
};

struct SweepConfig {
    std::vector<double> betas{0.5, 0.75, 1.0, 1.25, 1.5, 2.0};
    std::vector<PruneMode> modes{PruneMode::global};
    std::size_t trace_probes = 0;  // 0 skips the Hessian trace and the bounds, else >= kMinTraceProbes
    std::uint64_t trace_seed = 0;
};

struct SweepResult {
    std::vector<PruneExperimentResult> rows;  // modes outer, betas inner
    std::optional<TraceEstimate> trace;
};

SweepResult beta_sweep(const DenseNet& net, const Dataset& data, const SweepConfig& cfg);

using GradientFn = std::function<std::vector<double>(std::span<const double>)>;

/// Mean and standard error of v' H v over Rademacher probes v, with H v from central
/// differences of the gradient at step 1e-4 * (1 + ||theta||_inf). Needs probes >= 2.
TraceEstimate hutchinson_trace(const GradientFn& gradient, std::span<const double> theta, std::size_t probes,
                               std::uint64_t seed);

inline constexpr std::size_t kMinTraceProbes = 10;

/// Trace of the training-loss Hessian with respect to the weights (biases held fixed).
/// Needs probes >= kMinTraceProbes.
TraceEstimate estimate_trace_h(const DenseNet& net, const Dataset& data, std::size_t probes, std::uint64_t seed);

struct BoundGapReport {
    double epsilon = 0.0;
    double rho = 1.0;
    double trace_h = 0.0;
    double lemma_bound = 0.0;
    double asymptotic_bound = 0.0;
    double slack_factor = 1.0;
    bool exceeds_lemma = false;  // informational only
};

BoundGapReport evaluate_bound_gap(const PruneExperimentResult& result, double trace_h, double slack_factor = 1.0);

/// Writes <prefix>.bin (float64 little-endian, parameters() order) and <prefix>.json (shape header).
void save_checkpoint(const DenseNet& net, const std::filesystem::path& prefix);
DenseNet load_checkpoint(const std::filesystem::path& prefix);

}  // namespace emp::net
