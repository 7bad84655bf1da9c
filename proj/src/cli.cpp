#include "emp/cli.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <memory>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "emp/bounds.hpp"
#include "emp/core.hpp"
#include "emp/errors.hpp"
#include "emp/image.hpp"
#include "emp/io.hpp"
#include "emp/net.hpp"
#include "emp/png_io.hpp"
#include "emp/simplex.hpp"
#include "emp/svg.hpp"

#ifndef EMP_VERSION
#define EMP_VERSION "0.0.0"
#endif
#ifndef EMP_BUILD_HASH
#define EMP_BUILD_HASH "unknown"
#endif

namespace emp::cli {
namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

// CSV numbers round-trip exactly; JSON uses the library's shortest round-trip form.
std::string num(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string num(const std::optional<double>& v) { return v ? num(*v) : std::string(); }

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }
json opt_json(const std::optional<double>& v) { return v ? finite_or_null(*v) : json(nullptr); }

/// Length-prefixed SHA-256 over every input file, so file boundaries are unambiguous.
json input_digest(const std::vector<std::filesystem::path>& inputs) {
    if (inputs.empty()) return nullptr;
    std::string blob;
    for (const auto& p : inputs) {
        const std::string bytes = io::read_file(p);
        std::uint64_t len = bytes.size();
        for (int b = 0; b < 8; ++b) blob.push_back(static_cast<char>((len >> (8 * b)) & 0xFF));
        blob += bytes;
    }
    return "sha256:" + sha256_hex(blob);
}

struct Output {
    std::string report_path;  // empty: stdout
    std::string format;       // json | csv
    std::string svg_path;
};

class Run {
public:
    Run(std::string subcommand, std::ostream& out) : subcommand_(std::move(subcommand)), out_(out), start_(Clock::now()) {}

    json parameters = json::object();
    std::vector<std::filesystem::path> inputs;

    void emit_json(const json& outputs, const Output& o) const {
        json report = {
            {"tool", "emp"},
            {"version", EMP_VERSION},
            {"build", EMP_BUILD_HASH},
            {"subcommand", subcommand_},
            {"input_digest", input_digest(inputs)},
            {"parameters", parameters},
            {"outputs", outputs},
            {"wall_time_s", std::chrono::duration<double>(Clock::now() - start_).count()},
        };
        write(report.dump(2) + "\n", o);
    }

    void write(const std::string& text, const Output& o) const {
        if (o.report_path.empty()) {
            out_ << text;
        } else {
            io::write_file_atomic(o.report_path, text);
        }
    }

private:
    std::string subcommand_;
    std::ostream& out_;
    Clock::time_point start_;
};

void add_output_options(CLI::App* sub, Output& o, bool svg) {
    sub->add_option("--report", o.report_path, "Write the report here instead of stdout");
    sub->add_option("--format", o.format, "Report format")->check(CLI::IsMember({"json", "csv"}));
    if (svg) sub->add_option("--svg", o.svg_path, "Also write an SVG plot");
}

std::vector<std::size_t> parse_size_list(const std::string& text, const char* what) {
    std::vector<std::size_t> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            const long long v = std::stoll(item, &used);
            if (used != item.size() || v <= 0) throw std::invalid_argument(item);
            out.push_back(static_cast<std::size_t>(v));
        } catch (const std::exception&) {
            throw ParseError(std::string("bad ") + what + " entry '" + item + "'");
        }
    }
    if (out.empty()) throw ParseError(std::string(what) + " is empty");
    return out;
}

std::vector<double> parse_double_list(const std::string& text, const char* what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            const double v = std::stod(item, &used);
            if (used != item.size()) throw std::invalid_argument(item);
            out.push_back(v);
        } catch (const std::exception&) {
            throw ParseError(std::string("bad ") + what + " entry '" + item + "'");
        }
    }
    if (out.empty()) throw ParseError(std::string(what) + " is empty");
    return out;
}

// ---------------------------------------------------------------- prune-scores

struct PruneScoresArgs {
    std::string input;
    double beta = 1.0;
    std::string partition;
    std::string zero_groups = "reject";
    Output out;
};

int cmd_prune_scores(const PruneScoresArgs& a, std::ostream& out) {
    Run run("prune-scores", out);
    run.inputs.push_back(a.input);
    if (!a.partition.empty()) run.inputs.push_back(a.partition);
    run.parameters = {{"input", a.input}, {"beta", a.beta}, {"partition", a.partition.empty() ? json(nullptr) : json(a.partition)},
                      {"zero_groups", a.zero_groups}};

    const ScoreVector scores = io::load_scores(a.input);
    json outputs;
    std::vector<bool> mask;
    if (a.partition.empty()) {
        const EmpDecision d = emp_decide(scores, a.beta);
        outputs = io::to_json(d);
        mask = d.mask;
    } else {
        const Partition p = io::load_partition(a.partition);
        const auto policy = a.zero_groups == "keep_all" ? ZeroGroupPolicy::keep_all : ZeroGroupPolicy::reject;
        const PartitionedDecision d = emp_decide_partitioned(scores, p, a.beta, policy);
        outputs = io::to_json(d);
        mask = d.mask;
    }

    if (a.out.format == "csv") {
        std::string csv = "index,score,kept\n";
        for (std::size_t i = 0; i < scores.size(); ++i) {
            csv += std::to_string(i) + "," + num(scores[i]) + "," + (mask[i] ? "1" : "0") + "\n";
        }
        run.write(csv, a.out);
    } else {
        run.emit_json(outputs, a.out);
    }
    return kExitOk;
}

// ---------------------------------------------------------------------- bounds

struct BoundsArgs {
    std::size_t n = 0;
    std::size_t nu = 0;
    std::optional<double> observed;
    bool sweep = false;
    Output out;
};

int cmd_bounds(BoundsArgs a, std::ostream& out) {
    Run run("bounds", out);
    run.parameters = {{"n", a.n}, {"sweep", a.sweep}};
    if (!a.sweep) {
        if (a.nu == 0) throw ParseError("--nu is required unless --sweep is given");
        run.parameters["nu"] = a.nu;
        run.parameters["observed"] = opt_json(a.observed);
        const bounds::BoundReport r = bounds::make_bound_report(a.n, a.nu, a.observed);
        if (a.out.format == "csv") {
            run.write("n,nu,trivial,tight,approx,observed,slack\n" + std::to_string(r.n) + "," + std::to_string(r.nu) +
                          "," + num(r.trivial_bound) + "," + num(r.tight_bound) + "," + num(r.approx_bound) + "," +
                          num(r.observed_s_eff) + "," + num(r.slack) + "\n",
                      a.out);
        } else {
            run.emit_json(io::to_json(r), a.out);
        }
        return kExitOk;
    }

    std::vector<double> nus, trivial, tight;
    for (std::size_t nu = 1; nu <= a.n; ++nu) {
        nus.push_back(static_cast<double>(nu));
        trivial.push_back(bounds::trivial_lower_bound(a.n, nu));
        tight.push_back(bounds::tight_lower_bound(a.n, nu));
    }
    if (a.out.format == "json") {
        json rows = json::array();
        for (std::size_t k = 0; k < nus.size(); ++k) {
            rows.push_back({{"nu", k + 1}, {"trivial", trivial[k]}, {"tight", tight[k]}, {"gap", 1.0 - tight[k]}});
        }
        run.emit_json({{"n", a.n}, {"rows", rows}}, a.out);
    } else {
        std::string csv = "nu,trivial,tight,gap\n";
        for (std::size_t k = 0; k < nus.size(); ++k) {
            csv += std::to_string(k + 1) + "," + num(trivial[k]) + "," + num(tight[k]) + "," + num(1.0 - tight[k]) + "\n";
        }
        run.write(csv, a.out);
    }
    if (!a.out.svg_path.empty()) {
        svg::PlotSpec plot;
        plot.title = "Retained-mass lower bounds, N = " + std::to_string(a.n);
        plot.x_label = "N_eff";
        plot.y_label = "lower bound on s_eff";
        plot.series = {{"tight", nus, tight, false}, {"trivial nu/N", nus, trivial, false}};
        io::write_file_atomic(a.out.svg_path, svg::line_plot(plot));
    }
    return kExitOk;
}

// ------------------------------------------------------------- verify-geometry

struct VerifyArgs {
    std::size_t n = 8;
    std::size_t budget = 100000;
    std::uint64_t seed = 0;
    std::size_t restarts = 8;
    std::string nus;
    Output out;
};

int cmd_verify_geometry(const VerifyArgs& a, std::ostream& out) {
    Run run("verify-geometry", out);
    if (a.n < 3 || a.n > simplex::kMaxOracleDimension) {
        throw DomainError("--n must lie in [3, " + std::to_string(simplex::kMaxOracleDimension) + "]");
    }
    std::vector<std::size_t> nus;
    if (a.nus.empty()) {
        for (std::size_t nu = 2; nu < a.n; ++nu) nus.push_back(nu);
    } else {
        nus = parse_size_list(a.nus, "--nu");
        for (std::size_t nu : nus) {
            if (nu < 2 || nu >= a.n) throw DomainError("--nu entries must lie in [2, n-1]");
        }
    }
    run.parameters = {{"n", a.n}, {"budget", a.budget}, {"seed", a.seed}, {"restarts", a.restarts}, {"nu", nus}};

    simplex::OracleConfig cfg;
    cfg.budget = a.budget;
    cfg.seed = a.seed;
    cfg.restarts = a.restarts;
    const simplex::VerificationReport rep = simplex::verify_proposition(a.n, nus, cfg);

    if (a.out.format == "csv") {
        std::string csv =
            "nu,closed_form,brute_force_min,gap,phi_at_extremal,extremal_inverse_sum_sq,feasible_samples,"
            "lower_bound_ok,tightness_ok,extremal_phi_ok,closure_ok,passed\n";
        for (const auto& r : rep.rows) {
            csv += std::to_string(r.nu) + "," + num(r.closed_form) + "," + num(r.brute_force_min) + "," +
                   num(r.brute_force_min - r.closed_form) + "," + num(r.phi_at_extremal) + "," +
                   num(r.extremal_inverse_sum_sq) + "," + std::to_string(r.feasible_samples) + "," +
                   std::to_string(r.lower_bound_ok) + "," + std::to_string(r.tightness_ok) + "," +
                   std::to_string(r.extremal_phi_ok) + "," + std::to_string(r.closure_ok) + "," +
                   std::to_string(r.passed()) + "\n";
        }
        run.write(csv, a.out);
    } else {
        json rows = json::array();
        for (const auto& r : rep.rows) {
            rows.push_back({{"nu", r.nu},
                            {"closed_form", r.closed_form},
                            {"brute_force_min", r.brute_force_min},
                            {"gap", r.brute_force_min - r.closed_form},
                            {"phi_at_extremal", r.phi_at_extremal},
                            {"extremal_inverse_sum_sq", r.extremal_inverse_sum_sq},
                            {"feasible_samples", r.feasible_samples},
                            {"lower_bound_ok", r.lower_bound_ok},
                            {"tightness_ok", r.tightness_ok},
                            {"extremal_phi_ok", r.extremal_phi_ok},
                            {"closure_ok", r.closure_ok},
                            {"passed", r.passed()}});
        }
        run.emit_json({{"n", rep.n}, {"budget", rep.budget}, {"seed", rep.seed}, {"failures", rep.failures()},
                       {"rows", rows}},
                      a.out);
    }
    if (!a.out.svg_path.empty()) {
        std::vector<double> x, closed, brute;
        for (const auto& r : rep.rows) {
            x.push_back(static_cast<double>(r.nu));
            closed.push_back(r.closed_form);
            brute.push_back(r.brute_force_min);
        }
        svg::PlotSpec plot;
        plot.title = "Brute-force minimum vs closed form, N = " + std::to_string(a.n);
        plot.x_label = "nu";
        plot.y_label = "min phi_nu over A_nu";
        plot.series = {{"closed form", x, closed, false}, {"brute force", x, brute, true}};
        io::write_file_atomic(a.out.svg_path, svg::line_plot(plot));
    }
    return rep.failures() == 0 ? kExitOk : kExitVerification;
}

// ---------------------------------------------------------------- prune-image

struct PruneImageArgs {
    std::string input;
    std::string output;
    std::string mode = "global";
    std::size_t patch = 4;
    std::string center = "tile";
    double beta = 1.0;
    Output out;
};

int cmd_prune_image(const PruneImageArgs& a, std::ostream& out) {
    Run run("prune-image", out);
    run.inputs.push_back(a.input);
    run.parameters = {{"input", a.input}, {"mode", a.mode}, {"beta", a.beta},
                      {"patch", a.mode == "patch" ? json(a.patch) : json(nullptr)},
                      {"center", a.mode == "patch" ? json(a.center) : json("channel")}};

    const image::ImageTensor img = image::read_png(a.input);
    const image::PruneOutcome res =
        a.mode == "patch" ? image::prune_image_patch(img, a.beta, a.patch, image::parse_centering(a.center))
                           : image::prune_image_global(img, a.beta);
    if (!a.output.empty()) image::write_png(a.output, res.pruned);

    std::string raw;
    for (const auto& plane : res.pruned.planes) raw.append(plane.begin(), plane.end());
    static constexpr const char* kNames[image::kChannels] = {"R", "G", "B"};

    if (a.out.format == "csv") {
        std::string csv = "channel,mean,passthrough,kept,sparsity,ssim,psnr_db\n";
        for (std::size_t c = 0; c < image::kChannels; ++c) {
            const auto& ch = res.channels[c];
            csv += std::string(kNames[c]) + "," + num(ch.mean) + "," + (ch.passthrough ? "1" : "0") + "," +
                   std::to_string(ch.kept) + "," + num(ch.sparsity) + "," + num(ch.ssim) + "," + num(ch.psnr_db) + "\n";
        }
        std::size_t kept = 0;
        for (const auto& ch : res.channels) kept += ch.kept;
        csv += "all,," + std::string(",") + std::to_string(kept) + "," + num(res.sparsity) + "," + num(res.ssim) + "," +
               num(res.psnr_db) + "\n";
        run.write(csv, a.out);
    } else {
        json channels = json::array();
        for (std::size_t c = 0; c < image::kChannels; ++c) {
            const auto& ch = res.channels[c];
            channels.push_back({{"channel", kNames[c]},
                                {"mean", ch.mean},
                                {"passthrough", ch.passthrough},
                                {"kept", ch.kept},
                                {"sparsity", ch.sparsity},
                                {"ssim", ch.ssim},
                                {"psnr_db", finite_or_null(ch.psnr_db)}});
        }
        run.emit_json({{"width", img.width},
                       {"height", img.height},
                       {"sparsity", res.sparsity},
                       {"ssim", res.ssim},
                       {"psnr_db", finite_or_null(res.psnr_db)},
                       {"channels", channels},
                       {"pruned_pixels_sha256", sha256_hex(raw)},
                       {"output", a.output.empty() ? json(nullptr) : json(a.output)}},
                      a.out);
    }
    return kExitOk;
}

// ------------------------------------------------------------------- demo-net

struct DemoNetArgs {
    std::string dataset = "blobs";
    std::string idx_images;
    std::string idx_labels;
    std::string arch;
    std::size_t samples = 0;  // 0: dataset default
    std::size_t epochs = 200;
    double lr = 0.05;
    std::size_t batch = 16;
    double momentum = 0.9;
    std::uint64_t seed = 7;
    std::string betas = "0.5,0.75,1,1.25,1.5,2";
    std::string mode = "global";
    std::size_t probes = 32;
    std::string checkpoint;
    Output out;
};

net::Dataset build_dataset(const DemoNetArgs& a, std::vector<std::size_t>& default_arch) {
    if (a.dataset == "blobs") {
        default_arch = {2, 16, 2};
        const std::vector<std::size_t> arch = a.arch.empty() ? default_arch : parse_size_list(a.arch, "--arch");
        return net::make_blobs(a.samples ? a.samples : 200, arch.back(), arch.front(), 1.0, 1.2, a.seed);
    }
    if (a.dataset == "moons") {
        default_arch = {2, 16, 2};
        return net::make_moons(a.samples ? a.samples : 400, 0.2, a.seed);
    }
    if (a.dataset == "digits") {
        default_arch = {64, 32, 10};
        return net::make_digits(a.samples ? a.samples : 60, 0.15, a.seed);
    }
    if (a.idx_images.empty() || a.idx_labels.empty()) throw ParseError("--dataset idx needs --idx-images and --idx-labels");
    net::Dataset d = net::load_idx(a.idx_images, a.idx_labels, a.seed, 0.25, a.samples);
    default_arch = {d.input_dim, 32, d.num_classes};
    return d;
}

int cmd_demo_net(const DemoNetArgs& a, std::ostream& out) {
    Run run("demo-net", out);
    if (a.dataset == "idx") {
        run.inputs = {a.idx_images, a.idx_labels};
    }
    std::vector<std::size_t> default_arch;
    const net::Dataset data = build_dataset(a, default_arch);
    const std::vector<std::size_t> arch = a.arch.empty() ? default_arch : parse_size_list(a.arch, "--arch");
    if (arch.size() < 2 || arch.front() != data.input_dim || arch.back() != data.num_classes) {
        throw DimensionMismatch("--arch must start at " + std::to_string(data.input_dim) + " inputs and end at " +
                                std::to_string(data.num_classes) + " classes");
    }
    net::SweepConfig sweep;
    sweep.betas = parse_double_list(a.betas, "--betas");
    if (a.mode == "both") {
        sweep.modes = {net::PruneMode::global, net::PruneMode::block};
    } else {
        sweep.modes = {net::parse_prune_mode(a.mode)};
    }
    sweep.trace_probes = a.probes;
    sweep.trace_seed = a.seed;
    if (a.probes != 0 && a.probes < net::kMinTraceProbes) throw DomainError("--probes must be 0 (skip) or at least 10");

    run.parameters = {{"dataset", a.dataset}, {"arch", arch},       {"samples", data.size()}, {"epochs", a.epochs},
                      {"lr", a.lr},           {"batch", a.batch},   {"momentum", a.momentum}, {"seed", a.seed},
                      {"betas", sweep.betas}, {"mode", a.mode},     {"probes", a.probes}};

    net::TrainConfig tc;
    tc.epochs = a.epochs;
    tc.learning_rate = a.lr;
    tc.batch_size = a.batch;
    tc.momentum = a.momentum;
    tc.seed = a.seed;
    const net::TrainResult trained = net::train(net::DenseNet::initialize(arch, a.seed), data, tc);
    if (!a.checkpoint.empty()) net::save_checkpoint(trained.net, a.checkpoint);
    const net::SweepResult res = net::beta_sweep(trained.net, data, sweep);

    if (a.out.format == "csv") {
        std::string csv =
            "mode,beta,keep_count,weight_count,sparsity,rho,dense_loss,pruned_loss,epsilon,dense_acc,pruned_acc,"
            "delta_theta_sq,trace_h,lemma_bound,asymptotic_bound\n";
        for (const auto& r : res.rows) {
            csv += std::string(net::to_string(r.mode)) + "," + num(r.beta) + "," + std::to_string(r.keep_count) + "," +
                   std::to_string(r.weight_count) + "," + num(r.sparsity) + "," + num(r.rho) + "," + num(r.dense_loss) +
                   "," + num(r.pruned_loss) + "," + num(r.epsilon) + "," + num(r.dense_acc) + "," + num(r.pruned_acc) +
                   "," + num(r.delta_theta_sq) + "," + num(r.trace_h_estimate) + "," + num(r.lemma_bound) + "," +
                   num(r.asymptotic_bound) + "\n";
        }
        run.write(csv, a.out);
    } else {
        json rows = json::array();
        for (const auto& r : res.rows) {
            rows.push_back({{"mode", net::to_string(r.mode)},
                            {"beta", r.beta},
                            {"keep_count", r.keep_count},
                            {"weight_count", r.weight_count},
                            {"sparsity", r.sparsity},
                            {"rho", r.rho},
                            {"dense_loss", r.dense_loss},
                            {"pruned_loss", r.pruned_loss},
                            {"epsilon", r.epsilon},
                            {"dense_acc", r.dense_acc},
                            {"pruned_acc", r.pruned_acc},
                            {"delta_theta_sq", r.delta_theta_sq},
                            {"theta_l1", r.theta_l1},
                            {"trace_h", opt_json(r.trace_h_estimate)},
                            {"lemma_bound", opt_json(r.lemma_bound)},
                            {"asymptotic_bound", opt_json(r.asymptotic_bound)}});
        }
        json trace = nullptr;
        if (res.trace) {
            trace = {{"mean", res.trace->mean}, {"std_error", res.trace->std_error}, {"probes", res.trace->probes}};
        }
        run.emit_json({{"dataset",
                        {{"name", a.dataset},
                         {"samples", data.size()},
                         {"train", data.train.size()},
                         {"test", data.test.size()},
                         {"input_dim", data.input_dim},
                         {"classes", data.num_classes}}},
                       {"training",
                        {{"train_loss", trained.train_loss},
                         {"test_loss", trained.test_loss},
                         {"train_accuracy", trained.train_accuracy},
                         {"test_accuracy", trained.test_accuracy}}},
                       {"parameter_count", trained.net.parameter_count()},
                       {"weight_count", trained.net.weight_count()},
                       {"trace_h", trace},
                       {"rows", rows}},
                      a.out);
    }
    if (!a.out.svg_path.empty()) {
        svg::PlotSpec plot;
        plot.title = "Loss change after one-shot pruning";
        plot.x_label = "beta";
        plot.y_label = "epsilon";
        for (net::PruneMode m : sweep.modes) {
            svg::Series eps{std::string("epsilon ") + net::to_string(m), {}, {}, true};
            svg::Series lemma{std::string("lemma bound ") + net::to_string(m), {}, {}, false};
            for (const auto& r : res.rows) {
                if (r.mode != m) continue;
                eps.x.push_back(r.beta);
                eps.y.push_back(r.epsilon);
                if (r.lemma_bound) {
                    lemma.x.push_back(r.beta);
                    lemma.y.push_back(*r.lemma_bound);
                }
            }
            plot.series.push_back(std::move(eps));
            if (!lemma.x.empty()) plot.series.push_back(std::move(lemma));
        }
        io::write_file_atomic(a.out.svg_path, svg::line_plot(plot));
    }
    return kExitOk;
}

}  // namespace

std::string version_string() { return std::string("emp ") + EMP_VERSION + " (" + EMP_BUILD_HASH + ")"; }

std::string sha256_hex(std::string_view bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw Error("SHA-256 computation failed");
    }
    static constexpr char kHex[] = "0123456789abcdef";
    std::string hex;
    for (unsigned int i = 0; i < len; ++i) {
        hex += kHex[digest[i] >> 4];
        hex += kHex[digest[i] & 15];
    }
    return hex;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Effective-number pruning: decisions, bounds, geometry checks, and demos", "emp"};
    app.set_version_flag("--version", version_string());
    app.require_subcommand(1);

    PruneScoresArgs ps;
    auto* c_ps = app.add_subcommand("prune-scores", "Prune a score vector and emit the decision");
    c_ps->add_option("--input", ps.input, "Score file (CSV or JSON)")->required();
    c_ps->add_option("--beta", ps.beta, "Scale on N_eff")->capture_default_str();
    c_ps->add_option("--partition", ps.partition, "JSON list of index groups; prunes each group on its own");
    c_ps->add_option("--zero-groups", ps.zero_groups, "All-zero groups: reject or keep_all")
        ->check(CLI::IsMember({"reject", "keep_all"}))
        ->capture_default_str();
    add_output_options(c_ps, ps.out, false);

    BoundsArgs bd;
    auto* c_bd = app.add_subcommand("bounds", "Retained-mass bounds for given N and N_eff");
    c_bd->add_option("--n", bd.n, "Vector length N")->required();
    c_bd->add_option("--nu", bd.nu, "Effective number");
    c_bd->add_option("--observed", bd.observed, "Observed s_eff, reported with its slack");
    c_bd->add_flag("--sweep", bd.sweep, "Tabulate every nu in [1, N]");
    add_output_options(c_bd, bd.out, true);

    VerifyArgs vg;
    auto* c_vg = app.add_subcommand("verify-geometry", "Check the closed-form bound against a numerical oracle");
    c_vg->add_option("--n", vg.n, "Dimension, 3..12")->capture_default_str();
    c_vg->add_option("--budget", vg.budget, "Dirichlet draws per nu")->capture_default_str();
    c_vg->add_option("--seed", vg.seed, "Master seed")->capture_default_str();
    c_vg->add_option("--restarts", vg.restarts, "Refinement starts per nu")->capture_default_str();
    c_vg->add_option("--nu", vg.nus, "Comma list of nu values (default: all)");
    add_output_options(c_vg, vg.out, true);

    PruneImageArgs pi;
    auto* c_pi = app.add_subcommand("prune-image", "Featurewise pruning of an RGB PNG");
    c_pi->add_option("--input", pi.input, "8-bit RGB PNG")->required();
    c_pi->add_option("--output", pi.output, "Where to write the pruned PNG");
    c_pi->add_option("--mode", pi.mode, "global or patch")->check(CLI::IsMember({"global", "patch"}))->capture_default_str();
    c_pi->add_option("--patch", pi.patch, "Tile edge for patch mode")->check(CLI::PositiveNumber)->capture_default_str();
    c_pi->add_option("--center", pi.center, "Patch mode: center on the tile mean or the channel mean")
        ->check(CLI::IsMember({"tile", "channel"}))
        ->capture_default_str();
    c_pi->add_option("--beta", pi.beta, "Scale on N_eff")->capture_default_str();
    add_output_options(c_pi, pi.out, false);

    DemoNetArgs dn;
    auto* c_dn = app.add_subcommand("demo-net", "Train a small classifier, prune by weight magnitude, sweep beta");
    c_dn->add_option("--dataset", dn.dataset, "blobs, moons, digits, or idx")
        ->check(CLI::IsMember({"blobs", "moons", "digits", "idx"}))
        ->capture_default_str();
    c_dn->add_option("--idx-images", dn.idx_images, "IDX image file (with --dataset idx)");
    c_dn->add_option("--idx-labels", dn.idx_labels, "IDX label file (with --dataset idx)");
    c_dn->add_option("--arch", dn.arch, "Layer widths, e.g. 2,16,2");
    c_dn->add_option("--samples", dn.samples, "Samples (per class for blobs and digits; cap for idx)");
    c_dn->add_option("--epochs", dn.epochs)->capture_default_str();
    c_dn->add_option("--lr", dn.lr)->capture_default_str();
    c_dn->add_option("--batch", dn.batch)->check(CLI::PositiveNumber)->capture_default_str();
    c_dn->add_option("--momentum", dn.momentum)->capture_default_str();
    c_dn->add_option("--seed", dn.seed)->capture_default_str();
    c_dn->add_option("--betas", dn.betas, "Comma list")->capture_default_str();
    c_dn->add_option("--mode", dn.mode, "global, block, or both")
        ->check(CLI::IsMember({"global", "block", "both"}))
        ->capture_default_str();
    c_dn->add_option("--probes", dn.probes, "Hutchinson probes for Tr(H); 0 skips the bounds")->capture_default_str();
    c_dn->add_option("--checkpoint", dn.checkpoint, "Save the trained net as <prefix>.bin/.json");
    add_output_options(c_dn, dn.out, true);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (c_ps->parsed()) return cmd_prune_scores(ps, out);
        if (c_bd->parsed()) return cmd_bounds(bd, out);
        if (c_vg->parsed()) return cmd_verify_geometry(vg, out);
        if (c_pi->parsed()) return cmd_prune_image(pi, out);
        if (c_dn->parsed()) return cmd_demo_net(dn, out);
    } catch (const emp::Error& e) {
        err << "emp: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "emp: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "emp: internal error: " << e.what() << "\n";
        return kExitInternal;
    }
    return kExitUsage;
}

}  // namespace emp::cli
