// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
// Each check recomputes what it can from scratch instead of trusting the library.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <numeric>
#include <random>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "emp/bounds.hpp"
#include "emp/core.hpp"
#include "emp/image.hpp"
#include "emp/io.hpp"
#include "emp/net.hpp"
#include "emp/parallel.hpp"
#include "emp/png_io.hpp"
#include "emp/seed.hpp"
#include "emp/simplex.hpp"

namespace fs = std::filesystem;
using namespace emp;

namespace {

// Tolerances and budgets, fixed here so a run cannot loosen them.
constexpr std::size_t kTrivialVectors = 1'000'000;
constexpr double kTrivialLimitS = 30.0;

constexpr std::size_t kCertifySamplesPerCell = 100'000;
constexpr double kCertifyTol = 1e-12;
constexpr std::size_t kOracleBudget = 100'000;
constexpr double kTightnessAbove = 1e-3;
constexpr double kTightnessBelow = 1e-9;
constexpr double kCertifyLimitS = 300.0;

constexpr double kGeometryTol = 1e-12;
constexpr double kExtremalLimitS = 5.0;
constexpr std::size_t kIdentityDraws = 200'000;
constexpr double kIdentityLimitS = 5.0;

constexpr std::size_t kInvarianceCases = 10'000;
constexpr double kConformanceLimitS = 10.0;

constexpr double kSsimRefTol = 1e-6;
constexpr double kImageLimitS = 20.0;

constexpr double kTinyNetEpsilonMax = 0.15;
constexpr double kGoldenRelTol = 1e-9;
constexpr double kNetLimitS = 120.0;

constexpr double kGradRelTol = 1e-5;
constexpr double kHutchinsonSigmas = 3.0;
constexpr double kGradLimitS = 30.0;

constexpr double kDeterminismLimitS = 60.0;

const fs::path kData = EMP_TEST_DATA_DIR;
const fs::path kGolden = EMP_GOLDEN_DIR;
const std::string kCli = EMP_CLI_PATH;

using Clock = std::chrono::steady_clock;

struct Outcome {
    bool ok = true;
    std::string detail;
};

// Collects failure messages from worker threads; keeps the first few.
class Failures {
public:
    void add(const std::string& msg) {
        std::lock_guard lock(mu_);
        if (count_++ < 5) first_.push_back(msg);
    }
    std::size_t count() const { return count_; }
    std::string summary() const {
        std::string s;
        for (const auto& m : first_) s += "\n    " + m;
        return s;
    }

private:
    mutable std::mutex mu_;
    std::atomic<std::size_t> count_{0};
    std::vector<std::string> first_;
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

// N_eff from raw scores in extended precision. Returns the floor of the inverse
// Simpson index, or [n-1, n] as acceptable when the index sits within 1e-9 of an
// integer from below (the library snaps such values up).
struct NeffOracle {
    std::size_t lo = 0, hi = 0;
};

NeffOracle neff_oracle(std::span<const double> s) {
    long double l1 = 0.0L;
    for (double x : s) l1 += std::fabs(static_cast<long double>(x));
    long double sq = 0.0L;
    for (double x : s) {
        const long double w = std::fabs(static_cast<long double>(x)) / l1;
        sq += w * w;
    }
    const long double inv = 1.0L / sq;
    const long double fl = std::floor(inv);
    const auto n = static_cast<long double>(s.size());
    auto clip = [&](long double v) { return static_cast<std::size_t>(std::clamp(v, 1.0L, n)); };
    NeffOracle o{clip(fl), clip(fl)};
    if (std::ceil(inv) - inv <= 1e-9L) o.hi = clip(std::ceil(inv));
    if (inv - fl <= 1e-9L) o.lo = clip(fl - 1.0L);
    return o;
}

// Reference top-k: stable sort by magnitude descending, so equal magnitudes keep index order.
std::vector<std::size_t> reference_top_k(std::span<const double> s, std::size_t k) {
    std::vector<std::size_t> order(s.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return std::fabs(s[a]) > std::fabs(s[b]); });
    order.resize(k);
    std::sort(order.begin(), order.end());
    return order;
}

// A mixture of shapes: light and heavy tails, integer ties, sparse, near-uniform, tiny and huge scales.
std::vector<double> random_scores(std::size_t n, std::mt19937_64& rng) {
    std::vector<double> s(n);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::normal_distribution<double> g(0.0, 1.0);
    const int kind = static_cast<int>(rng() % 7);
    for (std::size_t i = 0; i < n; ++i) {
        switch (kind) {
            case 0: s[i] = g(rng); break;
            case 1: s[i] = std::pow(u(rng), -1.5) * (u(rng) < 0.5 ? -1 : 1); break;
            case 2: s[i] = static_cast<double>(rng() % 4); break;
            case 3: s[i] = u(rng) < 0.7 ? 0.0 : g(rng); break;
            case 4: s[i] = 1.0 + 1e-7 * g(rng); break;
            case 5: s[i] = 1e-200 * u(rng); break;
            default: s[i] = 1e150 * std::exp(3.0 * g(rng)); break;
        }
    }
    if (std::all_of(s.begin(), s.end(), [](double x) { return x == 0.0; })) s[rng() % n] = 1.0;
    return s;
}

Outcome criterion_trivial_bound() {
    Failures fails;
    constexpr std::size_t kChunks = 64;
    parallel_for(kChunks, [&](std::size_t chunk) {
        std::mt19937_64 rng(derive_seed(1, {chunk}));
        for (std::size_t t = chunk; t < kTrivialVectors; t += kChunks) {
            const std::size_t n = 2 + t % 63;
            const auto s = random_scores(n, rng);
            const auto d = emp_decide(ScoreVector(s));
            const double floor_mass = static_cast<double>(d.n_eff) / static_cast<double>(n);
            if (!(d.s_eff >= floor_mass)) {
                fails.add("n=" + std::to_string(n) + " n_eff=" + std::to_string(d.n_eff) + " s_eff=" + fmt("%.17g", d.s_eff));
            }
        }
    });
    return {fails.count() == 0, std::to_string(kTrivialVectors) + " vectors, N in [2,64], " + std::to_string(fails.count()) +
                                    " violations" + fails.summary()};
}

// Dirichlet concentration whose mean sum of squares lands mid-cell: (a+1)/(Na+1) = 1/(nu+0.5).
double calibrated_alpha(std::size_t n, std::size_t nu) {
    const double q = 1.0 / (static_cast<double>(nu) + 0.5);
    return (1.0 - q) / (q * static_cast<double>(n) - 1.0);
}

Outcome criterion_certification() {
    struct Cell {
        std::size_t n, nu;
    };
    std::vector<Cell> cells;
    for (std::size_t n = 3; n <= 12; ++n) {
        for (std::size_t nu = 2; nu < n; ++nu) cells.push_back({n, nu});
    }
    Failures fails;
    std::vector<double> min_slack(cells.size(), INFINITY);
    std::vector<std::size_t> draws(cells.size(), 0);

    parallel_for(cells.size(), [&](std::size_t c) {
        const auto [n, nu] = cells[c];
        std::mt19937_64 rng(derive_seed(2, {n, nu}));
        const double bound = bounds::tight_lower_bound(n, nu);
        const double alpha = calibrated_alpha(n, nu);
        const auto p = simplex::extremal_point(n, nu);
        std::normal_distribution<double> g(0.0, 1.0);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        std::size_t accepted = 0;
        while (accepted < kCertifySamplesPerCell) {
            ++draws[c];
            std::vector<double> w;
            if (draws[c] % 10 == 0) {
                // Near the minimiser: jitter the extremal point and push it just outside B_{nu+1}.
                w.assign(p.weights().begin(), p.weights().end());
                const double scale = std::pow(10.0, -2.0 - 6.0 * u(rng));
                for (double& x : w) x = std::max(0.0, x + scale * g(rng));
            } else {
                w = simplex::sample_dirichlet(n, alpha, rng);
            }
            std::shuffle(w.begin(), w.end(), rng);
            const ScoreVector s(w);
            if (s.all_zero()) continue;
            const auto d = emp_decide(s);
            if (d.n_eff != nu) continue;
            ++accepted;
            const double slack = d.s_eff - bound;
            min_slack[c] = std::min(min_slack[c], slack);
            if (slack < -kCertifyTol) {
                fails.add("n=" + std::to_string(n) + " nu=" + std::to_string(nu) + " slack=" + fmt("%.3e", slack));
            }
        }
    });

    std::size_t tight_fail = 0;
    double worst_above = 0.0, worst_below = 0.0;
    simplex::OracleConfig cfg;
    cfg.budget = kOracleBudget;
    cfg.seed = 2;
    for (std::size_t n = 3; n <= 12; ++n) {
        std::vector<std::size_t> nus;
        for (std::size_t nu = 2; nu < n; ++nu) nus.push_back(nu);
        const auto report = simplex::verify_proposition(n, nus, cfg);
        for (const auto& row : report.rows) {
            const double gap = row.brute_force_min - row.closed_form;
            worst_above = std::max(worst_above, gap);
            worst_below = std::min(worst_below, gap);
            if (gap > kTightnessAbove || gap < -kTightnessBelow) {
                ++tight_fail;
                fails.add("oracle n=" + std::to_string(n) + " nu=" + std::to_string(row.nu) + " gap=" + fmt("%.3e", gap));
            }
        }
    }
    const double overall_min = *std::min_element(min_slack.begin(), min_slack.end());
    const std::size_t total_draws = std::accumulate(draws.begin(), draws.end(), std::size_t{0});
    return {fails.count() == 0,
            std::to_string(cells.size()) + " cells x " + std::to_string(kCertifySamplesPerCell) + " accepted (" +
                std::to_string(total_draws) + " draws), min slack " + fmt("%.3e", overall_min) + "; oracle gap in [" +
                fmt("%.2e", worst_below) + ", " + fmt("%.2e", worst_above) + "], " + std::to_string(tight_fail) +
                " oracle failures" + fails.summary()};
}

Outcome criterion_extremal_point() {
    double worst = 0.0;
    std::size_t checked = 0;
    for (std::size_t n = 3; n <= 64; ++n) {
        const simplex::GeometryContext ctx(n);
        const auto center = ctx.barycenter(n);
        for (std::size_t nu = 2; nu < n; ++nu) {
            const auto v = simplex::extremal_point(n, nu);
            // Coordinate form, rebuilt here: first coordinate a, the rest b.
            const double N = static_cast<double>(n), k = static_cast<double>(nu);
            const double t = std::sqrt((1.0 / (k + 1) - 1.0 / N) / (1.0 - 1.0 / N));
            const double a = 1.0 / N + t * (1.0 - 1.0 / N);
            const double b = (1.0 - a) / (N - 1.0);
            double dist = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                worst = std::max(worst, std::fabs(v[i] - (i == 0 ? a : b)));
                dist += (v[i] - center[i]) * (v[i] - center[i]);
            }
            const double phi_closed = k / N + ((N - k) / N) * std::sqrt((N - k - 1) / ((k + 1) * (N - 1)));
            worst = std::max(worst, std::fabs(simplex::phi(v, nu) - phi_closed));
            worst = std::max(worst, std::fabs(dist - (1.0 / (k + 1) - 1.0 / N)));
            ++checked;
        }
    }
    return {worst <= kGeometryTol, std::to_string(checked) + " (N, nu) pairs, worst deviation " + fmt("%.3e", worst)};
}

Outcome criterion_identities() {
    double worst = 0.0;
    for (std::size_t n = 2; n <= 64; ++n) {
        const simplex::GeometryContext ctx(n);
        for (std::size_t nu = 1; nu <= n; ++nu) {
            const auto b = simplex::barycenter(n, nu);
            const auto c = simplex::barycenter(n, n);
            double d = 0.0;
            for (std::size_t i = 0; i < n; ++i) d += (b[i] - c[i]) * (b[i] - c[i]);
            worst = std::max(worst, std::fabs(d - ctx.radius_sq(nu)));
        }
    }
    std::mt19937_64 rng(4);
    for (std::size_t t = 0; t < kIdentityDraws; ++t) {
        const std::size_t n = 2 + t % 63;
        const auto a = simplex::sample_dirichlet(n, 0.2 + (t % 5) * 0.4, rng);
        const auto b = simplex::sample_dirichlet(n, 1.0, rng);
        const double inv = 1.0 / static_cast<double>(n);
        double lhs = 0.0, ab = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            lhs += (a[i] - inv) * (b[i] - inv);
            ab += a[i] * b[i];
        }
        worst = std::max(worst, std::fabs(lhs - (ab - inv)));
    }
    return {worst <= kGeometryTol,
            "tangency N in [2,64] and " + std::to_string(kIdentityDraws) + " inner-product draws, worst " + fmt("%.3e", worst)};
}

Outcome criterion_conformance() {
    Failures fails;
    const std::vector<double> grid{0.5, 0.75, 1.0, 1.25, 1.5, 2.0, 0.1, 3.0, 10.0};
    std::mt19937_64 rng(5);
    std::size_t decisions = 0;
    for (std::size_t t = 0; t < 20'000; ++t) {
        const std::size_t n = 1 + t % 80;
        const auto s = random_scores(std::max<std::size_t>(n, 1), rng);
        const auto oracle = neff_oracle(s);
        for (double beta : grid) {
            const auto d = emp_decide(ScoreVector(s), beta);
            ++decisions;
            if (d.n_eff < oracle.lo || d.n_eff > oracle.hi) {
                fails.add("n_eff " + std::to_string(d.n_eff) + " outside oracle at n=" + std::to_string(n));
                continue;
            }
            const auto scaled = std::floor(beta * static_cast<double>(d.n_eff));
            const auto want = static_cast<std::size_t>(std::clamp(scaled, 1.0, static_cast<double>(n)));
            if (d.keep_count != want) fails.add("keep_count at beta=" + fmt("%g", beta));
            if (d.kept_indices != reference_top_k(s, want)) fails.add("mask at beta=" + fmt("%g", beta));
            if (d.keep_count == n && d.s_eff != 1.0) fails.add("s_eff at full retention");
        }
    }

    // Continuous scores have no ties, so kept indices map through the permutation exactly;
    // power-of-two and sign scalings leave every normalised weight bit-identical.
    const std::vector<double> exact_scales{-1.0, 2.0, -8.0, 0.125, 1024.0};
    std::normal_distribution<double> g(0.0, 1.0);
    for (std::size_t t = 0; t < kInvarianceCases; ++t) {
        const std::size_t n = 2 + t % 100;
        std::vector<double> s(n);
        for (double& x : s) x = g(rng) * std::exp(g(rng));
        const auto base = emp_decide(ScoreVector(s));

        std::vector<std::size_t> perm(n);
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        std::shuffle(perm.begin(), perm.end(), rng);
        std::vector<double> permuted(n);
        for (std::size_t i = 0; i < n; ++i) permuted[i] = s[perm[i]];
        const auto pd = emp_decide(ScoreVector(permuted));
        bool same = pd.n_eff == base.n_eff && pd.keep_count == base.keep_count;
        for (std::size_t i = 0; i < n; ++i) same = same && pd.mask[i] == base.mask[perm[i]];
        if (!same) fails.add("permutation case " + std::to_string(t));

        const double c = exact_scales[t % exact_scales.size()];
        std::vector<double> scaled(s);
        for (double& x : scaled) x *= c;
        const auto sd = emp_decide(ScoreVector(scaled));
        if (sd.mask != base.mask || sd.n_eff != base.n_eff || sd.s_eff != base.s_eff) fails.add("scale case " + std::to_string(t));
    }
    return {fails.count() == 0, std::to_string(decisions) + " decisions on the beta grid, " + std::to_string(kInvarianceCases) +
                                    " permutation and scale cases, " + std::to_string(fails.count()) + " mismatches" +
                                    fails.summary()};
}

Outcome criterion_image() {
    const auto photo = image::read_png(kData / "fixture_photo.png");
    const auto global = image::prune_image_global(photo);
    const auto patch = image::prune_image_patch(photo);
    std::size_t byte_mismatch = 0;
    for (const auto* out : {&global, &patch}) {
        for (std::size_t c = 0; c < image::kChannels; ++c) {
            for (std::size_t i = 0; i < photo.pixel_count(); ++i) {
                if (out->masks[c][i] && out->pruned.planes[c][i] != photo.planes[c][i]) ++byte_mismatch;
            }
        }
    }
    const bool order_ok = patch.ssim >= global.ssim;
    const bool sparsity_ok = global.sparsity > 0.0 && global.sparsity < 1.0 && patch.sparsity > 0.0 && patch.sparsity < 1.0;

    const auto ref = nlohmann::json::parse(io::read_file(kData / "ssim_8x8.json"));
    double worst = 0.0;
    for (const auto& c : ref.at("cases")) {
        const auto a = c.at("a").get<std::vector<std::uint8_t>>();
        const auto b = c.at("b").get<std::vector<std::uint8_t>>();
        worst = std::max(worst, std::fabs(image::ssim_plane(a, b, 8, 8) - c.at("ssim").get<double>()));
    }
    const bool ok = byte_mismatch == 0 && order_ok && sparsity_ok && worst <= kSsimRefTol;
    return {ok, "global ssim " + fmt("%.4f", global.ssim) + " sparsity " + fmt("%.3f", global.sparsity) + "; patch ssim " +
                    fmt("%.4f", patch.ssim) + " sparsity " + fmt("%.3f", patch.sparsity) + "; " +
                    std::to_string(byte_mismatch) + " retained-byte mismatches; 8x8 ssim error " + fmt("%.2e", worst)};
}

Outcome criterion_tiny_net() {
    // Same rig as `emp demo-net` with its defaults.
    const auto data = net::make_blobs(200, 2, 2, 1.0, 1.2, 7);
    const auto trained = net::train(net::DenseNet::initialize({2, 16, 2}, 7), data, net::TrainConfig{}).net;
    net::SweepConfig cfg;
    cfg.betas = {1.0};
    cfg.trace_probes = 32;
    cfg.trace_seed = 7;
    const auto row = net::beta_sweep(trained, data, cfg).rows.at(0);
    bool ok = row.epsilon <= kTinyNetEpsilonMax;

    double golden_dev = INFINITY;
    const auto golden = nlohmann::json::parse(io::read_file(kGolden / "demo_net_blobs_seed7.json"));
    for (const auto& r : golden.at("rows")) {
        if (r.at("mode") == "global" && r.at("beta") == 1.0) {
            const double want = r.at("epsilon").get<double>();
            golden_dev = std::fabs(row.epsilon - want) / std::max(1.0, std::fabs(want));
        }
    }
    ok = ok && golden_dev <= kGoldenRelTol;

    // Quadratic loss 0.5 (theta - theta*)' A (theta - theta*) with A = a I: the expansion is exact,
    // epsilon = 0.5 a ||delta||^2 and Tr(H) = a N.
    std::size_t quad_cases = 0, quad_fail = 0;
    double worst_ratio = 0.0;
    for (std::size_t n : {50u, 200u, 1000u, 5000u}) {
        for (double tail : {1.0, 1.2, 1.5}) {
            for (double a : {0.1, 1.0, 30.0}) {
                std::vector<double> theta(n);
                for (std::size_t i = 0; i < n; ++i) theta[i] = (i % 3 ? 1.0 : -1.0) / std::pow(1.0 + static_cast<double>(i), tail);
                auto loss = [&](const std::vector<double>& th) {
                    double q = 0.0;
                    for (std::size_t i = 0; i < n; ++i) q += (th[i] - theta[i]) * (th[i] - theta[i]);
                    return 0.5 * a * q;
                };
                const auto d = emp_decide(ScoreVector(theta));
                std::vector<double> pruned(theta);
                double delta_sq = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    if (d.mask[i]) continue;
                    delta_sq += theta[i] * theta[i];
                    pruned[i] = 0.0;
                }
                const double eps = std::fabs(loss(pruned) - loss(theta));
                bounds::LossBoundInputs in;
                in.rho = static_cast<double>(d.keep_count) / static_cast<double>(n);
                in.n = n;
                in.trace_h = a * static_cast<double>(n);
                in.delta_theta_sq = delta_sq;
                const double bound = bounds::epsilon_bound_lemma(in);
                ++quad_cases;
                if (!(eps <= bound)) ++quad_fail;
                worst_ratio = std::max(worst_ratio, eps / bound);
            }
        }
    }
    ok = ok && quad_fail == 0;
    return {ok, "blob net seed 7, beta 1: epsilon " + fmt("%.4f", row.epsilon) + " at sparsity " + fmt("%.3f", row.sparsity) +
                    ", golden deviation " + fmt("%.1e", golden_dev) + "; quadratic " + std::to_string(quad_cases) +
                    " cases, max epsilon/bound " + fmt("%.3f", worst_ratio)};
}

Outcome criterion_gradients() {
    net::Dataset d;
    d.input_dim = 1;
    d.num_classes = 2;
    d.features = {-1.3, -0.7, 0.4, 0.9, 1.6, -2.1};
    d.labels = {0, 0, 1, 1, 1, 0};
    d.train = {0, 1, 2, 3, 4, 5};
    auto net = net::DenseNet::initialize({1, 2, 2}, 3);
    net.layers()[0].bias = {0.3, -0.2};
    const auto analytic = net::loss_gradient(net, d, d.train);
    auto params = net.parameters();
    double worst = 0.0;
    for (std::size_t k = 0; k < params.size(); ++k) {
        const double h = 1e-6;
        auto plus = params, minus = params;
        plus[k] += h;
        minus[k] -= h;
        const double numeric = (net::loss(net::DenseNet::from_parameters(net.widths(), plus), d, d.train) -
                                net::loss(net::DenseNet::from_parameters(net.widths(), minus), d, d.train)) /
                               (2 * h);
        worst = std::max(worst, std::fabs(analytic[k] - numeric) / std::max(1e-8, std::fabs(analytic[k]) + std::fabs(numeric)));
    }
    bool ok = params.size() == 10 && worst < kGradRelTol;

    // Dense SPD A = B'B + I with a known trace.
    const std::size_t n = 16;
    std::mt19937_64 rng(8);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<double> b(n * n), a(n * n, 0.0);
    for (double& x : b) x = g(rng);
    double trace = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            for (std::size_t k = 0; k < n; ++k) a[i * n + j] += b[k * n + i] * b[k * n + j];
        }
        a[i * n + i] += 1.0;
        trace += a[i * n + i];
    }
    net::GradientFn grad = [&](std::span<const double> th) {
        std::vector<double> out(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) out[i] += a[i * n + j] * th[j];
        }
        return out;
    };
    const std::vector<double> theta(n, 0.5);
    const auto est = net::hutchinson_trace(grad, theta, 400, 8);
    const double z = std::fabs(est.mean - trace) / est.std_error;
    ok = ok && z <= kHutchinsonSigmas;
    return {ok, "10-parameter net, max relative error " + fmt("%.2e", worst) + "; Hutchinson " + fmt("%.3f", est.mean) +
                    " vs trace " + fmt("%.3f", trace) + " (" + fmt("%.2f", z) + " SE)"};
}

std::string strip_wall_time(const std::string& text) {
    static const std::regex wall(R"("wall_time_s":\s*[-+0-9.eE]+)");
    return std::regex_replace(text, wall, "\"wall_time_s\": 0");
}

Outcome criterion_determinism(const fs::path& scratch) {
    fs::create_directories(scratch);
    io::write_file_atomic(scratch / "scores.csv", "3,1,1,1\n0.5,-2,7,1e-3\n");
    io::write_file_atomic(scratch / "groups.json", "[[0, 2, 4, 6], [1, 3, 5, 7]]");
    const std::string photo = (kData / "fixture_photo.png").string();
    const std::string sc = (scratch / "scores.csv").string();
    const std::string gr = (scratch / "groups.json").string();

    struct Case {
        std::string name, args;
        std::vector<std::string> side_files;  // written by the command, compared too
    };
    const std::vector<Case> cases{
        {"prune-scores", "prune-scores --input " + sc + " --beta 1.25", {}},
        {"prune-scores-partition", "prune-scores --input " + sc + " --partition " + gr, {}},
        {"bounds", "bounds --n 1000 --sweep --format json --svg @.svg", {".svg"}},
        {"verify-geometry", "verify-geometry --n 7 --budget 20000 --seed 3", {}},
        {"prune-image-global", "prune-image --input " + photo + " --mode global --output @.png", {".png"}},
        {"prune-image-patch", "prune-image --input " + photo + " --mode patch --output @.png", {".png"}},
        {"demo-net", "demo-net --mode both --seed 7 --svg @.svg --checkpoint @", {".svg", ".bin", ".json"}},
        {"demo-net-digits", "demo-net --dataset digits --samples 20 --epochs 20 --seed 3", {}},
    };
    std::size_t mismatched = 0, failed_runs = 0;
    std::string detail;
    for (const auto& c : cases) {
        std::string outputs[2];
        for (int run = 0; run < 2; ++run) {
            // Same paths both times: reports echo them. Outputs are read back before the rerun.
            const std::string stem = (scratch / c.name).string();
            std::string args = c.args;
            for (std::size_t pos; (pos = args.find('@')) != std::string::npos;) args.replace(pos, 1, stem);
            const std::string report = stem + ".report";
            const std::string cmd = "\"" + kCli + "\" " + args + " --report " + report;
            if (std::system(cmd.c_str()) != 0) {
                ++failed_runs;
                detail += "\n    " + c.name + " exited nonzero";
                continue;
            }
            outputs[run] = strip_wall_time(io::read_file(report));
            for (const auto& ext : c.side_files) {
                outputs[run] += "\n--" + ext + "--\n" + io::read_file(stem + ext);
                fs::remove(stem + ext);
            }
            fs::remove(report);
        }
        if (outputs[0] != outputs[1]) {
            ++mismatched;
            detail += "\n    " + c.name + " differs between runs";
        }
    }
    fs::remove_all(scratch);
    return {mismatched == 0 && failed_runs == 0,
            std::to_string(cases.size()) + " invocations run twice, " + std::to_string(mismatched) + " differ" + detail};
}

}  // namespace

int main(int argc, char** argv) {
    const fs::path scratch = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / ("emp_acceptance_" + std::to_string(::getpid()));

    struct Criterion {
        int id;
        const char* title;
        double limit_s;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria{
        {1, "trivial bound s_eff >= N_eff/N", kTrivialLimitS, criterion_trivial_bound},
        {2, "tight lower bound certified and attained", kCertifyLimitS, criterion_certification},
        {3, "extremal point forms, phi and radius agree", kExtremalLimitS, criterion_extremal_point},
        {4, "tangency and inner-product identity", kIdentityLimitS, criterion_identities},
        {5, "pruning rule conformance and invariance", kConformanceLimitS, criterion_conformance},
        {6, "image pruning on the fixture photo", kImageLimitS, criterion_image},
        {7, "tiny-net loss change and quadratic bound", kNetLimitS, criterion_tiny_net},
        {8, "gradient check and Hutchinson trace", kGradLimitS, criterion_gradients},
        {9, "CLI reports are deterministic", kDeterminismLimitS, [&] { return criterion_determinism(scratch); }},
    };

    int failed = 0;
    for (const auto& c : criteria) {
        const auto start = Clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(Clock::now() - start).count();
        const bool in_time = secs <= c.limit_s;
        const bool pass = o.ok && in_time;
        failed += !pass;
        std::printf("%s %d %s [%.2fs of %.0fs] %s%s\n", pass ? "PASS" : "FAIL", c.id, c.title, secs, c.limit_s,
                    o.detail.c_str(), in_time ? "" : " (over time limit)");
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
