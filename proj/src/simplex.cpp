#include "emp/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "emp/bounds.hpp"
#include "emp/core.hpp"
#include "emp/parallel.hpp"
#include "emp/seed.hpp"

namespace emp::simplex {
namespace {

double sum_of_squares(std::span<const double> w) {
    return std::inner_product(w.begin(), w.end(), w.begin(), 0.0);
}

double top_sum(std::span<const double> sorted_w, std::size_t nu) {
    return std::accumulate(sorted_w.begin(), sorted_w.begin() + static_cast<std::ptrdiff_t>(nu), 0.0);
}

void require_interior(std::size_t n, std::size_t nu) {
    if (n < 3 || nu < 2 || nu + 1 > n) {
        throw DomainError("need 2 <= nu <= n-1 (got n=" + std::to_string(n) + ", nu=" + std::to_string(nu) + ")");
    }
}

// A sorted point lies in A_nu exactly when emp-core assigns it N_eff == nu.
bool in_level_set(std::span<const double> w, std::size_t nu) {
    return effective_number_from_sum_of_squares(sum_of_squares(w), w.size()) == nu;
}

struct Candidate {
    double value;
    std::vector<double> w;
};

// Local search in barycentric coordinates of the ordered simplex: w = sum_j lambda_j b_j
// with lambda on the standard simplex. Ordering constraints on w become lambda >= 0,
// phi_nu is linear in lambda (phi_nu(b_j) = min(nu, j) / j) and
// ||w||^2 = lambda' G lambda with G_ij = 1 / max(i, j).
//
// Two move families, applied greedily with a halving step:
//   * transfers lambda_s -> lambda_t that lower phi (or keep it and move outward);
//   * phi-neutral splits lambda_j -> (lambda_i, lambda_k) that raise ||w||^2, which
//     opens room in the shell for further phi-lowering transfers.
// Every accepted iterate is checked against the N_eff level set by emp-core itself.
class BarycentricSearch {
public:
    BarycentricSearch(std::span<const double> sorted_w, std::size_t nu) : n_(sorted_w.size()), nu_(nu) {
        lambda_.resize(n_);
        coef_.resize(n_);
        for (std::size_t j = 0; j < n_; ++j) {
            const double next = j + 1 < n_ ? sorted_w[j + 1] : 0.0;
            lambda_[j] = std::max(0.0, static_cast<double>(j + 1) * (sorted_w[j] - next));
            coef_[j] = static_cast<double>(std::min(nu_, j + 1)) / static_cast<double>(j + 1);
        }
        const double total = std::accumulate(lambda_.begin(), lambda_.end(), 0.0);
        for (double& l : lambda_) l /= total;
        recompute();
    }

    void run(const OracleConfig& cfg) {
        double step = cfg.initial_step;
        constexpr std::size_t kMaxSweepsPerRound = 5000;
        for (std::size_t round = 0; round < cfg.rounds; ++round) {
            for (std::size_t sweep = 0; sweep < kMaxSweepsPerRound; ++sweep) {
                if (!sweep_once(step)) break;
            }
            step *= 0.5;
        }
    }

    std::vector<double> point() const { return to_point(lambda_); }

private:
    double gram(std::size_t i, std::size_t j) const { return 1.0 / static_cast<double>(std::max(i, j) + 1); }

    std::vector<double> to_point(const std::vector<double>& lambda) const {
        std::vector<double> w(n_);
        double acc = 0.0;
        for (std::size_t k = n_; k-- > 0;) {
            acc += lambda[k] / static_cast<double>(k + 1);
            w[k] = acc;
        }
        return w;
    }

    void recompute() {
        g_.assign(n_, 0.0);
        for (std::size_t i = 0; i < n_; ++i) {
            for (std::size_t j = 0; j < n_; ++j) g_[i] += gram(i, j) * lambda_[j];
        }
    }

    // Applies the sparse direction if it keeps the point in A_nu and improves
    // (phi, -||w||^2) lexicographically.
    bool try_move(std::initializer_list<std::pair<std::size_t, double>> delta) {
        double d_phi = 0.0;
        double d_ss = 0.0;
        for (auto [i, di] : delta) {
            d_phi += coef_[i] * di;
            d_ss += 2.0 * g_[i] * di;
            for (auto [j, dj] : delta) d_ss += gram(i, j) * di * dj;
        }
        const bool lower = d_phi < -1e-16;
        const bool outward = d_phi <= 1e-16 && d_ss > 1e-16;
        if (!lower && !outward) return false;

        std::vector<double> trial = lambda_;
        for (auto [i, di] : delta) trial[i] = std::max(0.0, trial[i] + di);
        const std::vector<double> w = to_point(trial);
        if (!in_level_set(w, nu_)) return false;
        lambda_.swap(trial);
        recompute();
        return true;
    }

    bool sweep_once(double step) {
        bool moved = false;
        for (std::size_t s = 0; s < n_; ++s) {
            for (std::size_t t = 0; t < n_; ++t) {
                if (s == t || lambda_[s] <= 0.0) continue;
                const double m = std::min(step, lambda_[s]);
                moved |= try_move({{s, -m}, {t, m}});
            }
        }
        for (std::size_t j = 0; j < n_; ++j) {
            for (std::size_t i = 0; i < n_; ++i) {
                for (std::size_t k = 0; k < n_; ++k) {
                    if (lambda_[j] <= 0.0 || !(coef_[i] > coef_[j] && coef_[j] > coef_[k])) continue;
                    const double m = std::min(step, lambda_[j]);
                    const double span = coef_[i] - coef_[k];
                    const double a = m * (coef_[j] - coef_[k]) / span;
                    const double b = m * (coef_[i] - coef_[j]) / span;
                    moved |= try_move({{j, -m}, {i, a}, {k, b}});
                }
            }
        }
        return moved;
    }

    std::size_t n_;
    std::size_t nu_;
    std::vector<double> lambda_;
    std::vector<double> coef_;
    std::vector<double> g_;  // G * lambda
};

Candidate refine(const std::vector<double>& w, std::size_t nu, const OracleConfig& cfg) {
    BarycentricSearch search(w, nu);
    search.run(cfg);
    std::vector<double> best = search.point();
    if (!in_level_set(best, nu)) return {top_sum(w, nu), w};
    const double value = top_sum(best, nu);
    return {value, std::move(best)};
}

}  // namespace

OrderedSimplexPoint OrderedSimplexPoint::from_weights(std::vector<double> weights) {
    const SimplexPoint checked = SimplexPoint::from_weights(std::move(weights), true);
    return OrderedSimplexPoint(std::vector<double>(checked.weights().begin(), checked.weights().end()));
}

GeometryContext::GeometryContext(std::size_t n) : n_(n) {
    if (n < 2) throw DomainError("geometry context needs n >= 2");
    radii_sq_.resize(n);
    barycenters_.resize(n);
    for (std::size_t nu = 1; nu <= n; ++nu) {
        radii_sq_[nu - 1] = 1.0 / static_cast<double>(nu) - 1.0 / static_cast<double>(n);
        barycenters_[nu - 1] = simplex::barycenter(n, nu);
    }
    radii_sq_[n - 1] = 0.0;
}

double GeometryContext::radius_sq(std::size_t nu) const {
    if (nu < 1 || nu > n_) throw DomainError("radius index out of range");
    return radii_sq_[nu - 1];
}

double GeometryContext::radius(std::size_t nu) const { return std::sqrt(radius_sq(nu)); }

std::span<const double> GeometryContext::barycenter(std::size_t j) const {
    if (j < 1 || j > n_) throw DomainError("barycenter index out of range");
    return barycenters_[j - 1];
}

std::vector<double> barycenter(std::size_t n, std::size_t j) {
    if (j < 1 || j > n) throw DomainError("barycenter needs 1 <= j <= n");
    std::vector<double> b(n, 0.0);
    std::fill(b.begin(), b.begin() + static_cast<std::ptrdiff_t>(j), 1.0 / static_cast<double>(j));
    return b;
}

double distance_sq_to_center(std::span<const double> w) {
    const double c = 1.0 / static_cast<double>(w.size());
    double d = 0.0;
    for (double x : w) d += (x - c) * (x - c);
    return d;
}

const char* to_string(Membership m) noexcept {
    switch (m) {
        case Membership::inside: return "inside";
        case Membership::boundary: return "boundary";
        case Membership::outside: return "outside";
    }
    return "unknown";
}

Membership ball_membership(std::span<const double> w, std::size_t nu, const GeometryContext& ctx) {
    if (w.size() != ctx.n()) throw DimensionMismatch("point dimension differs from geometry context");
    const double sum = std::accumulate(w.begin(), w.end(), 0.0);
    if (std::abs(sum - 1.0) > 1e-9) throw NotOnHyperplane("coordinates must sum to 1");
    const double d = distance_sq_to_center(w);
    const double r2 = ctx.radius_sq(nu);
    if (std::abs(d - r2) <= kBoundaryTolerance) return Membership::boundary;
    return d < r2 ? Membership::inside : Membership::outside;
}

OrderedSimplexPoint extremal_point(std::size_t n, std::size_t nu) {
    require_interior(n, nu);
    const GeometryContext ctx(n);
    const double scale = ctx.radius(nu + 1) / ctx.radius(1);
    const auto center = ctx.barycenter(n);
    const auto vertex = ctx.barycenter(1);
    std::vector<double> p(n);
    for (std::size_t i = 0; i < n; ++i) p[i] = center[i] + scale * (vertex[i] - center[i]);
    return OrderedSimplexPoint::from_weights(std::move(p));
}

std::vector<double> extremal_point_coordinates(std::size_t n, std::size_t nu) {
    require_interior(n, nu);
    const double N = static_cast<double>(n);
    const double v = static_cast<double>(nu);
    std::vector<double> p(n, (1.0 / N) * (1.0 - std::sqrt((N - v - 1.0) / ((N - 1.0) * (v + 1.0)))));
    p[0] = 1.0 / N + (1.0 / N) * std::sqrt((N - 1.0) * (N - v - 1.0) / (v + 1.0));
    return p;
}

double phi(const OrderedSimplexPoint& w, std::size_t nu) {
    if (nu < 1 || nu > w.size()) throw DomainError("phi needs 1 <= nu <= n");
    return top_sum(w.weights(), nu);
}

std::vector<double> sample_dirichlet(std::size_t n, double alpha, std::mt19937_64& rng) {
    std::vector<double> w(n);
    double total = 0.0;
    do {
        total = 0.0;
        if (alpha == 1.0) {
            std::exponential_distribution<double> draw(1.0);
            for (double& x : w) total += (x = draw(rng));
        } else {
            std::gamma_distribution<double> draw(alpha, 1.0);
            for (double& x : w) total += (x = draw(rng));
        }
    } while (total <= 0.0);
    for (double& x : w) x /= total;
    return w;
}

OracleResult brute_force_min_phi(std::size_t n, std::size_t nu, const OracleConfig& cfg) {
    require_interior(n, nu);
    if (n > kMaxOracleDimension) throw DomainError("brute-force oracle is limited to n <= 12");
    if (cfg.budget == 0) throw DomainError("oracle budget must be positive");

    const GeometryContext ctx(n);
    const double inner_sq = ctx.radius_sq(nu + 1);
    const double outer_sq = ctx.radius_sq(nu);
    const double c = 1.0 / static_cast<double>(n);

    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> shell(inner_sq, outer_sq);

    std::vector<Candidate> best;  // ascending by value, at most cfg.restarts entries
    const std::size_t keep = std::max<std::size_t>(1, cfg.restarts);
    std::size_t feasible = 0;
    auto consider = [&](std::vector<double>& w) {
        std::sort(w.begin(), w.end(), std::greater<>{});
        if (!in_level_set(w, nu)) return;
        ++feasible;
        const double value = top_sum(w, nu);
        if (best.size() == keep && value >= best.back().value) return;
        auto pos = std::upper_bound(best.begin(), best.end(), value,
                                    [](double v, const Candidate& cand) { return v < cand.value; });
        best.insert(pos, Candidate{value, w});
        if (best.size() > keep) best.pop_back();
    };

    for (std::size_t draw = 0; draw < cfg.budget; ++draw) {
        std::vector<double> d = sample_dirichlet(n, 1.0, rng);
        const double dist_sq = distance_sq_to_center(d);
        // Radial copy of the draw placed in the shell; it keeps the Dirichlet direction
        // and makes every level set reachable even where raw draws almost never land.
        std::vector<double> projected;
        if (dist_sq > 0.0) {
            const double t = std::sqrt(shell(rng) / dist_sq);
            projected.resize(n);
            bool nonnegative = true;
            for (std::size_t i = 0; i < n; ++i) {
                projected[i] = c + t * (d[i] - c);
                if (projected[i] < 0.0) nonnegative = false;
            }
            if (nonnegative) {
                const double sum = std::accumulate(projected.begin(), projected.end(), 0.0);
                for (double& x : projected) x /= sum;
                consider(projected);
            }
        }
        consider(d);
    }
    if (best.empty()) {
        throw InfeasibleRegion("no sample landed in A_" + std::to_string(nu) + " for n=" + std::to_string(n));
    }

    Candidate overall = best.front();
    for (const Candidate& start : best) {
        Candidate refined = refine(start.w, nu, cfg);
        if (refined.value < overall.value) overall = std::move(refined);
    }
    OracleResult result;
    result.min_value = overall.value;
    result.argmin = OrderedSimplexPoint::from_weights(std::move(overall.w));
    result.feasible_samples = feasible;
    return result;
}

std::size_t VerificationReport::failures() const noexcept {
    return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [](const auto& r) { return !r.passed(); }));
}

VerificationReport verify_proposition(std::size_t n, std::span<const std::size_t> nus, const OracleConfig& cfg) {
    if (n > kMaxOracleDimension) throw DomainError("verification is limited to n <= 12");
    VerificationReport report;
    report.n = n;
    report.budget = cfg.budget;
    report.seed = cfg.seed;
    report.rows.resize(nus.size());

    parallel_for(nus.size(), [&](std::size_t k) {
        const std::size_t nu = nus[k];
        OracleConfig local = cfg;
        local.seed = derive_seed(cfg.seed, {n, nu});

        VerificationRow row;
        row.nu = nu;
        row.closed_form = bounds::tight_lower_bound(n, nu);
        const OracleResult oracle = brute_force_min_phi(n, nu, local);
        row.brute_force_min = oracle.min_value;
        row.feasible_samples = oracle.feasible_samples;

        const OrderedSimplexPoint p = extremal_point(n, nu);
        row.phi_at_extremal = phi(p, nu);
        const double ss = sum_of_squares(p.weights());
        row.extremal_inverse_sum_sq = 1.0 / ss;

        row.lower_bound_ok = row.brute_force_min >= row.closed_form - 1e-9;
        row.tightness_ok = row.brute_force_min <= row.closed_form + 1e-3;
        row.extremal_phi_ok = std::abs(row.phi_at_extremal - row.closed_form) <= 1e-12;
        const double v = static_cast<double>(nu);
        row.closure_ok = row.extremal_inverse_sum_sq >= v - 1e-9 && row.extremal_inverse_sum_sq <= v + 1.0 + 1e-9;
        report.rows[k] = row;
    });
    return report;
}

}  // namespace emp::simplex
