#include "emp/bounds.hpp"

#include <cmath>
#include <string>

namespace emp::bounds {
namespace {

void require_interior(std::size_t n, std::size_t nu) {
    if (n < 3 || nu < 2 || nu >= n) {
        throw DomainError("gap bounds need 2 <= nu < n (got n=" + std::to_string(n) + ", nu=" + std::to_string(nu) +
                          ")");
    }
}

void require_valid(std::size_t n, std::size_t nu) {
    if (n < 2 || nu < 1 || nu > n) {
        throw DomainError("bounds need n >= 2 and 1 <= nu <= n (got n=" + std::to_string(n) +
                          ", nu=" + std::to_string(nu) + ")");
    }
}

void require_rho(double rho) {
    if (!(rho > 0.0 && rho < 1.0)) throw DomainError("pruning ratio rho must lie in (0, 1)");
}

}  // namespace

double tight_lower_bound(std::size_t n, std::size_t nu) {
    require_valid(n, nu);
    if (nu == n) return 1.0;
    if (nu == 1) return 0.5;
    const double N = static_cast<double>(n);
    const double v = static_cast<double>(nu);
    return v / N + ((N - v) / N) * std::sqrt((N - v - 1.0) / ((v + 1.0) * (N - 1.0)));
}

double trivial_lower_bound(std::size_t n, std::size_t nu) {
    require_valid(n, nu);
    return static_cast<double>(nu) / static_cast<double>(n);
}

double exact_gap_bound(std::size_t n, std::size_t nu) {
    require_interior(n, nu);
    const double N = static_cast<double>(n);
    const double v = static_cast<double>(nu);
    return ((N - v) / N) * (1.0 - std::sqrt((N - v - 1.0) / ((v + 1.0) * (N - 1.0))));
}

double approx_upper_gap(std::size_t n, std::size_t nu) {
    require_interior(n, nu);
    const double N = static_cast<double>(n);
    const double v = static_cast<double>(nu);
    return ((N - v) / N) * (1.0 - std::sqrt((N - v) / (N * v)));
}

BoundReport make_bound_report(std::size_t n, std::size_t nu, std::optional<double> observed_s_eff) {
    BoundReport r;
    r.n = n;
    r.nu = nu;
    r.trivial_bound = trivial_lower_bound(n, nu);
    r.tight_bound = tight_lower_bound(n, nu);
    if (nu >= 2 && nu < n) r.approx_bound = 1.0 - approx_upper_gap(n, nu);
    if (observed_s_eff) {
        r.observed_s_eff = observed_s_eff;
        r.slack = *observed_s_eff - r.tight_bound;
    }
    return r;
}

double epsilon_bound_lemma(const LossBoundInputs& in) {
    if (!in.delta_theta_sq) throw MissingDeltaTheta("epsilon_bound_lemma needs ||theta* - theta^k||^2");
    require_rho(in.rho);
    if (in.n < 1) throw DomainError("parameter count must be positive");
    if (in.trace_h < 0.0 || *in.delta_theta_sq < 0.0) throw DomainError("Tr(H) and ||delta||^2 must be >= 0");
    const double N = static_cast<double>(in.n);
    return (1.0 - in.rho) / (2.0 * N * in.rho) * in.trace_h * *in.delta_theta_sq;
}

double epsilon_bound_asymptotic(const LossBoundInputs& in) {
    require_rho(in.rho);
    if (in.n < 2) throw DomainError("asymptotic bound needs n >= 2");
    const double N = static_cast<double>(in.n);
    const double rho = in.rho;
    const double shrink = 1.0 - std::sqrt((1.0 - rho) / (N * rho));
    return in.theta_l1 * in.theta_l1 * in.trace_h * std::pow(1.0 - rho, 4) / (2.0 * rho) * shrink * shrink;
}

}  // namespace emp::bounds
