#pragma once

// Closed-form guarantees for the effective-number rule: the lower bound on retained
// mass as a function of (n, N_eff), and the loss-change bounds for magnitude pruning.

#include <cstddef>
#include <optional>

#include "emp/errors.hpp"

namespace emp::bounds {

/// Lower bound on retained mass given N = n and N_eff = nu.
///
/// For 2 <= nu <= n-1 this is nu/n + ((n-nu)/n) * sqrt((n-nu-1) / ((nu+1)(n-1))).
/// nu == n gives 1 and nu == 1 gives 1/2. Throws DomainError outside 1 <= nu <= n, n >= 2.
double tight_lower_bound(std::size_t n, std::size_t nu);

/// nu / n, valid for every nonzero score vector.
double trivial_lower_bound(std::size_t n, std::size_t nu);

/// Upper bound on 1 - s_eff; equals 1 - tight_lower_bound. Requires 2 <= nu < n.
double exact_gap_bound(std::size_t n, std::size_t nu);

/// Large-n approximation ((n-nu)/n) * (1 - sqrt((n-nu)/(n*nu))) of exact_gap_bound.
double approx_upper_gap(std::size_t n, std::size_t nu);

struct BoundReport {
    std::size_t n = 0;
    std::size_t nu = 0;
    double trivial_bound = 0.0;
    double tight_bound = 0.0;
    std::optional<double> approx_bound;  // 1 - approx_upper_gap, defined for 2 <= nu < n
    std::optional<double> observed_s_eff;
    std::optional<double> slack;  // observed - tight
};

BoundReport make_bound_report(std::size_t n, std::size_t nu, std::optional<double> observed_s_eff = std::nullopt);

struct LossBoundInputs {
    double rho = 0.5;       // kept fraction k / N, in (0, 1)
    std::size_t n = 0;      // parameter count
    double theta_l1 = 0.0;  // ||theta*||_1
    double trace_h = 0.0;   // Tr(H) at theta*
    std::optional<double> delta_theta_sq;  // ||theta* - theta^k||_2^2
};

/// ((1 - rho) / (2 n rho)) * Tr(H) * ||theta* - theta^k||^2.
double epsilon_bound_lemma(const LossBoundInputs& in);

/// ||theta*||_1^2 * Tr(H) * ((1 - rho)^4 / (2 rho)) * (1 - sqrt((1 - rho) / (n rho)))^2.
double epsilon_bound_asymptotic(const LossBoundInputs& in);

}  // namespace emp::bounds
