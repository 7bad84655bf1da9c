#pragma once

// Geometry of the ordered simplex and an independent numerical oracle for the
// infimum of the retained mass over each N_eff level set.
//
// Notation used throughout:
//   b_j      barycenter of the first j vertices: (1/j, ..., 1/j, 0, ..., 0)
//   B_nu     ball about b_n in the hyperplane sum(w) = 1 with radius r_nu = sqrt(1/nu - 1/n)
//   A_nu     sorted simplex points with N_eff == nu, i.e. B_nu minus B_{nu+1}
//   phi_nu   sum of the first nu coordinates of a sorted point

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "emp/errors.hpp"

namespace emp::simplex {

inline constexpr double kBoundaryTolerance = 1e-10;

/// A point of the ordered simplex: non-increasing, nonnegative, unit sum.
class OrderedSimplexPoint {
public:
    static OrderedSimplexPoint from_weights(std::vector<double> weights);

    std::span<const double> weights() const noexcept { return weights_; }
    std::size_t size() const noexcept { return weights_.size(); }
    double operator[](std::size_t i) const { return weights_[i]; }

private:
    explicit OrderedSimplexPoint(std::vector<double> w) : weights_(std::move(w)) {}
    std::vector<double> weights_;
};

class GeometryContext {
public:
    explicit GeometryContext(std::size_t n);

    std::size_t n() const noexcept { return n_; }
    /// r_nu for nu in [1, n].
    double radius(std::size_t nu) const;
    double radius_sq(std::size_t nu) const;
    std::span<const double> barycenter(std::size_t j) const;

private:
    std::size_t n_;
    std::vector<double> radii_sq_;
    std::vector<std::vector<double>> barycenters_;
};

std::vector<double> barycenter(std::size_t n, std::size_t j);

/// ||w - b_n||^2.
double distance_sq_to_center(std::span<const double> w);

enum class Membership { inside, boundary, outside };

const char* to_string(Membership m) noexcept;

/// Classifies w against B_nu. Throws NotOnHyperplane if sum(w) is off 1 by more than 1e-9.
Membership ball_membership(std::span<const double> w, std::size_t nu, const GeometryContext& ctx);

/// p_nu = b_n + (r_{nu+1} / r_1) (b_1 - b_n), built from the vector expression.
OrderedSimplexPoint extremal_point(std::size_t n, std::size_t nu);

/// p_nu from its closed-form coordinates (one large entry, n-1 equal small ones).
std::vector<double> extremal_point_coordinates(std::size_t n, std::size_t nu);

/// Sum of the first nu coordinates.
double phi(const OrderedSimplexPoint& w, std::size_t nu);

/// Symmetric Dirichlet(alpha) draw.
std::vector<double> sample_dirichlet(std::size_t n, double alpha, std::mt19937_64& rng);

struct OracleConfig {
    std::size_t budget = 100000;  // Dirichlet draws
    std::uint64_t seed = 0;
    std::size_t restarts = 8;     // refinement starts from this many best samples
    std::size_t rounds = 40;      // step halvings
    double initial_step = 0.05;
};

struct OracleResult {
    double min_value = 0.0;
    OrderedSimplexPoint argmin = OrderedSimplexPoint::from_weights({1.0});
    std::size_t feasible_samples = 0;
};

/// Numerical minimum of phi_nu over A_nu for small n: Dirichlet sampling followed by
/// local search in barycentric coordinates. Every evaluated point is feasible, so the
/// returned value can never undercut the true infimum (beyond rounding).
OracleResult brute_force_min_phi(std::size_t n, std::size_t nu, const OracleConfig& cfg = {});

struct VerificationRow {
    std::size_t nu = 0;
    double closed_form = 0.0;
    double brute_force_min = 0.0;
    double phi_at_extremal = 0.0;
    double extremal_inverse_sum_sq = 0.0;  // 1 / sum(p_nu^2); equals nu + 1
    std::size_t feasible_samples = 0;
    bool lower_bound_ok = false;  // brute >= closed - 1e-9
    bool tightness_ok = false;    // brute <= closed + 1e-3
    bool extremal_phi_ok = false; // |phi(p_nu) - closed| <= 1e-12
    bool closure_ok = false;      // p_nu in closure(A_nu)

    bool passed() const noexcept { return lower_bound_ok && tightness_ok && extremal_phi_ok && closure_ok; }
};

struct VerificationReport {
    std::size_t n = 0;
    std::size_t budget = 0;
    std::uint64_t seed = 0;
    std::vector<VerificationRow> rows;

    std::size_t failures() const noexcept;
};

inline constexpr std::size_t kMaxOracleDimension = 12;

VerificationReport verify_proposition(std::size_t n, std::span<const std::size_t> nus, const OracleConfig& cfg = {});

}  // namespace emp::simplex
