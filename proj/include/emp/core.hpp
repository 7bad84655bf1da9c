#pragma once

// Effective-number pruning rule.
//
// A score vector s is mapped onto the probability simplex (w_i = |s_i| / sum |s_j|),
// its inverse Simpson index floor(1 / sum w_i^2) gives the effective number N_eff,
// and the floor(beta * N_eff) largest-magnitude entries are kept.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "emp/errors.hpp"

namespace emp {

/// Tolerance on sum(w) == 1 for externally supplied simplex points, per coordinate.
inline constexpr double kSimplexTolerance = 1e-12;

/// If 1 / sum(w^2) sits this close below an integer, it is rounded up before flooring.
inline constexpr double kIntegerGuard = 1e-9;

/// Raw per-entry pruning scores. Values must be finite; sign is irrelevant to decisions.
class ScoreVector {
public:
    ScoreVector() = default;
    explicit ScoreVector(std::vector<double> values);

    std::span<const double> values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }
    bool empty() const noexcept { return values_.empty(); }
    double operator[](std::size_t i) const { return values_[i]; }
    bool all_zero() const noexcept;

private:
    std::vector<double> values_;
};

/// A point on the standard simplex: nonnegative weights summing to one.
class SimplexPoint {
public:
    /// Validates nonnegativity, unit sum, and (if flagged) descending order.
    static SimplexPoint from_weights(std::vector<double> weights, bool sorted_descending = false);

    std::span<const double> weights() const noexcept { return weights_; }
    std::size_t size() const noexcept { return weights_.size(); }
    double operator[](std::size_t i) const { return weights_[i]; }
    bool sorted_descending() const noexcept { return sorted_; }

    /// Copy with coordinates in non-increasing order.
    SimplexPoint sorted() const;

    double sum_of_squares() const noexcept;

private:
    SimplexPoint(std::vector<double> weights, bool sorted) : weights_(std::move(weights)), sorted_(sorted) {}
    friend SimplexPoint normalize(const ScoreVector& s);

    std::vector<double> weights_;
    bool sorted_ = false;
};

struct EmpDecision {
    std::size_t n_eff = 0;
    double beta = 1.0;
    std::size_t keep_count = 0;
    double s_eff = 0.0;
    std::vector<bool> mask;
    std::vector<std::size_t> kept_indices;  // ascending

    std::size_t size() const noexcept { return mask.size(); }
    double sparsity() const noexcept;
};

/// Disjoint, non-empty index groups covering [0, n). Each group is stored sorted ascending.
class Partition {
public:
    explicit Partition(std::vector<std::vector<std::size_t>> groups);

    static Partition whole(std::size_t n);
    static Partition singletons(std::size_t n);
    /// Consecutive blocks of the given sizes, e.g. one block per layer.
    static Partition contiguous(std::span<const std::size_t> sizes);

    const std::vector<std::vector<std::size_t>>& groups() const noexcept { return groups_; }
    std::size_t group_count() const noexcept { return groups_.size(); }
    std::size_t index_count() const noexcept { return index_count_; }

private:
    std::vector<std::vector<std::size_t>> groups_;
    std::size_t index_count_ = 0;
};

/// What to do with a group whose scores are all zero.
enum class ZeroGroupPolicy {
    reject,    // throw ZeroScoreVector tagged with the group id
    keep_all,  // leave the group unpruned
};

struct PartitionedDecision {
    /// Per-group decisions in group order, with group-local indices.
    /// nullopt marks a zero group passed through under ZeroGroupPolicy::keep_all.
    std::vector<std::optional<EmpDecision>> decisions;
    std::vector<bool> mask;                 // global
    std::vector<std::size_t> kept_indices;  // global, ascending
    std::size_t keep_count = 0;

    double sparsity() const noexcept;
};

SimplexPoint normalize(const ScoreVector& s);

/// floor(1 / sum w^2) with the near-integer guard; always in [1, n].
std::size_t effective_number(const SimplexPoint& w);
std::size_t effective_number_from_sum_of_squares(double sum_of_squares, std::size_t n);

/// clip(floor(beta * n_eff), 1, n).
std::size_t scaled_keep_count(std::size_t n_eff, double beta, std::size_t n);

/// Indices of the k largest magnitudes; ties go to the lower index. Result is in rank order.
std::vector<std::size_t> top_k_indices(std::span<const double> magnitudes, std::size_t k);

EmpDecision emp_decide(const ScoreVector& s, double beta = 1.0);

/// Sum of the k largest weights.
double retained_mass(const SimplexPoint& w, std::size_t k);

PartitionedDecision emp_decide_partitioned(const ScoreVector& s, const Partition& p, double beta = 1.0,
                                           ZeroGroupPolicy policy = ZeroGroupPolicy::reject);

/// Elementwise min(|a_i|, |b_i|).
ScoreVector combine_min(const ScoreVector& a, const ScoreVector& b);

}  // namespace emp
