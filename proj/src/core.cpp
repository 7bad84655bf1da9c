#include "emp/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "emp/parallel.hpp"

namespace emp {

ScoreVector::ScoreVector(std::vector<double> values) : values_(std::move(values)) {
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i])) {
            throw NonFiniteScore("score " + std::to_string(i) + " is not finite");
        }
    }
}

bool ScoreVector::all_zero() const noexcept {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return v == 0.0; });
}

SimplexPoint SimplexPoint::from_weights(std::vector<double> weights, bool sorted_descending) {
    if (weights.empty()) throw DomainError("simplex point needs at least one coordinate");
    double sum = 0.0;
    for (double w : weights) {
        if (!std::isfinite(w) || w < 0.0) throw DomainError("simplex weights must be finite and nonnegative");
        sum += w;
    }
    const double tol = kSimplexTolerance * static_cast<double>(weights.size());
    if (std::abs(sum - 1.0) > tol) throw DomainError("simplex weights must sum to 1");
    if (sorted_descending && !std::is_sorted(weights.begin(), weights.end(), std::greater<>{})) {
        throw DomainError("weights flagged as sorted are not non-increasing");
    }
    return SimplexPoint(std::move(weights), sorted_descending);
}

SimplexPoint SimplexPoint::sorted() const {
    if (sorted_) return *this;
    std::vector<double> w = weights_;
    std::sort(w.begin(), w.end(), std::greater<>{});
    return SimplexPoint(std::move(w), true);
}

double SimplexPoint::sum_of_squares() const noexcept {
    return std::inner_product(weights_.begin(), weights_.end(), weights_.begin(), 0.0);
}

double EmpDecision::sparsity() const noexcept {
    if (mask.empty()) return 0.0;
    return 1.0 - static_cast<double>(keep_count) / static_cast<double>(mask.size());
}

Partition::Partition(std::vector<std::vector<std::size_t>> groups) : groups_(std::move(groups)) {
    for (auto& g : groups_) {
        if (g.empty()) throw InvalidPartition("partition contains an empty group");
        // Ascending order makes group-local tie-breaks agree with the global index order.
        std::sort(g.begin(), g.end());
        index_count_ += g.size();
    }
    std::vector<bool> seen(index_count_, false);
    for (const auto& g : groups_) {
        for (std::size_t i : g) {
            if (i >= index_count_) {
                throw InvalidPartition("partition does not cover [0, " + std::to_string(index_count_) +
                                       "): index " + std::to_string(i));
            }
            if (seen[i]) throw InvalidPartition("index " + std::to_string(i) + " appears in two groups");
            seen[i] = true;
        }
    }
}

Partition Partition::whole(std::size_t n) {
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), std::size_t{0});
    return Partition({std::move(all)});
}

Partition Partition::singletons(std::size_t n) {
    std::vector<std::vector<std::size_t>> groups(n);
    for (std::size_t i = 0; i < n; ++i) groups[i] = {i};
    return Partition(std::move(groups));
}

Partition Partition::contiguous(std::span<const std::size_t> sizes) {
    std::vector<std::vector<std::size_t>> groups;
    std::size_t offset = 0;
    for (std::size_t size : sizes) {
        std::vector<std::size_t> g(size);
        std::iota(g.begin(), g.end(), offset);
        offset += size;
        groups.push_back(std::move(g));
    }
    return Partition(std::move(groups));
}

double PartitionedDecision::sparsity() const noexcept {
    if (mask.empty()) return 0.0;
    return 1.0 - static_cast<double>(keep_count) / static_cast<double>(mask.size());
}

SimplexPoint normalize(const ScoreVector& s) {
    if (s.empty()) throw ZeroScoreVector();
    double total = 0.0;
    for (double v : s.values()) total += std::abs(v);
    if (total == 0.0) throw ZeroScoreVector();
    std::vector<double> w(s.size());
    std::transform(s.values().begin(), s.values().end(), w.begin(),
                   [total](double v) { return std::abs(v) / total; });
    return SimplexPoint(std::move(w), false);
}

std::size_t effective_number_from_sum_of_squares(double sum_of_squares, std::size_t n) {
    double inverse = 1.0 / sum_of_squares;
    const double nearest = std::round(inverse);
    if (nearest > inverse && nearest - inverse <= kIntegerGuard) inverse = nearest;
    const double floored = std::floor(inverse);
    if (floored < 1.0) return 1;
    if (floored >= static_cast<double>(n)) return n;
    return static_cast<std::size_t>(floored);
}

std::size_t effective_number(const SimplexPoint& w) {
    return effective_number_from_sum_of_squares(w.sum_of_squares(), w.size());
}

std::size_t scaled_keep_count(std::size_t n_eff, double beta, std::size_t n) {
    if (!(beta > 0.0) || !std::isfinite(beta)) throw NonPositiveBeta("beta must be a positive finite number");
    const double scaled = std::floor(beta * static_cast<double>(n_eff));
    if (scaled < 1.0) return 1;
    if (scaled >= static_cast<double>(n)) return n;
    return static_cast<std::size_t>(scaled);
}

std::vector<std::size_t> top_k_indices(std::span<const double> magnitudes, std::size_t k) {
    if (k > magnitudes.size()) throw IndexOutOfRange("k exceeds vector length");
    std::vector<std::size_t> order(magnitudes.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    auto ranks_before = [&](std::size_t a, std::size_t b) {
        if (magnitudes[a] != magnitudes[b]) return magnitudes[a] > magnitudes[b];
        return a < b;
    };
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(), ranks_before);
    order.resize(k);
    return order;
}

EmpDecision emp_decide(const ScoreVector& s, double beta) {
    if (!(beta > 0.0) || !std::isfinite(beta)) throw NonPositiveBeta("beta must be a positive finite number");
    const SimplexPoint w = normalize(s);
    const std::size_t n = w.size();

    EmpDecision d;
    d.beta = beta;
    d.n_eff = effective_number(w);
    d.keep_count = scaled_keep_count(d.n_eff, beta, n);

    std::vector<double> magnitudes(n);
    std::transform(s.values().begin(), s.values().end(), magnitudes.begin(), [](double v) { return std::abs(v); });
    const std::vector<std::size_t> ranked = top_k_indices(magnitudes, d.keep_count);
    d.mask.assign(n, false);
    double mass = 0.0;
    for (std::size_t i : ranked) {
        d.mask[i] = true;
        mass += w[i];
    }
    d.s_eff = d.keep_count == n ? 1.0 : mass;
    d.kept_indices = ranked;
    std::sort(d.kept_indices.begin(), d.kept_indices.end());
    return d;
}

double retained_mass(const SimplexPoint& w, std::size_t k) {
    if (k < 1 || k > w.size()) throw IndexOutOfRange("k must lie in [1, n]");
    if (k == w.size()) return 1.0;
    if (w.sorted_descending()) {
        return std::accumulate(w.weights().begin(), w.weights().begin() + static_cast<std::ptrdiff_t>(k), 0.0);
    }
    double mass = 0.0;
    for (std::size_t i : top_k_indices(w.weights(), k)) mass += w[i];
    return mass;
}

PartitionedDecision emp_decide_partitioned(const ScoreVector& s, const Partition& p, double beta,
                                           ZeroGroupPolicy policy) {
    if (!(beta > 0.0) || !std::isfinite(beta)) throw NonPositiveBeta("beta must be a positive finite number");
    if (p.index_count() != s.size()) {
        throw LengthMismatch("partition covers " + std::to_string(p.index_count()) + " indices but there are " +
                             std::to_string(s.size()) + " scores");
    }
    const auto& groups = p.groups();
    PartitionedDecision out;
    out.decisions.resize(groups.size());
    std::vector<char> zero_group(groups.size(), 0);

    parallel_for(groups.size(), [&](std::size_t g) {
        std::vector<double> local(groups[g].size());
        for (std::size_t j = 0; j < local.size(); ++j) local[j] = s[groups[g][j]];
        ScoreVector restricted(std::move(local));
        if (restricted.all_zero()) {
            zero_group[g] = 1;
            return;
        }
        out.decisions[g] = emp_decide(restricted, beta);
    });
    if (policy == ZeroGroupPolicy::reject) {
        const auto first = std::find(zero_group.begin(), zero_group.end(), 1);
        if (first != zero_group.end()) throw ZeroScoreVector(static_cast<std::size_t>(first - zero_group.begin()));
    }

    out.mask.assign(s.size(), false);
    for (std::size_t g = 0; g < groups.size(); ++g) {
        const auto& decision = out.decisions[g];
        for (std::size_t j = 0; j < groups[g].size(); ++j) {
            if (!decision || decision->mask[j]) out.mask[groups[g][j]] = true;
        }
    }
    for (std::size_t i = 0; i < out.mask.size(); ++i) {
        if (out.mask[i]) out.kept_indices.push_back(i);
    }
    out.keep_count = out.kept_indices.size();
    return out;
}

ScoreVector combine_min(const ScoreVector& a, const ScoreVector& b) {
    if (a.size() != b.size()) throw LengthMismatch("combine_min needs equal-length score vectors");
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::min(std::abs(a[i]), std::abs(b[i]));
    return ScoreVector(std::move(out));
}

}  // namespace emp
