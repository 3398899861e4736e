#pragma once

#include <cstdint>
#include <vector>

#include "aon/types.hpp"

namespace aon {

inline constexpr std::uint64_t kDefaultEnumBudget = 10'000'000;

/// log C(n, k); -inf when the coefficient is zero (k < 0 or k > n).
double log_binomial(long n, long k);

/// Exact C(n, k) in 64-bit integers; throws PreconditionError on overflow.
std::uint64_t binomial_exact(int n, int k);

/// Numerically stable log(sum(exp(x))) over a sequence added one at a time.
class LogSumExpAccumulator {
public:
    void add(double x);
    double value() const;
    bool empty() const { return count_ == 0; }

private:
    double max_ = 0.0;
    double sum_ = 0.0;
    long count_ = 0;
};

double log_sum_exp(const std::vector<double>& xs);

/// |support(a) /\ support(b)|. Throws on mismatched ambient dimension.
int overlap(const SupportVector& a, const SupportVector& b);

/// log P(S = s) for S ~ Hyp(p, k, k): two draws of k-subsets of [p].
/// Exact via log-gamma; -inf for combinatorially impossible s.
double hyp_log_pmf(int p, int k, int s);

/// C(k,s) * (k/(p-k+1))^s, an upper bound on the Hyp(p,k,k) pmf for s in [1,k].
double hyp_pmf_upper_bound(int p, int k, int s);

/// Tabulated overlap law for S ~ Hyp(p, k, k).
struct OverlapLaw {
    int p = 0;
    int k = 0;
    std::vector<double> log_pmf;  ///< length k+1, entry s = log P(S = s)
};

OverlapLaw overlap_law(int p, int k);

/// Throws BudgetExceeded when C(p, k) > budget; returns C(p, k) otherwise.
std::uint64_t check_enumeration_budget(int p, int k, std::uint64_t budget);

/// Colexicographic rank of a k-subset: sum_i C(a_i, i+1).
std::uint64_t support_rank(const SupportVector& s);

/// Inverse of support_rank for subsets of [0, p).
SupportVector support_unrank(int p, int k, std::uint64_t rank);

/// Cursor over all k-subsets of [0, p) in colexicographic order.
///
///     SupportEnumerator e(p, k, budget);
///     do { use(e.current()); } while (e.advance());
class SupportEnumerator {
public:
    SupportEnumerator(int p, int k, std::uint64_t budget = kDefaultEnumBudget);

    const std::vector<int>& current() const { return indices_; }
    SupportVector current_support() const { return SupportVector{indices_, p_}; }
    std::uint64_t cursor() const { return cursor_; }
    std::uint64_t count() const { return count_; }

    /// Advances to the colex successor; false once the last subset was visited.
    bool advance();
    void reset();

private:
    int p_, k_;
    std::uint64_t count_;
    std::uint64_t cursor_ = 0;
    std::vector<int> indices_;
};

/// Materializes all k-subsets in colex order (budget-checked). Intended for
/// desk-scale p only; hot loops should iterate a SupportEnumerator instead.
std::vector<SupportVector> enumerate_supports(int p, int k,
                                              std::uint64_t budget = kDefaultEnumBudget);

}  // namespace aon
