#include "aon/combinatorics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace aon {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

double log_binomial(long n, long k) {
    if (k < 0 || k > n) return kNegInf;
    if (k == 0 || k == n) return 0.0;
    return std::lgamma(static_cast<double>(n) + 1.0) -
           std::lgamma(static_cast<double>(k) + 1.0) -
           std::lgamma(static_cast<double>(n - k) + 1.0);
}

std::uint64_t binomial_exact(int n, int k) {
    if (k < 0 || k > n) return 0;
    if (k > n - k) k = n - k;
    unsigned __int128 r = 1;
    for (int i = 1; i <= k; ++i) {
        r = r * static_cast<unsigned>(n - k + i) / static_cast<unsigned>(i);
        if (r > std::numeric_limits<std::uint64_t>::max()) {
            throw PreconditionError("binomial_exact: C(" + std::to_string(n) + "," +
                                    std::to_string(k) + ") overflows 64 bits");
        }
    }
    return static_cast<std::uint64_t>(r);
}

void LogSumExpAccumulator::add(double x) {
    ++count_;
    if (x == kNegInf) return;
    if (sum_ == 0.0) {
        max_ = x;
        sum_ = 1.0;
        return;
    }
    if (x <= max_) {
        sum_ += std::exp(x - max_);
    } else {
        sum_ = sum_ * std::exp(max_ - x) + 1.0;
        max_ = x;
    }
}

double LogSumExpAccumulator::value() const {
    if (sum_ == 0.0) return kNegInf;
    return max_ + std::log(sum_);
}

double log_sum_exp(const std::vector<double>& xs) {
    LogSumExpAccumulator acc;
    for (double x : xs) acc.add(x);
    return acc.value();
}

int overlap(const SupportVector& a, const SupportVector& b) {
    if (a.p != b.p) throw PreconditionError("overlap: ambient dimensions differ");
    int count = 0;
    auto ia = a.indices.begin();
    auto ib = b.indices.begin();
    while (ia != a.indices.end() && ib != b.indices.end()) {
        if (*ia == *ib) {
            ++count;
            ++ia;
            ++ib;
        } else if (*ia < *ib) {
            ++ia;
        } else {
            ++ib;
        }
    }
    return count;
}

double hyp_log_pmf(int p, int k, int s) {
    if (k < 0 || k > p) throw PreconditionError("hyp_log_pmf: need 0 <= k <= p");
    if (s < 0 || s > k) throw PreconditionError("hyp_log_pmf: need 0 <= s <= k");
    return log_binomial(k, s) + log_binomial(p - k, k - s) - log_binomial(p, k);
}

double hyp_pmf_upper_bound(int p, int k, int s) {
    if (k < 1 || k > p) throw PreconditionError("hyp_pmf_upper_bound: need 1 <= k <= p");
    if (s < 1 || s > k) throw PreconditionError("hyp_pmf_upper_bound: stated for s in [1, k]");
    const double ratio = static_cast<double>(k) / (p - k + 1);
    return std::exp(log_binomial(k, s) + s * std::log(ratio));
}

OverlapLaw overlap_law(int p, int k) {
    OverlapLaw law;
    law.p = p;
    law.k = k;
    law.log_pmf.resize(k + 1);
    for (int s = 0; s <= k; ++s) law.log_pmf[s] = hyp_log_pmf(p, k, s);
    return law;
}

std::uint64_t check_enumeration_budget(int p, int k, std::uint64_t budget) {
    if (k < 0 || k > p) throw PreconditionError("check_enumeration_budget: need 0 <= k <= p");
    // Cheap log-domain screen first so huge C(p, k) never reaches exact arithmetic.
    if (log_binomial(p, k) > std::log(static_cast<double>(budget)) + 1.0) {
        throw BudgetExceeded("enumeration of C(" + std::to_string(p) + "," + std::to_string(k) +
                             ") supports exceeds budget " + std::to_string(budget) +
                             "; lower p or k, or raise --budget");
    }
    const std::uint64_t count = binomial_exact(p, k);
    if (count > budget) {
        throw BudgetExceeded("enumeration of C(" + std::to_string(p) + "," + std::to_string(k) +
                             ") = " + std::to_string(count) + " supports exceeds budget " +
                             std::to_string(budget) + "; lower p or k, or raise --budget");
    }
    return count;
}

std::uint64_t support_rank(const SupportVector& s) {
    s.validate();
    std::uint64_t rank = 0;
    for (int i = 0; i < s.k(); ++i) rank += binomial_exact(s.indices[i], i + 1);
    return rank;
}

SupportVector support_unrank(int p, int k, std::uint64_t rank) {
    SupportVector out;
    out.p = p;
    out.indices.resize(k);
    for (int i = k - 1; i >= 0; --i) {
        int c = (i + 1 < k) ? out.indices[i + 1] - 1 : p - 1;
        while (c >= i && binomial_exact(c, i + 1) > rank) --c;
        if (c < i) throw PreconditionError("support_unrank: rank out of range");
        out.indices[i] = c;
        rank -= binomial_exact(c, i + 1);
    }
    if (rank != 0) throw PreconditionError("support_unrank: rank out of range");
    return out;
}

SupportEnumerator::SupportEnumerator(int p, int k, std::uint64_t budget) : p_(p), k_(k) {
    if (k < 0 || k > p) throw PreconditionError("SupportEnumerator: need 0 <= k <= p");
    count_ = check_enumeration_budget(p, k, budget);
    indices_.resize(k);
    reset();
}

void SupportEnumerator::reset() {
    for (int i = 0; i < k_; ++i) indices_[i] = i;
    cursor_ = 0;
}

bool SupportEnumerator::advance() {
    for (int i = 0; i < k_; ++i) {
        const int limit = (i + 1 < k_) ? indices_[i + 1] : p_;
        if (indices_[i] + 1 < limit) {
            ++indices_[i];
            for (int j = 0; j < i; ++j) indices_[j] = j;
            ++cursor_;
            return true;
        }
    }
    return false;
}

std::vector<SupportVector> enumerate_supports(int p, int k, std::uint64_t budget) {
    SupportEnumerator e(p, k, budget);
    std::vector<SupportVector> out;
    out.reserve(e.count());
    do {
        out.push_back(e.current_support());
    } while (e.advance());
    return out;
}

}  // namespace aon
