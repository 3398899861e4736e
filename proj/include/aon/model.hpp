#pragma once

#include "aon/combinatorics.hpp"
#include "aon/rng.hpp"
#include "aon/types.hpp"

namespace aon {

struct ConditioningParams;  // divergence.hpp

/// Sub-stream tags so every sampler/estimator derives disjoint streams from
/// one user seed.
namespace stream_tag {
inline constexpr std::uint64_t kCondAttempt = 1;
inline constexpr std::uint64_t kDivNull = 2;
inline constexpr std::uint64_t kDivPlanted = 3;
inline constexpr std::uint64_t kMmse = 4;
inline constexpr std::uint64_t kRiskPlanted = 5;
inline constexpr std::uint64_t kRiskNull = 6;
inline constexpr std::uint64_t kPairwise = 7;
inline constexpr std::uint64_t kEventMc = 8;
inline constexpr std::uint64_t kSweep = 9;
}  // namespace stream_tag

/// n* = 2 k log(p/k) / log(1 + k/sigma^2). Requires k < p.
double critical_sample_size(const ModelParams& params);

/// Uniform k-subset of [0, p) by partial Fisher-Yates; O(k) extra memory
/// beyond the index pool, exactly uniform.
SupportVector sample_support(int p, int k, Rng& rng);

/// Y = X beta + W with X_ij ~ N(0,1), W ~ N(0, sigma^2 I), beta uniform k-sparse.
Instance sample_planted(const ModelParams& params, Seed seed);

/// Independent X, and Y = lambda W. No planted signal.
Instance sample_null(const ModelParams& params, Seed seed);

/// Rejection-samples planted instances until (X, beta) lands in the
/// conditioning event. Throws RejectionBudgetExhausted after max_rejects
/// failed attempts.
Instance sample_conditioned_planted(const ModelParams& params, const ConditioningParams& cond,
                                    Seed seed, int max_rejects,
                                    std::uint64_t budget = kDefaultEnumBudget);

}  // namespace aon
