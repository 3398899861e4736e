#pragma once

#include <optional>

#include "aon/model.hpp"

namespace aon {

/// Conditioning event parameters: for every k-sparse beta' with
/// <beta', beta> >= tau, require ||X(beta + beta')||^2 <= (2 + gamma) times its
/// expectation 2n(k + s).
struct ConditioningParams {
    double gamma = 0.0;  ///< slack above the chi-square mean, >= 0
    double tau = 0.0;    ///< overlap cutoff, in [0, k]
    double eta = 1.0;    ///< 1 - tau/k

    static ConditioningParams make(double gamma, double tau, int k);
};

/// Theorem-default conditioning parameters and the alpha they derive from.
struct TheoremParams {
    double alpha = 0.0;
    ConditioningParams cond;
    /// True when alpha <= 1/2 and k <= p^(1/2 - delta); outside that regime the
    /// parameters are still returned but the guarantee does not apply.
    bool within_regime = false;
};

/// Exact and Monte Carlo divergence estimates between planted and null models.
struct DivergenceReport {
    std::optional<double> chi2_exact;  ///< present when lambda is in the valid range
    double chi2_mc = 0.0;
    double kl_mc = 0.0;
    double tv_mc = 0.0;
    double chi2_se = 0.0;
    double kl_se = 0.0;
    double tv_se = 0.0;
    long trials = 0;
    double lambda = 0.0;
};

/// Two sides of a bound plus the verdict.
struct BoundCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = false;
};

/// Exact chi^2(P || Q_lambda) as a hypergeometric sum:
///   lambda^(2n) E_S[(2 lambda^2 - 1 - (k+S)/sigma^2)^(-n/2) (1 + (k-S)/sigma^2)^(-n/2)] - 1.
/// Valid for lambda^2 > k/sigma^2 + 1/2; throws LambdaTooSmall otherwise
/// (with a 1e-9 guard band, the s = k term explodes at the boundary).
double chi2_exact(const ModelParams& params, double lambda);

/// exp(n log(1 + k/sigma^2) - log C(p,k)) - 1, the S = k contribution at
/// lambda0. Always <= chi2_exact(params, lambda0).
double chi2_blowup_lower_bound(const ModelParams& params);

/// E_S[(1 - S/(k + sigma^2))^(-n_eff) 1{s_lo <= S <= s_hi}], exact in log domain.
/// Empty range returns 0.
double truncated_moment(const ModelParams& params, double n_eff, int s_lo, int s_hi);

/// Helper constant for range-splitting the truncated moment:
/// epsilon = log log(p/k) / (2 log(p/k)). Requires p/k > e.
double epsilon_range_split(const ModelParams& params);

/// Large-overlap moment bound: with tau = k(1 - 1/log^2(1 + k/sigma^2)),
///   lhs = E_S[(1 - S/(k+sigma^2))^(-n) 1{S >= tau}],
///   rhs = exp(-alpha k log(p/k) + log((2-c)/(1-c))).
/// Preconditions (k <= c p, alpha in (0,1/2], n <= (1-alpha) n*/2) are enforced,
/// not clamped.
BoundCheck check_lemma_a3(const ModelParams& params, double alpha, double c);

/// log(dP/dQ_lambda)(X, Y) by enumerating all k-sparse supports:
///   -log C(p,k) + LSE_r(-||Y - X b_r||^2/(2 sigma^2)) + n log lambda
///   + ||Y||^2/(2 lambda^2 sigma^2).
double log_likelihood_ratio(const Instance& inst, const ModelParams& params, double lambda,
                            std::uint64_t budget = kDefaultEnumBudget);

/// Likelihood-ratio Monte Carlo:
///   chi2_mc = mean_Q[exp(2 LLR)] - 1,   kl_mc = mean_P[LLR],
///   tv_mc = (1/2) mean_Q[|exp(LLR) - 1|],
/// with 50-batch standard errors. Per-trial streams are derived from
/// (seed, trial), so results do not depend on the thread schedule.
DivergenceReport mc_divergences(const ModelParams& params, double lambda, long trials, Seed seed,
                                int threads = 1, std::uint64_t budget = kDefaultEnumBudget);

/// Pinsker chain tv <= sqrt(2 kl) <= sqrt(2 log(chi2 + 1)) on the MC estimates,
/// with `se_mult` combined standard errors of slack.
bool pinsker_chain_holds(const DivergenceReport& report, double se_mult = 3.0);

/// Membership test for the conditioning event. Enumerates every beta' with
/// overlap >= tau directly (subsets of the support times subsets of its
/// complement).
bool event_holds(const MatrixRM& X, const SupportVector& beta, const ModelParams& params,
                 const ConditioningParams& cond, std::uint64_t budget = kDefaultEnumBudget);

/// Union-bound guarantee P(event fails) <= exp(-n gamma/4 + eta k log(e^2 p/(eta^2 k))).
/// At eta = 0 the combinatorial sum has a single term and the bound is exp(-n gamma/4).
double conditioning_prob_bound(const ModelParams& params, const ConditioningParams& cond);

/// Monte Carlo frequency (and binomial SE) of the conditioning event failing
/// on planted draws; the quantity conditioning_prob_bound dominates.
struct McFrequency {
    double freq = 0.0;
    double se = 0.0;
    long trials = 0;
};

McFrequency event_complement_mc(const ModelParams& params, const ConditioningParams& cond,
                                long trials, Seed seed, int threads = 1,
                                std::uint64_t budget = kDefaultEnumBudget);

/// (epsilon n / 2) log(1 + k/sigma^2) + sqrt(epsilon) (2 + n): bound on
/// epsilon * D(P_{E^c} || Q) at lambda = lambda0.
double kl_tail_bound(const ModelParams& params, double epsilon);

/// alpha = max(8/log(1+k/sigma^2), 32 log log(p/k) / log(p/k)),
/// gamma = alpha k log(p/k)/n, tau = k(1 - 1/log^2(1+k/sigma^2)).
/// Requires n >= 1 and p/k > e.
TheoremParams make_theorem_params(const ModelParams& params, double delta);

}  // namespace aon
