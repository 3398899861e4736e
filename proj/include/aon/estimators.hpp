#pragma once

#include "aon/model.hpp"

namespace aon {

/// Posterior over supports under the uniform prior and known sigma^2.
/// log_weights is aligned with colexicographic ranks and normalized so
/// logsumexp(log_weights) = 0.
struct PosteriorTable {
    std::vector<double> log_weights;
    ModelParams params;
};

/// MLE and Bayes answers for one planted instance.
struct RecoveryResult {
    SupportVector mle_support;
    VectorXd bayes_mean;
    double mle_sq_err = 0.0;    ///< |support(mle) symdiff support(truth)|, an even integer
    double bayes_sq_err = 0.0;  ///< ||truth - posterior mean||^2, in [0, 2k]
};

struct MmseEstimate {
    double mmse = 0.0;
    double se = 0.0;
    double ratio = 0.0;     ///< mmse / MSE0, the rescaled quantity
    double ratio_se = 0.0;
    long trials = 0;
};

/// Failure threshold 2d with d = ceil(k / log(p/k)) and the tail bound
/// e^2 / (log^2(p/k) (1 - 1/e)); the bound may be vacuous (>= 1) and is
/// reported as-is.
struct MleTailBound {
    int d = 0;
    double threshold = 0.0;
    double bound = 0.0;
    /// Whether n >= (1 + log 2/log(1 + k/(2 sigma^2))) (1 + 4 loglog(p/k)/log(p/k)) n*.
    bool sample_condition_met = false;
};

/// Exhaustive least-squares over all k-subsets; ties broken toward the
/// smallest colexicographic rank.
SupportVector mle(const Instance& inst, const ModelParams& params,
                  std::uint64_t budget = kDefaultEnumBudget);

PosteriorTable posterior(const Instance& inst, const ModelParams& params,
                         std::uint64_t budget = kDefaultEnumBudget);

/// Coordinate j of E[beta | X, Y]: sum of weights of supports containing j.
VectorXd bayes_mean(const PosteriorTable& table);

/// Runs both estimators against the instance's ground truth.
RecoveryResult recover(const Instance& inst, const ModelParams& params,
                       std::uint64_t budget = kDefaultEnumBudget);

/// Monte Carlo MMSE over planted draws: mean ||beta - E[beta | X, Y]||^2.
MmseEstimate mmse_mc(const ModelParams& params, long trials, Seed seed, int threads = 1,
                     std::uint64_t budget = kDefaultEnumBudget);

/// exp(-2 kl/(n - m)) (sigma^2 + k) - sigma^2: MSE lower bound for estimators
/// that see only the first m of n observations, from the KL divergence between
/// planted and null models.
double mse_lower_bound(double kl, int n, int m, double k, double sigma2);

/// (1 + ell/(2 sigma^2))^(-n/2): bound on P(||W + X(beta - beta')||^2 <= ||W||^2)
/// when ||beta - beta'||^2 = 2 ell.
double pairwise_error_bound(int ell, double sigma2, int n);

struct PairwiseErrorMc {
    double freq = 0.0;
    double se = 0.0;
    long trials = 0;
};

/// Direct simulation of the pairwise event for two supports at symmetric
/// difference 2 ell: draws the 2 ell distinct columns and the noise, checks
/// ||W + X(beta - beta')||^2 <= ||W||^2.
PairwiseErrorMc pairwise_error_mc(int ell, double sigma2, int n, long trials, Seed seed,
                                  int threads = 1);

MleTailBound mle_tail_bound(const ModelParams& params);

}  // namespace aon
