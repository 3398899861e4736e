#pragma once

#include "aon/model.hpp"

namespace aon {

enum class DetectionRule { kResidualRatio, kLinearCorr };

struct TestOutcome {
    double statistic = 0.0;
    double threshold = 0.0;
    bool decide_planted = false;
    DetectionRule rule = DetectionRule::kResidualRatio;
};

struct RiskReport {
    double type1 = 0.0;  ///< fraction of planted draws decided null
    double type2 = 0.0;  ///< fraction of null draws decided planted
    double sum = 0.0;
    double se = 0.0;     ///< binomial SE of the sum
    long trials_per_model = 0;
};

/// Sample-size conditions for the residual-ratio test to be in its guaranteed
/// regime; cond2's threshold is reported so callers can pick n.
struct SampleConditions {
    bool cond1 = false;       ///< log n - (2/n) log C(p,k) >= slack
    bool cond2 = false;       ///< n >= 2 log C(p,k) / (log(1+k/sigma^2) + log(1-alpha))
    bool valid_alpha = true;  ///< false when the cond2 denominator is <= 0
    double cond1_margin = 0.0;
    double cond2_threshold = 0.0;
};

/// min over k-sparse beta' of ||Y - X beta'||^2 / ||Y||^2 (reuses the MLE search).
/// Requires n >= 1; ||Y|| = 0 is rejected.
double residual_ratio_stat(const Instance& inst, const ModelParams& params,
                           std::uint64_t budget = kDefaultEnumBudget);

/// 1 / ((1 - alpha/2)(1 + k/sigma^2)), alpha in (0, 1).
double residual_threshold(const ModelParams& params, double alpha);

SampleConditions detection_sample_condition(const ModelParams& params, double alpha,
                                            double slack = 1.0);

/// <Y, X beta_bar> with beta_bar = (k/p) * ones. O(np), no enumeration.
double linear_stat(const Instance& inst, const ModelParams& params);

/// Applies one rule to one instance. ResidualRatio decides planted iff
/// statistic < threshold (equality goes to null); LinearCorr decides planted
/// iff statistic >= 0.
TestOutcome run_test(const Instance& inst, const ModelParams& params, DetectionRule rule,
                     double alpha, std::uint64_t budget = kDefaultEnumBudget);

/// Type-I/II risk over `trials` planted and `trials` null draws. Null draws use
/// params.lambda as the null-model scale.
RiskReport test_risk_mc(const ModelParams& params, DetectionRule rule, double alpha, long trials,
                        Seed seed, int threads = 1, std::uint64_t budget = kDefaultEnumBudget);

}  // namespace aon
