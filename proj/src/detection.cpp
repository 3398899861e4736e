#include "aon/detection.hpp"

#include <cmath>
#include <limits>

#include "aon/estimators.hpp"
#include "aon/parallel.hpp"

namespace aon {

double residual_ratio_stat(const Instance& inst, const ModelParams& params, std::uint64_t budget) {
    params.validate();
    if (inst.Y.size() == 0) {
        throw PreconditionError("residual_ratio_stat: needs n >= 1");
    }
    const double norm = inst.Y.squaredNorm();
    if (!(norm > 0.0)) {
        throw PreconditionError("residual_ratio_stat: ||Y|| = 0 (ZeroObservation)");
    }
    // Same exhaustive search as the MLE; the minimizing support is the MLE.
    const SupportVector best = mle(inst, params, budget);
    VectorXd fit = VectorXd::Zero(inst.Y.size());
    for (int j : best.indices) fit += inst.X.col(j);
    return (inst.Y - fit).squaredNorm() / norm;
}

double residual_threshold(const ModelParams& params, double alpha) {
    params.validate();
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw PreconditionError("residual_threshold: alpha must be in (0, 1)");
    }
    return 1.0 / ((1.0 - alpha / 2.0) * (1.0 + params.snr()));
}

SampleConditions detection_sample_condition(const ModelParams& params, double alpha,
                                            double slack) {
    params.validate();
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw PreconditionError("detection_sample_condition: alpha must be in (0, 1)");
    }
    const double log_m = log_binomial(params.p, params.k);
    SampleConditions out;
    if (params.n >= 1) {
        out.cond1_margin = std::log(static_cast<double>(params.n)) - 2.0 * log_m / params.n;
        out.cond1 = out.cond1_margin >= slack;
    } else {
        out.cond1_margin = -std::numeric_limits<double>::infinity();
        out.cond1 = false;
    }
    const double denom = std::log1p(params.snr()) + std::log1p(-alpha);
    if (!(denom > 0.0)) {
        out.valid_alpha = false;
        out.cond2 = false;
        out.cond2_threshold = std::numeric_limits<double>::infinity();
        return out;
    }
    out.cond2_threshold = 2.0 * log_m / denom;
    out.cond2 = params.n >= out.cond2_threshold;
    return out;
}

double linear_stat(const Instance& inst, const ModelParams& params) {
    params.validate();
    if (inst.X.cols() != params.p || inst.X.rows() != inst.Y.size()) {
        throw PreconditionError("linear_stat: instance dimensions do not match params");
    }
    if (inst.Y.size() == 0) return 0.0;
    const double frac = static_cast<double>(params.k) / params.p;
    return frac * inst.Y.dot(inst.X.rowwise().sum());
}

TestOutcome run_test(const Instance& inst, const ModelParams& params, DetectionRule rule,
                     double alpha, std::uint64_t budget) {
    TestOutcome out;
    out.rule = rule;
    if (rule == DetectionRule::kResidualRatio) {
        out.statistic = residual_ratio_stat(inst, params, budget);
        out.threshold = residual_threshold(params, alpha);
        out.decide_planted = out.statistic < out.threshold;
    } else {
        out.statistic = linear_stat(inst, params);
        out.threshold = 0.0;
        out.decide_planted = out.statistic >= 0.0;
    }
    return out;
}

RiskReport test_risk_mc(const ModelParams& params, DetectionRule rule, double alpha, long trials,
                        Seed seed, int threads, std::uint64_t budget) {
    params.validate();
    if (trials < 100) throw PreconditionError("test_risk_mc: trials must be >= 100");
    if (rule == DetectionRule::kResidualRatio) {
        check_enumeration_budget(params.p, params.k, budget);
        if (params.n == 0) {
            throw PreconditionError("test_risk_mc: residual rule needs n >= 1");
        }
    }

    std::vector<char> miss_planted(trials), miss_null(trials);
    parallel_for(trials, threads, [&](std::int64_t t) {
        const auto u = static_cast<std::uint64_t>(t);
        const Instance planted =
            sample_planted(params, substream(seed, {stream_tag::kRiskPlanted, u}));
        miss_planted[t] = !run_test(planted, params, rule, alpha, budget).decide_planted;
        const Instance null_inst =
            sample_null(params, substream(seed, {stream_tag::kRiskNull, u}));
        miss_null[t] = run_test(null_inst, params, rule, alpha, budget).decide_planted;
    });

    long c1 = 0, c2 = 0;
    for (long t = 0; t < trials; ++t) {
        c1 += miss_planted[t];
        c2 += miss_null[t];
    }
    RiskReport out;
    out.trials_per_model = trials;
    out.type1 = static_cast<double>(c1) / trials;
    out.type2 = static_cast<double>(c2) / trials;
    out.sum = out.type1 + out.type2;
    out.se = std::sqrt(out.type1 * (1.0 - out.type1) / trials +
                       out.type2 * (1.0 - out.type2) / trials);
    return out;
}

}  // namespace aon
