#include "aon/divergence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "aon/parallel.hpp"
#include "aon/stats.hpp"

namespace aon {

namespace {

constexpr double kE = 2.718281828459045235360287471353;

double log_ratio_pk(const ModelParams& params) {
    return std::log(static_cast<double>(params.p) / params.k);
}

}  // namespace

ConditioningParams ConditioningParams::make(double gamma, double tau, int k) {
    if (!(gamma >= 0.0)) throw PreconditionError("ConditioningParams: gamma must be >= 0");
    if (!(tau >= 0.0 && tau <= static_cast<double>(k))) {
        throw PreconditionError("ConditioningParams: tau must lie in [0, k]");
    }
    ConditioningParams c;
    c.gamma = gamma;
    c.tau = tau;
    c.eta = 1.0 - tau / k;
    return c;
}

double chi2_exact(const ModelParams& params, double lambda) {
    params.validate();
    if (!(lambda > 0.0)) throw PreconditionError("chi2_exact: lambda must be > 0");
    const double floor2 = params.snr() + 0.5;
    if (lambda * lambda <= floor2 * (1.0 + 1e-9)) {
        throw LambdaTooSmall("chi2_exact: requires lambda^2 > k/sigma^2 + 1/2 (moment diverges)");
    }
    const int k = params.k;
    const double n = params.n;
    const double lam2 = lambda * lambda;
    const OverlapLaw law = overlap_law(params.p, k);
    LogSumExpAccumulator acc;
    for (int s = 0; s <= k; ++s) {
        if (law.log_pmf[s] == -std::numeric_limits<double>::infinity()) continue;
        const double a = 2.0 * lam2 - 1.0 - (k + s) / params.sigma2;
        const double b = 1.0 + (k - s) / params.sigma2;
        acc.add(law.log_pmf[s] + n * std::log(lam2) -
                0.5 * n * std::log(a) - 0.5 * n * std::log(b));
    }
    return std::expm1(acc.value());
}

double chi2_blowup_lower_bound(const ModelParams& params) {
    params.validate();
    if (params.k >= params.p) throw PreconditionError("chi2_blowup_lower_bound: needs k < p");
    return std::expm1(params.n * std::log1p(params.snr()) - log_binomial(params.p, params.k));
}

double truncated_moment(const ModelParams& params, double n_eff, int s_lo, int s_hi) {
    params.validate();
    const int k = params.k;
    if (s_lo < 0 || s_hi > k) throw PreconditionError("truncated_moment: range outside [0, k]");
    if (s_lo > s_hi) return 0.0;
    const double denom = k + params.sigma2;
    const OverlapLaw law = overlap_law(params.p, k);
    LogSumExpAccumulator acc;
    for (int s = s_lo; s <= s_hi; ++s) {
        if (law.log_pmf[s] == -std::numeric_limits<double>::infinity()) continue;
        acc.add(law.log_pmf[s] - n_eff * std::log1p(-s / denom));
    }
    const double lse = acc.value();
    return lse == -std::numeric_limits<double>::infinity() ? 0.0 : std::exp(lse);
}

double epsilon_range_split(const ModelParams& params) {
    const double lr = log_ratio_pk(params);
    if (!(lr > 1.0)) throw PreconditionError("epsilon_range_split: requires p/k > e");
    return std::log(lr) / (2.0 * lr);
}

BoundCheck check_lemma_a3(const ModelParams& params, double alpha, double c) {
    params.validate();
    if (!(c > 0.0 && c < 1.0)) throw PreconditionError("check_lemma_a3: c must be in (0, 1)");
    if (params.k > c * params.p) throw PreconditionError("check_lemma_a3: requires k <= c p");
    if (!(alpha > 0.0 && alpha <= 0.5)) {
        throw PreconditionError("check_lemma_a3: alpha must be in (0, 1/2]");
    }
    const double nstar = critical_sample_size(params);
    if (params.n > 0.5 * (1.0 - alpha) * nstar) {
        throw PreconditionError("check_lemma_a3: requires n <= (1 - alpha) n*/2");
    }
    const double log_l2 = std::log1p(params.snr());
    const double tau = params.k * (1.0 - 1.0 / (log_l2 * log_l2));
    const int s_lo = std::max(0, static_cast<int>(std::ceil(tau)));
    BoundCheck out;
    out.lhs = truncated_moment(params, params.n, s_lo, params.k);
    out.rhs = std::exp(-alpha * params.k * log_ratio_pk(params) + std::log((2.0 - c) / (1.0 - c)));
    out.holds = out.lhs <= out.rhs;
    return out;
}

double log_likelihood_ratio(const Instance& inst, const ModelParams& params, double lambda,
                            std::uint64_t budget) {
    params.validate();
    if (!(lambda > 0.0)) throw PreconditionError("log_likelihood_ratio: lambda must be > 0");
    if (inst.X.rows() != inst.Y.size() || inst.X.cols() != params.p) {
        throw PreconditionError("log_likelihood_ratio: instance dimensions do not match params");
    }
    const int n = static_cast<int>(inst.Y.size());
    const double inv2s2 = 1.0 / (2.0 * params.sigma2);

    SupportEnumerator e(params.p, params.k, budget);
    LogSumExpAccumulator acc;
    VectorXd fit(n);
    do {
        fit.setZero();
        for (int j : e.current()) fit += inst.X.col(j);
        acc.add(-(inst.Y - fit).squaredNorm() * inv2s2);
    } while (e.advance());

    const double log_m = log_binomial(params.p, params.k);
    return acc.value() - log_m + n * std::log(lambda) +
           inst.Y.squaredNorm() / (2.0 * lambda * lambda * params.sigma2);
}

DivergenceReport mc_divergences(const ModelParams& params, double lambda, long trials, Seed seed,
                                int threads, std::uint64_t budget) {
    params.validate();
    if (trials < 100) throw PreconditionError("mc_divergences: trials must be >= 100");
    check_enumeration_budget(params.p, params.k, budget);

    ModelParams null_params = params;
    null_params.lambda = lambda;

    std::vector<double> sq_ratio(trials);   // exp(2 LLR) under Q
    std::vector<double> abs_dev(trials);    // |exp(LLR) - 1| under Q
    std::vector<double> llr_planted(trials);

    parallel_for(trials, threads, [&](std::int64_t t) {
        const auto u = static_cast<std::uint64_t>(t);
        const Instance null_inst =
            sample_null(null_params, substream(seed, {stream_tag::kDivNull, u}));
        const double lq = log_likelihood_ratio(null_inst, params, lambda, budget);
        const double ratio = std::exp(lq);
        sq_ratio[t] = ratio * ratio;
        abs_dev[t] = std::abs(ratio - 1.0);
        const Instance planted_inst =
            sample_planted(params, substream(seed, {stream_tag::kDivPlanted, u}));
        llr_planted[t] = log_likelihood_ratio(planted_inst, params, lambda, budget);
    });

    DivergenceReport report;
    report.lambda = lambda;
    report.trials = trials;
    report.chi2_mc = mean(sq_ratio) - 1.0;
    report.chi2_se = batch_se(sq_ratio);
    report.kl_mc = mean(llr_planted);
    report.kl_se = batch_se(llr_planted);
    report.tv_mc = 0.5 * mean(abs_dev);
    report.tv_se = 0.5 * batch_se(abs_dev);
    try {
        report.chi2_exact = chi2_exact(params, lambda);
    } catch (const LambdaTooSmall&) {
        report.chi2_exact.reset();
    }
    return report;
}

bool pinsker_chain_holds(const DivergenceReport& r, double se_mult) {
    constexpr double kNoise = 1e-12;  // floating-point floor for degenerate (n = 0) reports
    const double kl = std::max(r.kl_mc, 0.0);
    const double chi2 = std::max(r.chi2_mc, 0.0);
    const double root = std::sqrt(2.0 * kl);
    const double d_root = kl > 0.0 ? r.kl_se / std::sqrt(2.0 * kl) : r.kl_se;
    const double tv_slack =
        se_mult * std::sqrt(r.tv_se * r.tv_se + d_root * d_root);
    if (r.tv_mc > root + tv_slack + kNoise) return false;
    const double log_chi = std::log1p(chi2);
    const double d_log = r.chi2_se / (1.0 + chi2);
    const double kl_slack = se_mult * std::sqrt(r.kl_se * r.kl_se + d_log * d_log);
    return r.kl_mc <= log_chi + kl_slack + kNoise;
}

bool event_holds(const MatrixRM& X, const SupportVector& beta, const ModelParams& params,
                 const ConditioningParams& cond, std::uint64_t budget) {
    params.validate();
    beta.validate();
    if (beta.p != params.p || beta.k() != params.k) {
        throw PreconditionError("event_holds: beta does not match params");
    }
    const int n = static_cast<int>(X.rows());
    if (n == 0) return true;
    const int k = params.k;
    const int s_min = cond.tau <= 0.0 ? 0 : static_cast<int>(std::ceil(cond.tau));
    if (s_min > k) return true;  // no candidate reaches the overlap cutoff

    // Candidate count check before enumerating anything (log screen first so
    // huge C(p-k, k-s) never reaches exact integer arithmetic).
    const double log_budget = std::log(static_cast<double>(budget));
    std::uint64_t total = 0;
    for (int s = s_min; s <= k; ++s) {
        if (log_binomial(k, s) + log_binomial(params.p - k, k - s) > log_budget + 1.0) {
            throw BudgetExceeded("event_holds: candidate enumeration exceeds budget " +
                                 std::to_string(budget));
        }
        total += binomial_exact(k, s) * binomial_exact(params.p - k, k - s);
        if (total > budget) {
            throw BudgetExceeded("event_holds: candidate enumeration exceeds budget " +
                                 std::to_string(budget));
        }
    }

    std::vector<int> complement;
    complement.reserve(params.p - k);
    {
        auto it = beta.indices.begin();
        for (int j = 0; j < params.p; ++j) {
            if (it != beta.indices.end() && *it == j) {
                ++it;
            } else {
                complement.push_back(j);
            }
        }
    }

    VectorXd xb = VectorXd::Zero(n);
    for (int j : beta.indices) xb += X.col(j);

    VectorXd partial(n), candidate(n);
    for (int s = s_min; s <= k; ++s) {
        const double limit = (2.0 + cond.gamma) * 2.0 * n * (k + s);
        SupportEnumerator shared(k, s, budget);
        do {
            partial = xb;
            for (int pos : shared.current()) partial += X.col(beta.indices[pos]);
            SupportEnumerator fresh(static_cast<int>(complement.size()), k - s, budget);
            do {
                candidate = partial;
                for (int pos : fresh.current()) candidate += X.col(complement[pos]);
                if (candidate.squaredNorm() > limit) return false;
            } while (fresh.advance());
        } while (shared.advance());
    }
    return true;
}

double conditioning_prob_bound(const ModelParams& params, const ConditioningParams& cond) {
    params.validate();
    const double base = -params.n * cond.gamma / 4.0;
    if (cond.eta <= 0.0) return std::exp(base);
    const double eta = cond.eta;
    return std::exp(base + eta * params.k *
                               std::log(kE * kE * params.p / (eta * eta * params.k)));
}

McFrequency event_complement_mc(const ModelParams& params, const ConditioningParams& cond,
                                long trials, Seed seed, int threads, std::uint64_t budget) {
    params.validate();
    if (trials < 1) throw PreconditionError("event_complement_mc: trials must be >= 1");
    std::vector<char> fail(trials);
    parallel_for(trials, threads, [&](std::int64_t t) {
        const Instance inst = sample_planted(
            params, substream(seed, {stream_tag::kEventMc, static_cast<std::uint64_t>(t)}));
        fail[t] = !event_holds(inst.X, *inst.truth, params, cond, budget);
    });
    long c = 0;
    for (char f : fail) c += f;
    McFrequency out;
    out.trials = trials;
    out.freq = static_cast<double>(c) / trials;
    out.se = std::sqrt(out.freq * (1.0 - out.freq) / trials);
    return out;
}

double kl_tail_bound(const ModelParams& params, double epsilon) {
    params.validate();
    if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
        throw PreconditionError("kl_tail_bound: epsilon must lie in [0, 1]");
    }
    return 0.5 * epsilon * params.n * std::log1p(params.snr()) +
           std::sqrt(epsilon) * (2.0 + params.n);
}

TheoremParams make_theorem_params(const ModelParams& params, double delta) {
    params.validate();
    if (params.n < 1) throw PreconditionError("make_theorem_params: requires n >= 1");
    const double lr = log_ratio_pk(params);
    if (!(lr > 1.0)) throw PreconditionError("make_theorem_params: requires p/k > e");
    if (!(delta > 0.0 && delta < 0.5)) {
        throw PreconditionError("make_theorem_params: delta must be in (0, 1/2)");
    }
    const double log_l2 = std::log1p(params.snr());
    TheoremParams out;
    out.alpha = std::max(8.0 / log_l2, 32.0 * std::log(lr) / lr);
    const double gamma = out.alpha * params.k * lr / params.n;
    const double tau = params.k * (1.0 - 1.0 / (log_l2 * log_l2));
    out.cond = ConditioningParams::make(gamma, std::clamp(tau, 0.0, double(params.k)), params.k);
    out.within_regime =
        out.alpha <= 0.5 && params.k <= std::pow(static_cast<double>(params.p), 0.5 - delta);
    return out;
}

}  // namespace aon
