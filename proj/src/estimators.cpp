#include "aon/estimators.hpp"

#include <cmath>
#include <limits>

#include "aon/parallel.hpp"
#include "aon/stats.hpp"

namespace aon {

namespace {

void check_instance(const Instance& inst, const ModelParams& params) {
    if (inst.X.cols() != params.p || inst.X.rows() != inst.Y.size()) {
        throw PreconditionError("instance dimensions do not match params");
    }
}

struct MinResidual {
    double value = std::numeric_limits<double>::infinity();
    SupportVector support;
};

MinResidual min_residual(const Instance& inst, const ModelParams& params, std::uint64_t budget) {
    check_instance(inst, params);
    const int n = static_cast<int>(inst.Y.size());
    SupportEnumerator e(params.p, params.k, budget);
    MinResidual best;
    VectorXd fit(n);
    do {
        fit.setZero();
        for (int j : e.current()) fit += inst.X.col(j);
        const double resid = (inst.Y - fit).squaredNorm();
        if (resid < best.value) {
            best.value = resid;
            best.support = e.current_support();
        }
    } while (e.advance());
    return best;
}

}  // namespace

SupportVector mle(const Instance& inst, const ModelParams& params, std::uint64_t budget) {
    return min_residual(inst, params, budget).support;
}

PosteriorTable posterior(const Instance& inst, const ModelParams& params, std::uint64_t budget) {
    check_instance(inst, params);
    const int n = static_cast<int>(inst.Y.size());
    const double inv2s2 = 1.0 / (2.0 * params.sigma2);
    SupportEnumerator e(params.p, params.k, budget);
    PosteriorTable table;
    table.params = params;
    table.log_weights.reserve(e.count());
    VectorXd fit(n);
    do {
        fit.setZero();
        for (int j : e.current()) fit += inst.X.col(j);
        table.log_weights.push_back(-(inst.Y - fit).squaredNorm() * inv2s2);
    } while (e.advance());
    const double norm = log_sum_exp(table.log_weights);
    for (double& w : table.log_weights) w -= norm;
    return table;
}

VectorXd bayes_mean(const PosteriorTable& table) {
    const ModelParams& params = table.params;
    VectorXd mean = VectorXd::Zero(params.p);
    SupportEnumerator e(params.p, params.k, table.log_weights.size());
    std::uint64_t r = 0;
    do {
        const double w = std::exp(table.log_weights[r]);
        for (int j : e.current()) mean[j] += w;
        ++r;
    } while (e.advance());
    return mean;
}

RecoveryResult recover(const Instance& inst, const ModelParams& params, std::uint64_t budget) {
    if (!inst.truth) throw PreconditionError("recover: instance has no ground truth");
    RecoveryResult out;
    out.mle_support = mle(inst, params, budget);
    out.bayes_mean = bayes_mean(posterior(inst, params, budget));
    const int shared = overlap(out.mle_support, *inst.truth);
    out.mle_sq_err = 2.0 * (params.k - shared);
    out.bayes_sq_err = (inst.truth->dense() - out.bayes_mean).squaredNorm();
    return out;
}

MmseEstimate mmse_mc(const ModelParams& params, long trials, Seed seed, int threads,
                     std::uint64_t budget) {
    params.validate();
    if (trials < 30) throw PreconditionError("mmse_mc: trials must be >= 30");
    check_enumeration_budget(params.p, params.k, budget);

    std::vector<double> sq_err(trials);
    parallel_for(trials, threads, [&](std::int64_t t) {
        const Instance inst = sample_planted(
            params, substream(seed, {stream_tag::kMmse, static_cast<std::uint64_t>(t)}));
        const VectorXd mean_vec = bayes_mean(posterior(inst, params, budget));
        sq_err[t] = (inst.truth->dense() - mean_vec).squaredNorm();
    });

    MmseEstimate out;
    out.trials = trials;
    out.mmse = mean(sq_err);
    out.se = sample_se(sq_err);
    const double mse0 = params.mse0();
    out.ratio = out.mmse / mse0;
    out.ratio_se = out.se / mse0;
    return out;
}

double mse_lower_bound(double kl, int n, int m, double k, double sigma2) {
    if (kl < 0.0) throw PreconditionError("mse_lower_bound: kl must be >= 0");
    if (m < 1 || m > n - 1) throw PreconditionError("mse_lower_bound: need 1 <= m <= n-1");
    return std::exp(-2.0 * kl / (n - m)) * (sigma2 + k) - sigma2;
}

double pairwise_error_bound(int ell, double sigma2, int n) {
    if (ell < 1) throw PreconditionError("pairwise_error_bound: ell must be >= 1");
    if (!(sigma2 > 0.0)) throw PreconditionError("pairwise_error_bound: sigma2 must be > 0");
    if (n < 0) throw PreconditionError("pairwise_error_bound: n must be >= 0");
    return std::exp(-0.5 * n * std::log1p(ell / (2.0 * sigma2)));
}

PairwiseErrorMc pairwise_error_mc(int ell, double sigma2, int n, long trials, Seed seed,
                                  int threads) {
    if (ell < 1) throw PreconditionError("pairwise_error_mc: ell must be >= 1");
    if (!(sigma2 > 0.0)) throw PreconditionError("pairwise_error_mc: sigma2 must be > 0");
    if (n < 0 || trials < 1) throw PreconditionError("pairwise_error_mc: bad n or trials");
    const double sigma = std::sqrt(sigma2);
    std::vector<char> hit(trials);
    parallel_for(trials, threads, [&](std::int64_t t) {
        Rng rng(substream(seed, {stream_tag::kPairwise, static_cast<std::uint64_t>(t)}));
        double lhs = 0.0, rhs = 0.0;
        for (int i = 0; i < n; ++i) {
            // beta - beta' has ell entries +1 and ell entries -1.
            double diff = 0.0;
            for (int j = 0; j < ell; ++j) diff += rng.normal() - rng.normal();
            const double w = sigma * rng.normal();
            lhs += (w + diff) * (w + diff);
            rhs += w * w;
        }
        hit[t] = lhs <= rhs;
    });
    long c = 0;
    for (char h : hit) c += h;
    PairwiseErrorMc out;
    out.trials = trials;
    out.freq = static_cast<double>(c) / trials;
    out.se = std::sqrt(out.freq * (1.0 - out.freq) / trials);
    return out;
}

MleTailBound mle_tail_bound(const ModelParams& params) {
    params.validate();
    if (params.k >= params.p) throw PreconditionError("mle_tail_bound: needs k < p");
    const double lr = std::log(static_cast<double>(params.p) / params.k);
    MleTailBound out;
    out.d = static_cast<int>(std::ceil(params.k / lr));
    out.threshold = 2.0 * out.d;
    const double e1 = std::exp(1.0);
    out.bound = (e1 * e1) / (lr * lr * (1.0 - 1.0 / e1));
    const double nstar = critical_sample_size(params);
    const double needed = (1.0 + std::log(2.0) / std::log1p(params.snr() / 2.0)) *
                          (1.0 + 4.0 * std::log(lr) / lr) * nstar;
    out.sample_condition_met = params.n >= needed;
    return out;
}

}  // namespace aon
