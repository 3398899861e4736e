#include "aon/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "aon/divergence.hpp"

namespace aon {

double critical_sample_size(const ModelParams& params) {
    params.validate();
    if (params.k >= params.p) {
        throw PreconditionError("critical_sample_size: needs k < p (log(p/k) > 0)");
    }
    const double num = 2.0 * params.k * std::log(static_cast<double>(params.p) / params.k);
    return num / std::log1p(params.snr());
}

SupportVector sample_support(int p, int k, Rng& rng) {
    std::vector<int> pool(p);
    std::iota(pool.begin(), pool.end(), 0);
    for (int i = 0; i < k; ++i) {
        const int j = i + static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(p - i)));
        std::swap(pool[i], pool[j]);
    }
    SupportVector s;
    s.p = p;
    s.indices.assign(pool.begin(), pool.begin() + k);
    std::sort(s.indices.begin(), s.indices.end());
    return s;
}

namespace {

MatrixRM sample_design(int n, int p, Rng& rng) {
    MatrixRM X(n, p);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < p; ++j) X(i, j) = rng.normal();
    }
    return X;
}

}  // namespace

Instance sample_planted(const ModelParams& params, Seed seed) {
    params.validate();
    Rng rng(seed);
    Instance inst;
    inst.origin = Origin::kPlanted;
    inst.truth = sample_support(params.p, params.k, rng);
    inst.X = sample_design(params.n, params.p, rng);
    const double sigma = std::sqrt(params.sigma2);
    inst.Y.resize(params.n);
    for (int i = 0; i < params.n; ++i) {
        double fit = 0.0;
        for (int j : inst.truth->indices) fit += inst.X(i, j);
        inst.Y[i] = fit + sigma * rng.normal();
    }
    return inst;
}

Instance sample_null(const ModelParams& params, Seed seed) {
    params.validate();
    Rng rng(seed);
    Instance inst;
    inst.origin = Origin::kNull;
    inst.X = sample_design(params.n, params.p, rng);
    const double scale = params.lambda * std::sqrt(params.sigma2);
    inst.Y.resize(params.n);
    for (int i = 0; i < params.n; ++i) inst.Y[i] = scale * rng.normal();
    return inst;
}

Instance sample_conditioned_planted(const ModelParams& params, const ConditioningParams& cond,
                                    Seed seed, int max_rejects, std::uint64_t budget) {
    if (max_rejects < 1) {
        throw PreconditionError("sample_conditioned_planted: max_rejects must be >= 1");
    }
    for (int attempt = 0; attempt < max_rejects; ++attempt) {
        Instance inst = sample_planted(
            params, substream(seed, {stream_tag::kCondAttempt, static_cast<std::uint64_t>(attempt)}));
        if (event_holds(inst.X, *inst.truth, params, cond, budget)) {
            inst.origin = Origin::kConditionedPlanted;
            return inst;
        }
    }
    throw RejectionBudgetExhausted(
        "sample_conditioned_planted: no acceptance in " + std::to_string(max_rejects) +
        " attempts; the event probability is too small for these (gamma, tau)");
}

}  // namespace aon
