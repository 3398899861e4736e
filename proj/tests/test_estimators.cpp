#include <doctest.h>

#include <cmath>

#include "aon/estimators.hpp"
#include "aon/stats.hpp"

using namespace aon;

namespace {

Instance fixture_instance(MatrixRM X, VectorXd Y) {
    Instance inst;
    inst.X = std::move(X);
    inst.Y = std::move(Y);
    inst.origin = Origin::kPlanted;
    return inst;
}

}  // namespace

TEST_CASE("mle on the hand-worked fixture") {
    // residuals over {0},{1},{2}: 1.2125, 5.5125, 0.0125
    const ModelParams params{3, 1, 1.0, 2, 1.0};
    MatrixRM X(2, 3);
    X << 1, 0, 2, 0, 1, 0;
    VectorXd Y(2);
    Y << 2.1, -0.05;
    const Instance inst = fixture_instance(std::move(X), std::move(Y));
    CHECK(mle(inst, params).indices == std::vector<int>{2});
}

TEST_CASE("mle recovers an exact fit") {
    const ModelParams params{8, 3, 1.0, 6, 1.0};
    const Instance planted = sample_planted(params, Seed{21, 0});
    Instance noiseless = planted;
    VectorXd fit = VectorXd::Zero(params.n);
    for (int j : planted.truth->indices) fit += planted.X.col(j);
    noiseless.Y = fit;
    CHECK(mle(noiseless, params).indices == planted.truth->indices);
}

TEST_CASE("mle tie-break goes to the lowest colex rank") {
    const ModelParams params{3, 1, 1.0, 2, 1.0};
    MatrixRM X(2, 3);
    X << 1, 0, 1, 0.5, 1, 0.5;  // columns 0 and 2 identical
    VectorXd Y(2);
    Y << 1, 0.5;
    const Instance inst = fixture_instance(std::move(X), std::move(Y));
    CHECK(mle(inst, params).indices == std::vector<int>{0});
}

TEST_CASE("mle residual never exceeds the residual at the truth") {
    const ModelParams params{10, 2, 1.0, 3, 1.0};
    for (std::uint64_t t = 0; t < 50; ++t) {
        const Instance inst = sample_planted(params, Seed{22, t});
        const SupportVector hat = mle(inst, params);
        VectorXd fit_hat = VectorXd::Zero(params.n), fit_true = VectorXd::Zero(params.n);
        for (int j : hat.indices) fit_hat += inst.X.col(j);
        for (int j : inst.truth->indices) fit_true += inst.X.col(j);
        REQUIRE((inst.Y - fit_hat).squaredNorm() <= (inst.Y - fit_true).squaredNorm());
    }
}

TEST_CASE("posterior table") {
    SUBCASE("no data: uniform weights") {
        const ModelParams params{6, 2, 1.0, 0, 1.0};
        const Instance inst = sample_planted(params, Seed{23, 0});
        const PosteriorTable table = posterior(inst, params);
        REQUIRE(table.log_weights.size() == 15);
        for (double lw : table.log_weights) {
            CHECK(std::exp(lw) == doctest::Approx(1.0 / 15.0).epsilon(1e-12));
        }
    }
    SUBCASE("normalization and positivity") {
        const ModelParams params{8, 2, 0.5, 4, 1.0};
        const Instance inst = sample_planted(params, Seed{23, 1});
        const PosteriorTable table = posterior(inst, params);
        CHECK(std::abs(log_sum_exp(table.log_weights)) < 1e-10);
        for (double lw : table.log_weights) CHECK(std::isfinite(lw));
    }
    SUBCASE("identical columns get symmetric weights") {
        ModelParams params{3, 1, 0.7, 2, 1.0};
        MatrixRM X(2, 3);
        X << 1, 2, 1, -1, 0.3, -1;  // columns 0 and 2 identical
        VectorXd Y(2);
        Y << 0.4, 0.6;
        const PosteriorTable table = posterior(fixture_instance(std::move(X), std::move(Y)), params);
        CHECK(table.log_weights[0] == doctest::Approx(table.log_weights[2]).epsilon(1e-12));
    }
    SUBCASE("huge noise washes the posterior out to uniform") {
        const ModelParams sharp{8, 2, 1.0, 3, 1.0};
        Instance inst = sample_planted(sharp, Seed{23, 2});
        ModelParams flat = sharp;
        flat.sigma2 = 1e6;
        const PosteriorTable table = posterior(inst, flat);
        const double uniform = 1.0 / 28.0;
        for (double lw : table.log_weights) {
            CHECK(std::abs(std::exp(lw) - uniform) < 1e-3);
        }
    }
}

TEST_CASE("bayes mean") {
    SUBCASE("uniform table maps to k/p everywhere") {
        const ModelParams params{6, 2, 1.0, 0, 1.0};
        const Instance inst = sample_planted(params, Seed{24, 0});
        const VectorXd mean_vec = bayes_mean(posterior(inst, params));
        for (int j = 0; j < params.p; ++j) {
            CHECK(mean_vec[j] == doctest::Approx(2.0 / 6.0).epsilon(1e-10));
        }
    }
    SUBCASE("point mass reproduces the support indicator") {
        PosteriorTable table;
        table.params = ModelParams{5, 2, 1.0, 1, 1.0};
        table.log_weights.assign(10, -std::numeric_limits<double>::infinity());
        table.log_weights[7] = 0.0;
        const SupportVector s = support_unrank(5, 2, 7);
        const VectorXd mean_vec = bayes_mean(table);
        CHECK((mean_vec - s.dense()).norm() < 1e-12);
    }
    SUBCASE("two-support average") {
        // weights 1/2 on {0,1} (rank 0) and 1/2 on {0,2} (rank 1) in colex order
        PosteriorTable table;
        table.params = ModelParams{4, 2, 1.0, 1, 1.0};
        table.log_weights.assign(6, -std::numeric_limits<double>::infinity());
        table.log_weights[0] = std::log(0.5);
        table.log_weights[1] = std::log(0.5);
        const VectorXd mean_vec = bayes_mean(table);
        CHECK(mean_vec[0] == doctest::Approx(1.0));
        CHECK(mean_vec[1] == doctest::Approx(0.5));
        CHECK(mean_vec[2] == doctest::Approx(0.5));
        CHECK(mean_vec[3] == doctest::Approx(0.0));
    }
    SUBCASE("coordinates sum to k and stay in [0, 1]") {
        const ModelParams params{9, 3, 0.4, 5, 1.0};
        for (std::uint64_t t = 0; t < 20; ++t) {
            const Instance inst = sample_planted(params, Seed{24, t});
            const VectorXd mean_vec = bayes_mean(posterior(inst, params));
            REQUIRE(mean_vec.sum() == doctest::Approx(3.0).epsilon(1e-9));
            for (int j = 0; j < params.p; ++j) {
                REQUIRE(mean_vec[j] >= -1e-12);
                REQUIRE(mean_vec[j] <= 1.0 + 1e-12);
            }
        }
    }
}

TEST_CASE("recovery errors take the documented ranges") {
    const ModelParams params{8, 2, 0.5, 4, 1.0};
    for (std::uint64_t t = 0; t < 25; ++t) {
        const Instance inst = sample_planted(params, Seed{25, t});
        const RecoveryResult r = recover(inst, params);
        const double m = r.mle_sq_err;
        REQUIRE(m == std::floor(m));
        REQUIRE(static_cast<long>(m) % 2 == 0);
        REQUIRE(m >= 0.0);
        REQUIRE(m <= 2.0 * params.k);
        REQUIRE(r.bayes_sq_err >= 0.0);
        REQUIRE(r.bayes_sq_err <= 2.0 * params.k);
    }
}

TEST_CASE("bayes estimator beats the mle on average") {
    const ModelParams params{10, 2, 1.0, 3, 1.0};
    const long trials = 600;
    std::vector<double> bayes(trials), mle_err(trials);
    for (long t = 0; t < trials; ++t) {
        const Instance inst = sample_planted(params, Seed{26, static_cast<std::uint64_t>(t)});
        const RecoveryResult r = recover(inst, params);
        bayes[t] = r.bayes_sq_err;
        mle_err[t] = r.mle_sq_err;
    }
    const double diff = mean(bayes) - mean(mle_err);
    const double se = std::sqrt(sample_se(bayes) * sample_se(bayes) +
                                sample_se(mle_err) * sample_se(mle_err));
    CHECK(diff <= 3.0 * se);
}

TEST_CASE("mmse monte carlo") {
    SUBCASE("no data: the prior-only estimator is the trivial one") {
        const ModelParams params{10, 2, 1.0, 0, 1.0};
        const MmseEstimate est = mmse_mc(params, 300, Seed{27, 0}, 2);
        CHECK(std::abs(est.ratio - 1.0) <= 4.0 * est.ratio_se + 1e-9);
    }
    SUBCASE("near-noiseless identification") {
        const ModelParams params{10, 2, 1e-6, 2, 1.0};
        const MmseEstimate est = mmse_mc(params, 200, Seed{27, 1}, 2);
        CHECK(est.ratio < 0.05);
    }
    SUBCASE("ratio never exceeds 1 beyond noise") {
        const ModelParams params{10, 2, 1.0, 2, 1.0};
        const MmseEstimate est = mmse_mc(params, 300, Seed{27, 2}, 2);
        CHECK(est.ratio >= 0.0);
        CHECK(est.ratio <= 1.0 + 4.0 * est.ratio_se);
    }
    SUBCASE("trial floor enforced") {
        CHECK_THROWS_AS(mmse_mc({10, 2, 1.0, 2, 1.0}, 29, Seed{27, 3}), PreconditionError);
    }
    SUBCASE("thread count does not change the estimate") {
        const ModelParams params{8, 2, 0.5, 2, 1.0};
        const MmseEstimate a = mmse_mc(params, 100, Seed{27, 4}, 1);
        const MmseEstimate b = mmse_mc(params, 100, Seed{27, 4}, 3);
        CHECK(a.mmse == b.mmse);
        CHECK(a.se == b.se);
    }
}

TEST_CASE("mse lower bound formula") {
    CHECK(mse_lower_bound(0.0, 5, 2, 2.0, 1.0) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(mse_lower_bound(std::log(2.0), 3, 1, 2.0, 1.0) ==
          doctest::Approx(0.5).epsilon(1e-12));
    CHECK_THROWS_AS(mse_lower_bound(1.0, 3, 0, 2.0, 1.0), PreconditionError);
    CHECK_THROWS_AS(mse_lower_bound(1.0, 3, 3, 2.0, 1.0), PreconditionError);
    CHECK_THROWS_AS(mse_lower_bound(-0.1, 3, 1, 2.0, 1.0), PreconditionError);
}

TEST_CASE("pairwise error bound and its Monte Carlo dominance") {
    CHECK(pairwise_error_bound(1, 0.5, 0) == doctest::Approx(1.0));
    CHECK(pairwise_error_bound(1, 0.5, 2) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK_THROWS_AS(pairwise_error_bound(0, 0.5, 2), PreconditionError);

    const double bound = pairwise_error_bound(1, 1.0, 4);
    const PairwiseErrorMc mc = pairwise_error_mc(1, 1.0, 4, 20000, Seed{28, 0}, 2);
    CHECK(mc.freq <= bound + 4.0 * mc.se);
    // the event is not rare at this scale, so the check is informative
    CHECK(mc.freq > 0.01);
}

TEST_CASE("mle tail bound") {
    SUBCASE("k = 1") {
        const MleTailBound b = mle_tail_bound({20, 1, 0.1, 4, 1.0});
        CHECK(b.d == 1);
        CHECK(b.threshold == 2.0);
    }
    SUBCASE("boundary point p/k close to e^e") {
        const MleTailBound b = mle_tail_bound({15, 1, 0.1, 4, 1.0});
        CHECK(b.bound == doctest::Approx(1.5939534225918524).epsilon(1e-12));
        CHECK(b.bound > 1.0);  // vacuous, reported as-is
    }
    SUBCASE("sample condition is false below n*") {
        const ModelParams params{24, 3, 0.03, 2, 1.0};  // n* ~ 2.70
        CHECK_FALSE(mle_tail_bound(params).sample_condition_met);
    }
    SUBCASE("sample condition turns on for large n") {
        const ModelParams params{24, 3, 0.03, 12, 1.0};
        CHECK(mle_tail_bound(params).sample_condition_met);
    }
}
