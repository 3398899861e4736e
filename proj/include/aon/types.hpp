#pragma once

#include <Eigen/Core>

#include <cmath>
#include <optional>
#include <vector>

#include "aon/errors.hpp"

namespace aon {

/// Observations are rows; the samplers fill X row by row.
using MatrixRM = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Eigen::VectorXd;

/// Problem dimensions and noise level, plus the null-model scale lambda.
/// Derived quantities (snr, lambda0, mse0) are exposed as accessors.
struct ModelParams {
    int p = 0;             ///< ambient dimension
    int k = 0;             ///< sparsity, 1 <= k <= p
    double sigma2 = 1.0;   ///< noise variance, > 0
    int n = 0;             ///< sample count, >= 0
    double lambda = 1.0;   ///< null-model scale, > 0

    double snr() const { return static_cast<double>(k) / sigma2; }
    double lambda0() const { return std::sqrt(snr() + 1.0); }
    double mse0() const {
        const double f = static_cast<double>(k) / p;
        return k * (1.0 - f);
    }

    void validate() const {
        if (k < 1 || k > p) throw PreconditionError("ModelParams: need 1 <= k <= p");
        if (!(sigma2 > 0.0)) throw PreconditionError("ModelParams: sigma2 must be > 0");
        if (!(lambda > 0.0)) throw PreconditionError("ModelParams: lambda must be > 0");
        if (n < 0) throw PreconditionError("ModelParams: n must be >= 0");
    }

    ModelParams with_n(int n_new) const {
        ModelParams q = *this;
        q.n = n_new;
        return q;
    }
};

/// A k-sparse binary vector, stored as its strictly increasing support.
struct SupportVector {
    std::vector<int> indices;  ///< strictly increasing, each in [0, p)
    int p = 0;

    int k() const { return static_cast<int>(indices.size()); }

    void validate() const {
        if (p <= 0) throw PreconditionError("SupportVector: p must be positive");
        int prev = -1;
        for (int i : indices) {
            if (i <= prev || i >= p) {
                throw PreconditionError("SupportVector: indices must be strictly increasing in [0, p)");
            }
            prev = i;
        }
    }

    VectorXd dense() const {
        VectorXd v = VectorXd::Zero(p);
        for (int i : indices) v[i] = 1.0;
        return v;
    }

    bool operator==(const SupportVector& other) const {
        return p == other.p && indices == other.indices;
    }
};

enum class Origin { kPlanted, kNull, kConditionedPlanted };

/// One draw of (X, Y). `truth` is present exactly for planted-family origins.
struct Instance {
    MatrixRM X;
    VectorXd Y;
    std::optional<SupportVector> truth;
    Origin origin = Origin::kNull;
};

}  // namespace aon
