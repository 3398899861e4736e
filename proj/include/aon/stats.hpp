#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace aon {

/// Compensated (Kahan) sum; deterministic for a fixed element order.
inline double kahan_sum(const std::vector<double>& xs) {
    double sum = 0.0, c = 0.0;
    for (double x : xs) {
        const double y = x - c;
        const double t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
    return sum;
}

inline double mean(const std::vector<double>& xs) {
    if (xs.empty()) return 0.0;
    return kahan_sum(xs) / static_cast<double>(xs.size());
}

/// Standard error of the mean from sample variance.
inline double sample_se(const std::vector<double>& xs) {
    const std::size_t n = xs.size();
    if (n < 2) return 0.0;
    const double m = mean(xs);
    double ss = 0.0;
    for (double x : xs) ss += (x - m) * (x - m);
    return std::sqrt(ss / (static_cast<double>(n) * (n - 1)));
}

/// Standard error of the mean from `batches` contiguous batch means. Robust to
/// heavy-tailed summands without storing sorted copies.
inline double batch_se(const std::vector<double>& xs, int batches = 50) {
    const std::size_t n = xs.size();
    if (n < 2) return 0.0;
    if (static_cast<std::size_t>(batches) > n) batches = static_cast<int>(n);
    std::vector<double> bm(batches);
    for (int b = 0; b < batches; ++b) {
        const std::size_t lo = n * b / batches;
        const std::size_t hi = n * (b + 1) / batches;
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += xs[i];
        bm[b] = s / static_cast<double>(hi - lo);
    }
    return sample_se(bm);
}

}  // namespace aon
