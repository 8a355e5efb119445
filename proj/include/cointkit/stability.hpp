// stability.hpp
// Parameter-stability tests on cumulated recursive residuals from the
// intercept-only recursive regression.

#pragma once

#include <cmath>
#include <vector>

#include "cointkit/critical_values.hpp"
#include "cointkit/errors.hpp"

namespace cointkit {

struct StabilityOutcome {
    std::vector<double> path;   // one entry per recursive residual, t = k+1..T
    std::vector<double> upper;  // upper significance boundary per entry
    std::vector<double> lower;  // lower boundary per entry
    bool stable = true;
    int first_crossing = -1;  // index into path of the first boundary breach
    int k = 1;                // regressors in the recursive regression
};

namespace detail {

// Recursive residuals of the intercept-only model:
// w_t = (y_t - mean(y_1..y_{t-1})) / sqrt(1 + 1/(t-1)), t = 2..T.
inline std::vector<double> recursive_residuals_intercept(const std::vector<double>& y) {
    std::vector<double> w;
    w.reserve(y.size() - 1);
    double running_sum = y[0];
    for (std::size_t t = 1; t < y.size(); ++t) {
        const double prior_mean = running_sum / static_cast<double>(t);
        w.push_back((y[t] - prior_mean) / std::sqrt(1.0 + 1.0 / static_cast<double>(t)));
        running_sum += y[t];
    }
    return w;
}

inline void flag_crossings(StabilityOutcome& out) {
    out.stable = true;
    out.first_crossing = -1;
    for (std::size_t i = 0; i < out.path.size(); ++i) {
        if (out.path[i] > out.upper[i] || out.path[i] < out.lower[i]) {
            out.stable = false;
            out.first_crossing = static_cast<int>(i);
            break;
        }
    }
}

} // namespace detail

/// CUSUM test: path W_t = sum of scaled recursive residuals; 5% boundaries
/// +/- 0.948 [sqrt(T-k) + 2(t-k)/sqrt(T-k)].
inline StabilityOutcome cusum_test(const std::vector<double>& y) {
    if (y.size() < 10) throw insufficient_data_error("cusum: need at least 10 observations");
    const auto w = detail::recursive_residuals_intercept(y);
    const double m = static_cast<double>(w.size());
    double mean = 0.0;
    for (double v : w) mean += v;
    mean /= m;
    double var = 0.0;
    for (double v : w) var += (v - mean) * (v - mean);
    var /= (m - 1.0);
    if (!(var > 1e-300)) throw degenerate_error("cusum: recursive residuals have zero variance");
    const double sd = std::sqrt(var);

    StabilityOutcome out;
    out.k = 1;
    const double T = static_cast<double>(y.size());
    const double fk = T - static_cast<double>(out.k);
    double run = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        run += w[i] / sd;
        out.path.push_back(run);
        const double t = static_cast<double>(out.k + 1 + static_cast<int>(i));
        const double bound =
            cusum_bound_coefficient() * (std::sqrt(fk) + 2.0 * (t - out.k) / std::sqrt(fk));
        out.upper.push_back(bound);
        out.lower.push_back(-bound);
    }
    detail::flag_crossings(out);
    return out;
}

/// Squared-CUSUM test: path s_t = cumulative squared recursive residuals over
/// their total; boundaries (t-k)/(T-k) +/- c0 with c0 from the embedded 5%
/// table.
inline StabilityOutcome cusum_sq_test(const std::vector<double>& y) {
    if (y.size() < 10) throw insufficient_data_error("cusum_sq: need at least 10 observations");
    const auto w = detail::recursive_residuals_intercept(y);
    double total = 0.0;
    for (double v : w) total += v * v;
    if (!(total > 1e-300))
        throw degenerate_error("cusum_sq: recursive residuals have zero variance");

    StabilityOutcome out;
    out.k = 1;
    const double T = static_cast<double>(y.size());
    const double fk = T - static_cast<double>(out.k);
    const double c0 = cusum_sq_c0(static_cast<int>(fk));
    double run = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        run += w[i] * w[i];
        out.path.push_back(run / total);
        const double t = static_cast<double>(out.k + 1 + static_cast<int>(i));
        const double center = (t - out.k) / fk;
        out.upper.push_back(center + c0);
        out.lower.push_back(center - c0);
    }
    detail::flag_crossings(out);
    return out;
}

} // namespace cointkit
