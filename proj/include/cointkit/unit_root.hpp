// unit_root.hpp
// Augmented Dickey-Fuller and KPSS tests with Schwarz-criterion lag
// selection, Bartlett long-run variance estimation, and embedded critical
// values.

#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "cointkit/critical_values.hpp"
#include "cointkit/detail/nested_ls.hpp"
#include "cointkit/errors.hpp"
#include "cointkit/regression.hpp"
#include "cointkit/series.hpp"

namespace cointkit {

struct UnitRootOutcome {
    double statistic = 0.0;
    int lags_used = 0;          // ADF: difference lags; KPSS: bandwidth
    Deterministic spec = Deterministic::constant;
    CriticalValueMap critical_values;
    std::optional<double> reject_at;  // smallest tabulated level rejecting the null
    RegressionFit fit;
    long effective_T = 0;
};

struct LongRunVariance {
    double value = 0.0;
    int bandwidth = 0;
    const char* kernel = "bartlett";
};

/// Schwert's rule for the deepest ADF lag candidate.
inline int default_adf_max_lags(long T) {
    const int rule =
        static_cast<int>(std::floor(12.0 * std::pow(static_cast<double>(T) / 100.0, 0.25)));
    return std::max(0, rule);
}

/// Default Bartlett bandwidth for long-run variance estimation.
inline int default_bartlett_bandwidth(long T) {
    return static_cast<int>(std::floor(4.0 * std::pow(static_cast<double>(T) / 100.0, 2.0 / 9.0)));
}

/// Bartlett-weighted long-run variance of a residual vector; equals the
/// 1/T sample variance at bandwidth zero.
inline LongRunVariance long_run_variance(const std::vector<double>& u,
                                         std::optional<int> bandwidth = {}) {
    if (u.empty()) throw domain_error("long_run_variance: empty input");
    if (u.size() < 2) throw insufficient_data_error("long_run_variance: need >= 2 values");
    const long T = static_cast<long>(u.size());
    const int ell = bandwidth ? *bandwidth : default_bartlett_bandwidth(T);
    if (ell < 0) throw configuration_error("long_run_variance: negative bandwidth");

    double mean = 0.0;
    for (double v : u) mean += v;
    mean /= static_cast<double>(T);

    auto gamma = [&](int j) {
        double acc = 0.0;
        for (long t = j; t < T; ++t) acc += (u[t] - mean) * (u[t - j] - mean);
        return acc / static_cast<double>(T);
    };

    double value = gamma(0);
    for (int j = 1; j <= ell && j < T; ++j)
        value += 2.0 * (1.0 - static_cast<double>(j) / (ell + 1.0)) * gamma(j);

    LongRunVariance out;
    out.value = std::max(0.0, value);
    out.bandwidth = ell;
    return out;
}

namespace detail {

inline int deterministic_columns(Deterministic spec) {
    switch (spec) {
        case Deterministic::none: return 0;
        case Deterministic::constant: return 1;
        default: return 2;
    }
}

// Bordered Gram matrix of the ADF regression of Delta v_t on
// [const?, trend?, v_{t-1}, Delta v_{t-1..p}] over rows t = start..N-1.
inline Eigen::MatrixXd adf_gram(const std::vector<double>& v, Deterministic spec, int p,
                                long start) {
    const long N = static_cast<long>(v.size());
    const int d = deterministic_columns(spec);
    const int k = d + 1 + p;
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(k + 1, k + 1);
    Eigen::VectorXd row(k + 1);
    for (long t = start; t < N; ++t) {
        int c = 0;
        if (d >= 1) row(c++) = 1.0;
        if (d >= 2) row(c++) = static_cast<double>(t + 1);
        row(c++) = v[t - 1];
        for (int j = 1; j <= p; ++j) row(c++) = v[t - j] - v[t - j - 1];
        row(k) = v[t] - v[t - 1];
        G.selfadjointView<Eigen::Lower>().rankUpdate(row);
    }
    G = G.selfadjointView<Eigen::Lower>();
    return G;
}

struct AdfSelection {
    int lags = 0;
    long common_T = 0;
};

// Schwarz-criterion lag choice on the common largest-lag-trimmed sample.
inline AdfSelection adf_select_lags(const std::vector<double>& v, Deterministic spec,
                                    int max_lags) {
    const long N = static_cast<long>(v.size());
    const int d = deterministic_columns(spec);
    const long start = max_lags + 1;
    const long n = N - start;
    if (n < d + 3 + max_lags)
        throw insufficient_data_error("adf: sample too short for the lag search");

    const Eigen::MatrixXd G = adf_gram(v, spec, max_lags, start);
    const auto ssr = prefix_ssr_from_gram(G);

    double best = std::numeric_limits<double>::infinity();
    int best_p = -1;
    for (int p = 0; p <= max_lags; ++p) {
        const std::size_t prefix = static_cast<std::size_t>(d + 1 + p);
        const double s = ssr[prefix];
        if (!std::isfinite(s) || s <= 0.0) continue;
        const double T = static_cast<double>(n);
        const double sbc = std::log(s / T) + (d + 1 + p) * std::log(T) / T;
        if (sbc < best) {
            best = sbc;
            best_p = p;
        }
    }
    if (best_p < 0) throw degenerate_error("adf: regression degenerate at every lag order");
    return {best_p, n};
}

struct AdfStat {
    double statistic = 0.0;
    int lags = 0;
    long T = 0;
};

// Statistic-only ADF with Schwarz lag selection; the hot-loop path shared by
// the break-cointegration grid. Verified against the full adf_test in the
// unit tests.
inline AdfStat adf_statistic_fast(const std::vector<double>& v, Deterministic spec,
                                  int max_lags) {
    const auto sel = adf_select_lags(v, spec, max_lags);
    const long N = static_cast<long>(v.size());
    const int d = deterministic_columns(spec);
    const long start = sel.lags + 1;
    const long n = N - start;

    const Eigen::MatrixXd G = adf_gram(v, spec, sel.lags, start);
    const int k = d + 1 + sel.lags;
    const auto fit = solve_gram(G.topLeftCorner(k, k), G.topRightCorner(k, 1), G(k, k), n);
    if (!fit.ok) throw degenerate_error("adf: singular regression at the selected lag");
    if (fit.sigma2() <= kDegenerateSigma2)
        throw degenerate_error("adf: zero residual variance");
    return {fit.t_stat(d), sel.lags, n};
}

} // namespace detail

/// ADF unit-root test. Fits the Dickey-Fuller regression with the difference
/// lag order chosen by minimum Schwarz criterion over 0..max_lags, then
/// refits on the longest sample the chosen order allows.
inline UnitRootOutcome adf_test(const ObservationSeries& series, Deterministic spec,
                                std::optional<int> max_lags = {}) {
    validate_series(series);
    const long N = static_cast<long>(series.values.size());
    int pmax = max_lags ? *max_lags : default_adf_max_lags(N);
    if (pmax < 0) throw configuration_error("adf: negative max_lags");
    if (max_lags) {
        if (N < pmax + 10) throw insufficient_data_error("adf: need length >= max_lags + 10");
    } else {
        const int d = detail::deterministic_columns(spec);
        while (pmax > 0 && N - (pmax + 1) < d + 3 + pmax) --pmax;
        if (N < pmax + 10) throw insufficient_data_error("adf: series too short");
    }

    const auto sel = detail::adf_select_lags(series.values, spec, pmax);
    const int p = sel.lags;
    const long start = p + 1;
    const long rows = N - start;

    DesignMatrix design;
    Eigen::VectorXd y(rows);
    std::vector<double> col(static_cast<std::size_t>(rows));
    const auto& v = series.values;
    for (long t = start; t < N; ++t) y(t - start) = v[t] - v[t - 1];
    if (spec != Deterministic::none) {
        std::fill(col.begin(), col.end(), 1.0);
        design.add_column("const", col);
    }
    if (spec == Deterministic::constant_and_trend) {
        for (long t = start; t < N; ++t) col[t - start] = static_cast<double>(t + 1);
        design.add_column("trend", col);
    }
    const std::string level_name = series.name + ".l1";
    for (long t = start; t < N; ++t) col[t - start] = v[t - 1];
    design.add_column(level_name, col);
    for (int j = 1; j <= p; ++j) {
        for (long t = start; t < N; ++t) col[t - start] = v[t - j] - v[t - j - 1];
        design.add_column("d." + series.name + ".l" + std::to_string(j), col);
    }

    RegressionFit fit;
    try {
        fit = ols_fit(design, y);
    } catch (const collinearity_error&) {
        throw degenerate_error("adf: degenerate regression (collinear design)");
    }
    if (fit.sigma2 <= kDegenerateSigma2)
        throw degenerate_error("adf: zero residual variance");

    UnitRootOutcome out;
    out.spec = spec;
    out.lags_used = p;
    out.effective_T = rows;
    out.statistic = fit.coef(level_name) / fit.std_error(level_name);
    out.fit = std::move(fit);
    for (double level : {0.01, 0.05, 0.10})
        out.critical_values[level] = adf_critical_value(spec, level, rows);
    for (double level : {0.01, 0.05, 0.10}) {
        if (out.statistic < out.critical_values[level]) {
            out.reject_at = level;
            break;
        }
    }
    return out;
}

/// KPSS stationarity test: scaled partial sums of the residuals from the
/// deterministic regression over a Bartlett long-run variance.
inline UnitRootOutcome kpss_test(const ObservationSeries& series, Deterministic spec,
                                 std::optional<int> bandwidth = {}) {
    validate_series(series);
    if (spec == Deterministic::none)
        throw configuration_error("kpss: spec must be constant or constant_and_trend");
    const long T = static_cast<long>(series.values.size());
    if (T < 10) throw insufficient_data_error("kpss: need at least 10 observations");

    DesignMatrix design;
    design.add_column("const", std::vector<double>(static_cast<std::size_t>(T), 1.0));
    if (spec == Deterministic::constant_and_trend) {
        std::vector<double> trend(static_cast<std::size_t>(T));
        for (long t = 0; t < T; ++t) trend[t] = static_cast<double>(t + 1);
        design.add_column("trend", trend);
    }
    Eigen::VectorXd y(T);
    for (long t = 0; t < T; ++t) y(t) = series.values[t];
    RegressionFit fit = ols_fit(design, y);
    if (fit.ssr / static_cast<double>(T) <= kDegenerateSigma2)
        throw degenerate_error("kpss: zero residual variance");

    std::vector<double> u(static_cast<std::size_t>(T));
    for (long t = 0; t < T; ++t) u[t] = fit.residuals(t);
    const auto lrv = long_run_variance(u, bandwidth);
    if (!(lrv.value > 0.0)) throw degenerate_error("kpss: zero long-run variance");

    double sum_sq = 0.0;
    double run = 0.0;
    for (long t = 0; t < T; ++t) {
        run += u[t];
        sum_sq += run * run;
    }

    UnitRootOutcome out;
    out.spec = spec;
    out.lags_used = lrv.bandwidth;
    out.effective_T = T;
    out.statistic = sum_sq / (static_cast<double>(T) * static_cast<double>(T) * lrv.value);
    out.fit = std::move(fit);
    for (double level : {0.01, 0.05, 0.10})
        out.critical_values[level] = kpss_critical_value(spec, level);
    for (double level : {0.01, 0.05, 0.10}) {
        if (out.statistic > out.critical_values[level]) {
            out.reject_at = level;
            break;
        }
    }
    return out;
}

} // namespace cointkit
