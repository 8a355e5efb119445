// cointegration.hpp
// Residual-based cointegration tests: the two-step test on a static long-run
// regression, and the single-break family over level-shift (C), level-shift-
// with-trend (C/T) and regime-shift (C/S) models with ADF*, Zt* and Za*
// statistics minimized over a breakpoint grid.
//
// The grid evaluator assembles each candidate's cross-product matrix from
// precomputed full-sample and suffix sums, so every grid point is a pure
// function of the data and chunked parallel evaluation is bit-identical to a
// sequential sweep.

#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>
#include <vector>

#include "cointkit/critical_values.hpp"
#include "cointkit/detail/nested_ls.hpp"
#include "cointkit/errors.hpp"
#include "cointkit/parallel.hpp"
#include "cointkit/regression.hpp"
#include "cointkit/series.hpp"
#include "cointkit/unit_root.hpp"

namespace cointkit {

using BreakModel = BreakModelKind;

/// Statistic families of the break-cointegration test.
enum class GhStatistic { adf_star, zt_star, za_star };

inline const char* to_string(GhStatistic s) {
    switch (s) {
        case GhStatistic::adf_star: return "ADF*";
        case GhStatistic::zt_star: return "Zt*";
        default: return "Za*";
    }
}

/// One candidate breakpoint: the step dummy is 0 through observation
/// floor(n*tau) and 1 afterwards (1-based positions).
struct BreakDummy {
    double tau = 0.0;
    long break_index = 0;

    static BreakDummy at(double tau, long n) {
        if (!(tau > 0.0 && tau < 1.0)) throw configuration_error("break dummy: tau not in (0,1)");
        BreakDummy d;
        d.tau = tau;
        d.break_index = static_cast<long>(std::floor(static_cast<double>(n) * tau + 1e-9));
        return d;
    }
};

struct ProfilePoint {
    double tau = 0.0;
    long break_index = 0;
    double statistic = 0.0;
};

struct CointegrationOutcome {
    enum class Kind { eg_adf, gh_adf_star, gh_zt_star, gh_za_star };
    Kind statistic_kind = Kind::eg_adf;
    double statistic = 0.0;
    bool exact_relation = false;  // stage-1 SSR is exactly zero; no statistic
    std::optional<BreakDummy> breakpoint;
    std::optional<BreakModel> model;
    CriticalValueMap critical_values;
    std::optional<double> reject_at;
    RegressionFit fit;  // stage-1 regression (EG) or the at-break regression (GH)
    std::vector<ProfilePoint> profile;
    int lags_used = 0;  // ADF lag order / Bartlett bandwidth at the optimum
    long effective_T = 0;
    int m = 0;  // regressors in the long-run relation
};

namespace detail {

inline void require_common_calendar(const ObservationSeries& y,
                                    const std::vector<ObservationSeries>& x_set) {
    validate_series(y);
    if (x_set.empty()) throw configuration_error("cointegration: empty regressor set");
    for (const auto& x : x_set) {
        validate_series(x);
        if (x.dates != y.dates)
            throw configuration_error("cointegration: series are not on a common calendar");
    }
}

} // namespace detail

/// Two-step residual-based cointegration test: static long-run regression of
/// y on the regressor set, then a no-deterministic ADF on its residuals with
/// Schwarz lag selection. An exact linear combination (zero stage-1 residual
/// variance) is reported as a distinguished outcome, not an error.
inline CointegrationOutcome engle_granger_test(const ObservationSeries& y,
                                               const std::vector<ObservationSeries>& x_set,
                                               Deterministic spec = Deterministic::constant) {
    detail::require_common_calendar(y, x_set);
    const long n = static_cast<long>(y.values.size());
    if (n < 30) throw insufficient_data_error("engle_granger: need at least 30 observations");
    const int m = static_cast<int>(x_set.size());

    DesignMatrix design;
    if (spec != Deterministic::none)
        design.add_column("const", std::vector<double>(static_cast<std::size_t>(n), 1.0));
    if (spec == Deterministic::constant_and_trend) {
        std::vector<double> trend(static_cast<std::size_t>(n));
        for (long t = 0; t < n; ++t) trend[t] = static_cast<double>(t + 1);
        design.add_column("trend", trend);
    }
    for (const auto& x : x_set) design.add_column(x.name, x.values);
    Eigen::VectorXd yv(n);
    for (long t = 0; t < n; ++t) yv(t) = y.values[t];
    RegressionFit stage1 = ols_fit(design, yv);

    CointegrationOutcome out;
    out.statistic_kind = CointegrationOutcome::Kind::eg_adf;
    out.m = m;
    out.effective_T = n;

    if (stage1.sigma2 <= kDegenerateSigma2) {
        out.exact_relation = true;
        out.statistic = std::numeric_limits<double>::quiet_NaN();
        out.fit = std::move(stage1);
        return out;
    }

    std::vector<double> u(static_cast<std::size_t>(n));
    for (long t = 0; t < n; ++t) u[t] = stage1.residuals(t);
    const auto adf = detail::adf_statistic_fast(u, Deterministic::none, default_adf_max_lags(n));
    out.statistic = adf.statistic;
    out.lags_used = adf.lags;
    out.fit = std::move(stage1);
    for (double level : {0.01, 0.05, 0.10})
        out.critical_values[level] = eg_critical_value(m, level, n);
    for (double level : {0.01, 0.05, 0.10}) {
        if (out.statistic < out.critical_values[level]) {
            out.reject_at = level;
            break;
        }
    }
    return out;
}

/// Candidate breakpoints: indices floor(n*tau) for tau across
/// [trim, 1 - trim], stepping one observation.
inline std::vector<BreakDummy> breakpoint_grid(long n, double trim) {
    if (!(trim > 0.0 && trim < 0.5)) throw configuration_error("breakpoint grid: trim not in (0, 0.5)");
    if (n < 20) throw insufficient_data_error("breakpoint grid: n < 20");
    const long lo = static_cast<long>(std::floor(n * trim + 1e-9));
    const long hi = static_cast<long>(std::floor(n * (1.0 - trim) + 1e-9));
    std::vector<BreakDummy> out;
    for (long b = lo; b <= hi; ++b) {
        BreakDummy d;
        d.break_index = b;
        d.tau = static_cast<double>(b) / static_cast<double>(n);
        out.push_back(d);
    }
    return out;
}

/// Long-run regression with a single structural break: constant and break
/// dummy always; trend under C/T; slope-shift interactions under C/S.
inline RegressionFit gh_fit_at(const ObservationSeries& y,
                               const std::vector<ObservationSeries>& x_set, BreakModel model,
                               const BreakDummy& dummy) {
    detail::require_common_calendar(y, x_set);
    const long n = static_cast<long>(y.values.size());
    const int m = static_cast<int>(x_set.size());
    const int k = 2 + (model == BreakModelKind::level_shift_with_trend ? 1 : 0) + m +
                  (model == BreakModelKind::regime_shift ? m : 0);
    const long b = dummy.break_index;
    if (b < k + 2 || n - b < k + 2)
        throw insufficient_data_error("gh_fit_at: too few observations on one side of the break");

    auto phi = [b](long t) { return t + 1 > b ? 1.0 : 0.0; };  // t is 0-based here
    DesignMatrix design;
    std::vector<double> col(static_cast<std::size_t>(n));
    std::fill(col.begin(), col.end(), 1.0);
    design.add_column("const", col);
    for (long t = 0; t < n; ++t) col[t] = phi(t);
    design.add_column("break", col);
    if (model == BreakModelKind::level_shift_with_trend) {
        for (long t = 0; t < n; ++t) col[t] = static_cast<double>(t + 1);
        design.add_column("trend", col);
    }
    for (const auto& x : x_set) design.add_column(x.name, x.values);
    if (model == BreakModelKind::regime_shift) {
        for (const auto& x : x_set) {
            for (long t = 0; t < n; ++t) col[t] = x.values[t] * phi(t);
            design.add_column(x.name + ".break", col);
        }
    }
    Eigen::VectorXd yv(n);
    for (long t = 0; t < n; ++t) yv(t) = y.values[t];
    return ols_fit(design, yv);
}

struct PhillipsZ {
    double za = 0.0;
    double zt = 0.0;
    int bandwidth = 0;
};

/// Serial-correlation-corrected unit-root statistics of a residual vector,
/// from its first-order autoregression without intercept.
inline PhillipsZ phillips_z(const std::vector<double>& u, std::optional<int> bandwidth = {}) {
    const long N = static_cast<long>(u.size());
    if (N < 10) throw insufficient_data_error("phillips_z: need at least 10 residuals");
    double lag_sq = 0.0, cross = 0.0;
    for (long t = 1; t < N; ++t) {
        lag_sq += u[t - 1] * u[t - 1];
        cross += u[t] * u[t - 1];
    }
    if (!(lag_sq > 0.0)) throw degenerate_error("phillips_z: zero residual variance");
    const double rho = cross / lag_sq;

    std::vector<double> eps(static_cast<std::size_t>(N - 1));
    for (long t = 1; t < N; ++t) eps[t - 1] = u[t] - rho * u[t - 1];

    const auto lrv = long_run_variance(eps, bandwidth);
    const double gamma0 = long_run_variance(eps, 0).value;
    if (!(lrv.value > 0.0)) throw degenerate_error("phillips_z: zero long-run variance");
    const double lambda = 0.5 * (lrv.value - gamma0);
    const double n = static_cast<double>(N);
    const double scale = lag_sq / (n * n);  // n^{-2} sum of squared lagged residuals
    const double sigma_lr = std::sqrt(lrv.value);

    PhillipsZ out;
    out.bandwidth = lrv.bandwidth;
    out.za = n * (rho - 1.0) - lambda / scale;
    out.zt = (rho - 1.0) * std::sqrt(lag_sq) / sigma_lr - lambda / (sigma_lr * std::sqrt(scale));
    return out;
}

namespace detail {

// Cross products of the break regression assembled from one pass of
// full-sample and suffix sums. Column layout matches gh_fit_at.
class GhGridEngine {
public:
    GhGridEngine(const std::vector<double>& y, const std::vector<std::vector<double>>& xs,
                 BreakModel model)
        : y_(y), xs_(xs), model_(model), n_(static_cast<long>(y.size())),
          m_(static_cast<int>(xs.size())) {
        // Base variables: 1, t, x_1..x_m, y.
        base_.push_back(std::vector<double>(y.size(), 1.0));
        std::vector<double> trend(y.size());
        for (long t = 0; t < n_; ++t) trend[t] = static_cast<double>(t + 1);
        base_.push_back(std::move(trend));
        for (const auto& x : xs_) base_.push_back(x);
        base_.push_back(y);
        const int P = static_cast<int>(base_.size());
        full_.assign(P, std::vector<double>(P, 0.0));
        suffix_.assign(P, std::vector<std::vector<double>>(P));
        for (int a = 0; a < P; ++a) {
            for (int c = a; c < P; ++c) {
                std::vector<double> suf(static_cast<std::size_t>(n_) + 1, 0.0);
                for (long t = n_ - 1; t >= 0; --t)
                    suf[t] = suf[t + 1] + base_[a][t] * base_[c][t];
                full_[a][c] = full_[c][a] = suf[0];
                suffix_[a][c] = suf;
            }
        }
        // Regression columns: const, break, (trend), x..., (x.break...).
        cols_.push_back({kOne, false});
        cols_.push_back({kOne, true});
        if (model_ == BreakModelKind::level_shift_with_trend) cols_.push_back({kTrend, false});
        for (int j = 0; j < m_; ++j) cols_.push_back({kX + j, false});
        if (model_ == BreakModelKind::regime_shift)
            for (int j = 0; j < m_; ++j) cols_.push_back({kX + j, true});
    }

    int k() const { return static_cast<int>(cols_.size()); }
    long n() const { return n_; }

    // Bordered Gram matrix [X y]'[X y] at break index b.
    Eigen::MatrixXd gram_at(long b) const {
        const int K = k();
        Eigen::MatrixXd G(K + 1, K + 1);
        const int ybase = static_cast<int>(base_.size()) - 1;
        for (int a = 0; a <= K; ++a) {
            const auto ca = a < K ? cols_[a] : Col{ybase, false};
            for (int c = a; c <= K; ++c) {
                const auto cc = c < K ? cols_[c] : Col{ybase, false};
                const double v = (ca.broken || cc.broken) ? suffix(ca.base, cc.base, b)
                                                          : full(ca.base, cc.base);
                G(a, c) = v;
                G(c, a) = v;
            }
        }
        return G;
    }

    // Fitted coefficients and residuals at break index b.
    bool solve_at(long b, Eigen::VectorXd& beta, std::vector<double>& resid) const {
        const int K = k();
        const Eigen::MatrixXd G = gram_at(b);
        const auto fit = solve_gram(G.topLeftCorner(K, K), G.topRightCorner(K, 1), G(K, K), n_);
        if (!fit.ok) return false;
        beta = fit.coefficients;
        resid.resize(static_cast<std::size_t>(n_));
        for (long t = 0; t < n_; ++t) {
            double fitted = 0.0;
            for (int c = 0; c < K; ++c) {
                const auto col = cols_[c];
                const double z = base_[col.base][t] * (col.broken ? (t + 1 > b ? 1.0 : 0.0) : 1.0);
                fitted += beta(c) * z;
            }
            resid[t] = y_[t] - fitted;
        }
        return true;
    }

private:
    static constexpr int kOne = 0;
    static constexpr int kTrend = 1;
    static constexpr int kX = 2;

    struct Col {
        int base;     // index into base_
        bool broken;  // multiplied by the step dummy
    };

    double full(int a, int c) const { return full_[std::min(a, c)][std::max(a, c)]; }
    double suffix(int a, int c, long b) const {
        return suffix_[std::min(a, c)][std::max(a, c)][static_cast<std::size_t>(b)];
    }

    const std::vector<double>& y_;
    std::vector<std::vector<double>> xs_;
    BreakModel model_;
    long n_;
    int m_;
    std::vector<std::vector<double>> base_;
    std::vector<std::vector<double>> full_;
    std::vector<std::vector<std::vector<double>>> suffix_;
    std::vector<Col> cols_;
};

} // namespace detail

/// Break-cointegration test: evaluates the requested statistic at every
/// breakpoint in the trimmed grid and reports the infimum, its location, and
/// the full profile. Grid points are evaluated independently (optionally in
/// parallel) and reduced in index order, so results do not depend on the
/// thread count.
inline CointegrationOutcome gh_test(const ObservationSeries& y,
                                    const std::vector<ObservationSeries>& x_set,
                                    BreakModel model, GhStatistic statistic,
                                    double trim = 0.15) {
    detail::require_common_calendar(y, x_set);
    const long n = static_cast<long>(y.values.size());
    if (n < 50) throw insufficient_data_error("gh_test: need at least 50 observations");
    const int m = static_cast<int>(x_set.size());
    if (m < 1 || m > 6) throw configuration_error("gh_test: regressor count must be 1..6");

    const auto grid = breakpoint_grid(n, trim);
    std::vector<std::vector<double>> xs;
    xs.reserve(x_set.size());
    for (const auto& x : x_set) xs.push_back(x.values);
    const detail::GhGridEngine engine(y.values, xs, model);

    // Side-sample precondition for the whole grid, as in gh_fit_at.
    const int k = engine.k();
    for (const auto& d : {grid.front(), grid.back()})
        if (d.break_index < k + 2 || n - d.break_index < k + 2)
            throw insufficient_data_error("gh_test: trim leaves too few observations beside a break");

    const int max_lags = default_adf_max_lags(n);
    struct PointResult {
        double stat = 0.0;
        int lags = 0;
        bool ok = false;
    };
    std::vector<PointResult> results(grid.size());

    parallel_for_index(grid.size(), [&](std::size_t i) {
        Eigen::VectorXd beta;
        std::vector<double> resid;
        if (!engine.solve_at(grid[i].break_index, beta, resid))
            throw collinearity_error("gh_test: singular break regression at tau = " +
                                     std::to_string(grid[i].tau));
        PointResult r;
        if (statistic == GhStatistic::adf_star) {
            const auto adf = detail::adf_statistic_fast(resid, Deterministic::none, max_lags);
            r.stat = adf.statistic;
            r.lags = adf.lags;
        } else {
            const auto pz = phillips_z(resid);
            r.stat = statistic == GhStatistic::zt_star ? pz.zt : pz.za;
            r.lags = pz.bandwidth;
        }
        r.ok = true;
        results[i] = r;
    });

    CointegrationOutcome out;
    out.statistic_kind = statistic == GhStatistic::adf_star
                             ? CointegrationOutcome::Kind::gh_adf_star
                             : (statistic == GhStatistic::zt_star
                                    ? CointegrationOutcome::Kind::gh_zt_star
                                    : CointegrationOutcome::Kind::gh_za_star);
    out.model = model;
    out.m = m;
    out.effective_T = n;
    out.profile.reserve(grid.size());

    std::size_t argmin = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        out.profile.push_back({grid[i].tau, grid[i].break_index, results[i].stat});
        if (results[i].stat < results[argmin].stat) argmin = i;
    }
    out.statistic = results[argmin].stat;
    out.lags_used = results[argmin].lags;
    out.breakpoint = grid[argmin];
    out.fit = gh_fit_at(y, x_set, model, grid[argmin]);

    const bool za_family = statistic == GhStatistic::za_star;
    for (double level : {0.01, 0.05, 0.10})
        out.critical_values[level] = gh_critical_value(model, za_family, m, level);
    for (double level : {0.01, 0.05, 0.10}) {
        if (out.statistic < out.critical_values[level]) {
            out.reject_at = level;
            break;
        }
    }
    return out;
}

/// Writes the statistic-versus-breakpoint profile as CSV for plotting.
inline void write_profile_csv(const CointegrationOutcome& outcome, std::ostream& out) {
    out << "tau,break_index,statistic\n";
    char buf[64];
    for (const auto& p : outcome.profile) {
        std::snprintf(buf, sizeof(buf), "%.6f,%ld,%.8f", p.tau, p.break_index, p.statistic);
        out << buf << '\n';
    }
}

} // namespace cointkit
