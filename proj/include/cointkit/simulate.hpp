// simulate.hpp
// Synthetic data-generating processes with known cointegration structure,
// and the Monte Carlo harness behind the distributional checks. Draws come
// from a counter-based generator keyed by (seed, dimension, t), so parallel
// replication order cannot perturb a panel, and identical specs always yield
// bit-identical data.

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cointkit/dates.hpp"
#include "cointkit/errors.hpp"
#include "cointkit/parallel.hpp"
#include "cointkit/rng.hpp"
#include "cointkit/series.hpp"

namespace cointkit {

enum class DgpKind { random_walk, cointegrated_system, break_shift };

inline const char* to_string(DgpKind k) {
    switch (k) {
        case DgpKind::random_walk: return "random_walk";
        case DgpKind::cointegrated_system: return "cointegrated_system";
        default: return "break_shift";
    }
}

/// Declarative description of a synthetic process.
///
/// random_walk:        x_t = x_{t-1} + e_t per dimension.
/// cointegrated_system: Dx_t = alpha (beta' x_{t-1} + rho0) + sum Gamma_k Dx_{t-k} + e_t.
/// break_shift:        the same recursion, then the second variable gains
///                     shift_vector = (intercept shift, slope shift vs the
///                     first variable) after observation floor(T * break_tau).
struct DgpSpec {
    DgpKind kind = DgpKind::random_walk;
    int dims = 1;
    long T = 100;
    Eigen::MatrixXd alpha;  // dims x r loadings (cointegrated kinds)
    Eigen::MatrixXd beta;   // dims x r cointegrating vectors
    Eigen::VectorXd relation_intercept;        // rho0, one entry per relation
    std::vector<Eigen::MatrixXd> gamma;        // short-run matrices, optional
    double break_tau = 0.4;                    // break_shift only
    Eigen::Vector2d shift_vector{0.0, 0.0};    // (intercept shift, slope shift)
    Eigen::MatrixXd innovation_cov;            // dims x dims PSD; default identity
    std::uint64_t seed = 0;
    long burn_in = -1;  // negative: default (200 for cointegrated kinds, 0 for walks)

    long effective_burn_in() const {
        if (burn_in >= 0) return burn_in;
        return kind == DgpKind::random_walk ? 0 : 200;
    }
};

namespace detail {

/// Cholesky factor of a positive semidefinite matrix; zero pivots produce
/// zero columns rather than failures so degenerate covariances are legal.
inline Eigen::MatrixXd psd_cholesky(const Eigen::MatrixXd& S) {
    const Eigen::Index n = S.rows();
    if (S.cols() != n) throw configuration_error("innovation_cov must be square");
    const double scale = std::max(1.0, S.diagonal().cwiseAbs().maxCoeff());
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        double d = S(j, j) - L.row(j).head(j).squaredNorm();
        if (d > 1e-12 * scale) {
            L(j, j) = std::sqrt(d);
            for (Eigen::Index i = j + 1; i < n; ++i)
                L(i, j) = (S(i, j) - L.row(i).head(j).dot(L.row(j).head(j))) / L(j, j);
        } else if (d > -1e-8 * scale) {
            L(j, j) = 0.0;
        } else {
            throw configuration_error("innovation_cov is not positive semidefinite");
        }
    }
    return L;
}

inline void validate_dgp(const DgpSpec& spec) {
    if (spec.T < 1) throw configuration_error("dgp: T must be >= 1");
    if (spec.dims < 1) throw configuration_error("dgp: dims must be >= 1");
    if (!(spec.break_tau > 0.0 && spec.break_tau < 1.0))
        throw configuration_error("dgp: break_tau must lie in (0,1)");
    if (spec.kind != DgpKind::random_walk) {
        if (spec.alpha.rows() != spec.dims || spec.beta.rows() != spec.dims ||
            spec.alpha.cols() != spec.beta.cols() || spec.alpha.cols() < 1)
            throw configuration_error("dgp: alpha/beta dimensions are inconsistent");
        if (spec.relation_intercept.size() != 0 &&
            spec.relation_intercept.size() != spec.beta.cols())
            throw configuration_error("dgp: relation_intercept length mismatch");
        for (const auto& g : spec.gamma)
            if (g.rows() != spec.dims || g.cols() != spec.dims)
                throw configuration_error("dgp: gamma dimension mismatch");
    }
    if (spec.kind == DgpKind::break_shift && spec.dims != 2)
        throw configuration_error("dgp: break_shift is defined for a pair");
    if (spec.innovation_cov.size() != 0 &&
        (spec.innovation_cov.rows() != spec.dims || spec.innovation_cov.cols() != spec.dims))
        throw configuration_error("dgp: innovation_cov dimension mismatch");
}

} // namespace detail

/// Runs the process forward and returns a panel named m1..m<dims> on a daily
/// synthetic calendar. Pure function of the spec.
inline MarketPanel generate(const DgpSpec& spec) {
    detail::validate_dgp(spec);
    const int i = spec.dims;
    const long burn = spec.effective_burn_in();
    const long total = burn + spec.T;

    Eigen::MatrixXd L;
    if (spec.innovation_cov.size() == 0)
        L = Eigen::MatrixXd::Identity(i, i);
    else
        L = detail::psd_cholesky(spec.innovation_cov);

    const int r = spec.kind == DgpKind::random_walk ? 0 : static_cast<int>(spec.alpha.cols());
    Eigen::VectorXd rho0 = spec.relation_intercept.size() == static_cast<Eigen::Index>(r)
                               ? spec.relation_intercept
                               : Eigen::VectorXd::Zero(r);
    const int plags = static_cast<int>(spec.gamma.size());

    Eigen::MatrixXd path(i, total);
    Eigen::VectorXd x = Eigen::VectorXd::Zero(i);
    std::vector<Eigen::VectorXd> recent_dx;  // newest first
    Eigen::VectorXd g(i);
    for (long t = 0; t < total; ++t) {
        for (int d = 0; d < i; ++d)
            g(d) = counter_gaussian(spec.seed, static_cast<std::uint64_t>(d),
                                    static_cast<std::uint64_t>(t));
        Eigen::VectorXd eps = L * g;
        Eigen::VectorXd dx = eps;
        if (spec.kind != DgpKind::random_walk) {
            dx += spec.alpha * (spec.beta.transpose() * x + rho0);
            for (int kk = 0; kk < plags && kk < static_cast<int>(recent_dx.size()); ++kk)
                dx += spec.gamma[static_cast<std::size_t>(kk)] * recent_dx[static_cast<std::size_t>(kk)];
        }
        x += dx;
        path.col(t) = x;
        if (plags > 0) {
            recent_dx.insert(recent_dx.begin(), dx);
            if (static_cast<int>(recent_dx.size()) > plags) recent_dx.pop_back();
        }
    }

    MarketPanel panel;
    const std::int64_t start = civil_to_serial(2000, 1, 3);
    panel.calendar.reserve(static_cast<std::size_t>(spec.T));
    for (long t = 0; t < spec.T; ++t) panel.calendar.push_back(serial_to_iso(start + t));
    for (int d = 0; d < i; ++d) {
        ObservationSeries s;
        s.name = "m" + std::to_string(d + 1);
        s.dates = panel.calendar;
        s.values.resize(static_cast<std::size_t>(spec.T));
        for (long t = 0; t < spec.T; ++t) s.values[static_cast<std::size_t>(t)] = path(d, burn + t);
        panel.series.push_back(std::move(s));
    }

    if (spec.kind == DgpKind::break_shift) {
        const long b = static_cast<long>(std::floor(spec.T * spec.break_tau + 1e-9));
        auto& yv = panel.series[1].values;
        const auto& xv = panel.series[0].values;
        for (long t = 0; t < spec.T; ++t) {
            const double phi = (t + 1 > b) ? 1.0 : 0.0;
            yv[static_cast<std::size_t>(t)] +=
                phi * (spec.shift_vector(0) + spec.shift_vector(1) * xv[static_cast<std::size_t>(t)]);
        }
    }
    return panel;
}

/// Pair parametrization equivalent to y_t = intercept + x_t + u_t with x a
/// unit random walk and u iid N(0, noise_sd^2): the loading -1 on the
/// relation re-anchors y each step and the innovation covariance carries the
/// common x shock.
inline DgpSpec cointegrated_pair_spec(long T, std::uint64_t seed, double noise_sd = 0.5,
                                      double intercept = 1.0) {
    DgpSpec spec;
    spec.kind = DgpKind::cointegrated_system;
    spec.dims = 2;
    spec.T = T;
    spec.seed = seed;
    spec.alpha = Eigen::MatrixXd(2, 1);
    spec.alpha << 0.0, -1.0;
    spec.beta = Eigen::MatrixXd(2, 1);
    spec.beta << -1.0, 1.0;  // relation: y - x - intercept
    spec.relation_intercept = Eigen::VectorXd::Constant(1, -intercept);
    spec.innovation_cov = Eigen::MatrixXd(2, 2);
    spec.innovation_cov << 1.0, 1.0, 1.0, 1.0 + noise_sd * noise_sd;
    spec.burn_in = 1;  // the pair equilibrates in one step
    return spec;
}

/// The cointegrated pair above with an intercept shift after floor(T * tau).
inline DgpSpec break_pair_spec(long T, std::uint64_t seed, double shift, double tau = 0.4,
                               double noise_sd = 0.5, double intercept = 1.0) {
    DgpSpec spec = cointegrated_pair_spec(T, seed, noise_sd, intercept);
    spec.kind = DgpKind::break_shift;
    spec.break_tau = tau;
    spec.shift_vector = Eigen::Vector2d(shift, 0.0);
    return spec;
}

/// Trivariate rank-1 system: m1 - m2 mean-reverts, m3 walks freely.
inline DgpSpec rank_one_trio_spec(long T, std::uint64_t seed, double adjust = 0.1) {
    DgpSpec spec;
    spec.kind = DgpKind::cointegrated_system;
    spec.dims = 3;
    spec.T = T;
    spec.seed = seed;
    spec.alpha = Eigen::MatrixXd(3, 1);
    spec.alpha << -adjust, adjust, 0.0;
    spec.beta = Eigen::MatrixXd(3, 1);
    spec.beta << 1.0, -1.0, 0.0;
    return spec;
}

/// Trivariate system where m1 drives m2 and m3 with a one-period lag through
/// the equilibrium corrections; m1 itself is a pure random walk.
inline DgpSpec driven_trio_spec(long T, std::uint64_t seed, double adjust = 0.25) {
    DgpSpec spec;
    spec.kind = DgpKind::cointegrated_system;
    spec.dims = 3;
    spec.T = T;
    spec.seed = seed;
    spec.alpha = Eigen::MatrixXd(3, 2);
    spec.alpha << 0.0, 0.0, adjust, 0.0, 0.0, adjust;
    spec.beta = Eigen::MatrixXd(3, 2);
    spec.beta << 1.0, 1.0, -1.0, 0.0, 0.0, -1.0;
    return spec;
}

struct McOutcome {
    double statistic = 0.0;
    bool rejected = false;
};

struct McResult {
    long replications = 0;
    long failures = 0;
    double rejection_rate = 0.0;
    std::map<double, double> statistic_quantiles;  // at 1,5,10,50,90,95,99 percent
    std::uint64_t first_seed = 0;
    std::uint64_t last_seed = 0;
};

/// Runs `test` on `reps` independent panels drawn from `spec` with seeds
/// base, base+1, ...; rejections are counted at `level`. Replications may run
/// concurrently; results reduce in replication order, so the outcome is
/// bit-identical for any thread count. Failed replications are excluded and
/// counted; more than 5% failures aborts the run.
inline McResult monte_carlo(const DgpSpec& spec, long reps,
                            const std::function<McOutcome(const MarketPanel&, double)>& test,
                            double level) {
    if (reps < 1) throw configuration_error("monte_carlo: reps must be >= 1");
    std::vector<std::optional<McOutcome>> slots(static_cast<std::size_t>(reps));
    parallel_for_index(static_cast<std::size_t>(reps), [&](std::size_t rep) {
        DgpSpec local = spec;
        local.seed = spec.seed + rep;
        try {
            slots[rep] = test(generate(local), level);
        } catch (const error&) {
            slots[rep] = std::nullopt;
        }
    });

    McResult out;
    out.replications = reps;
    out.first_seed = spec.seed;
    out.last_seed = spec.seed + static_cast<std::uint64_t>(reps) - 1;
    std::vector<double> stats;
    stats.reserve(static_cast<std::size_t>(reps));
    long rejected = 0;
    for (const auto& slot : slots) {
        if (!slot) {
            ++out.failures;
            continue;
        }
        stats.push_back(slot->statistic);
        if (slot->rejected) ++rejected;
    }
    if (out.failures * 20 > reps)
        throw harness_error("monte_carlo: more than 5% of replications failed");
    const long used = reps - out.failures;
    out.rejection_rate = used > 0 ? static_cast<double>(rejected) / static_cast<double>(used) : 0.0;

    std::sort(stats.begin(), stats.end());
    for (double q : {0.01, 0.05, 0.10, 0.50, 0.90, 0.95, 0.99}) {
        if (stats.empty()) break;
        const double pos = q * static_cast<double>(stats.size() - 1);
        const std::size_t lo = static_cast<std::size_t>(pos);
        const std::size_t hi = std::min(lo + 1, stats.size() - 1);
        out.statistic_quantiles[q] = stats[lo] + (pos - lo) * (stats[hi] - stats[lo]);
    }
    return out;
}

} // namespace cointkit
