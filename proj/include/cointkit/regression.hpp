// regression.hpp
// Least-squares engine. Coefficients come from a Householder QR of the design
// matrix (never an explicit normal-equations inverse); rank deficiency is
// detected through the singular values of the R factor.

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "cointkit/errors.hpp"
#include "cointkit/series.hpp"
#include "cointkit/stats.hpp"

namespace cointkit {

/// Relative singular-value cutoff below which a design is treated as rank
/// deficient.
inline constexpr double kCollinearityTol = 1e-10;

/// Residual-variance floor below which a fit counts as degenerate.
inline constexpr double kDegenerateSigma2 = 1e-12;

struct DesignMatrix {
    std::vector<std::string> names;
    Eigen::MatrixXd X;  // T x k

    std::size_t rows() const { return static_cast<std::size_t>(X.rows()); }
    std::size_t cols() const { return names.size(); }

    void add_column(const std::string& name, const std::vector<double>& v) {
        for (const auto& n : names)
            if (n == name) throw configuration_error("design: duplicate column '" + name + "'");
        if (names.empty()) {
            X.resize(static_cast<Eigen::Index>(v.size()), 0);
        } else if (v.size() != rows()) {
            throw configuration_error("design: column '" + name + "' length mismatch");
        }
        X.conservativeResize(Eigen::NoChange, X.cols() + 1);
        for (std::size_t t = 0; t < v.size(); ++t)
            X(static_cast<Eigen::Index>(t), X.cols() - 1) = v[t];
        names.push_back(name);
    }

    void add_constant() {
        if (names.empty())
            throw configuration_error("design: add a data column before the constant");
        add_column("const", std::vector<double>(rows(), 1.0));
    }

    int index(const std::string& name) const {
        for (std::size_t i = 0; i < names.size(); ++i)
            if (names[i] == name) return static_cast<int>(i);
        throw configuration_error("design: unknown column '" + name + "'");
    }
};

struct RegressionFit {
    std::vector<std::string> names;
    Eigen::VectorXd coefficients;
    Eigen::MatrixXd covariance;  // sigma2 * (X'X)^{-1}
    Eigen::VectorXd residuals;
    double sigma2 = 0.0;  // ssr / (T - k)
    double ssr = 0.0;
    double r2 = 0.0;
    long T = 0;
    long k = 0;
    double dw = 0.0;

    int index(const std::string& name) const {
        for (std::size_t i = 0; i < names.size(); ++i)
            if (names[i] == name) return static_cast<int>(i);
        throw configuration_error("fit: unknown coefficient '" + name + "'");
    }
    double coef(const std::string& name) const { return coefficients(index(name)); }
    double std_error(const std::string& name) const {
        const int i = index(name);
        return std::sqrt(covariance(i, i));
    }
};

inline RegressionFit ols_fit(const DesignMatrix& design, const Eigen::VectorXd& y) {
    const Eigen::Index T = design.X.rows();
    const Eigen::Index k = design.X.cols();
    if (k == 0) throw configuration_error("ols: empty design");
    if (y.size() != T) throw configuration_error("ols: y length mismatch");
    if (T <= k) throw insufficient_data_error("ols: T <= k");

    Eigen::HouseholderQR<Eigen::MatrixXd> qr(design.X);
    const Eigen::MatrixXd R =
        qr.matrixQR().topRows(k).template triangularView<Eigen::Upper>();
    {
        // Singular values of X equal those of its R factor.
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(R);
        const auto& sv = svd.singularValues();
        if (!(sv(0) > 0.0) || sv(sv.size() - 1) < kCollinearityTol * sv(0))
            throw collinearity_error("ols: design matrix is rank deficient");
    }

    RegressionFit fit;
    fit.names = design.names;
    fit.coefficients = qr.solve(y);
    fit.residuals = y - design.X * fit.coefficients;
    fit.ssr = fit.residuals.squaredNorm();
    fit.T = static_cast<long>(T);
    fit.k = static_cast<long>(k);
    fit.sigma2 = fit.ssr / static_cast<double>(T - k);

    const Eigen::MatrixXd Rinv =
        R.template triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(k, k));
    fit.covariance = fit.sigma2 * (Rinv * Rinv.transpose());

    const double mean = y.mean();
    const double tss = (y.array() - mean).matrix().squaredNorm();
    fit.r2 = tss > 0.0 ? 1.0 - fit.ssr / tss : 1.0;

    if (fit.ssr > 0.0) {
        double num = 0.0;
        for (Eigen::Index t = 1; t < T; ++t) {
            const double d = fit.residuals(t) - fit.residuals(t - 1);
            num += d * d;
        }
        fit.dw = num / fit.ssr;
    } else {
        fit.dw = 2.0;  // perfect fit: no residual autocorrelation to measure
    }
    return fit;
}

/// Schwarz criterion, ln(SSR/T) + k ln(T)/T. Lower is better; only
/// comparable across fits on the same sample.
inline double schwarz_criterion(const RegressionFit& fit) {
    if (fit.sigma2 <= kDegenerateSigma2)
        throw degenerate_error("schwarz_criterion: degenerate fit (sigma2 ~ 0)");
    const double T = static_cast<double>(fit.T);
    return std::log(fit.ssr / T) + static_cast<double>(fit.k) * std::log(T) / T;
}

struct WaldResult {
    double statistic = 0.0;
    int df = 0;
    double pvalue = 1.0;
};

/// Wald test of R beta = q; statistic is asymptotically chi-square with
/// rows(R) degrees of freedom.
inline WaldResult wald_linear_restriction(const RegressionFit& fit, const Eigen::MatrixXd& R,
                                          const Eigen::VectorXd& q) {
    const Eigen::Index rows = R.rows();
    if (rows < 1 || R.cols() != fit.coefficients.size())
        throw configuration_error("wald: restriction shape mismatch");
    if (rows > fit.coefficients.size())
        throw configuration_error("wald: more restrictions than coefficients");
    if (q.size() != rows) throw configuration_error("wald: target vector shape mismatch");

    const Eigen::VectorXd d = R * fit.coefficients - q;
    const Eigen::MatrixXd S = R * fit.covariance * R.transpose();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
    const auto& ev = es.eigenvalues();
    const double emax = ev(ev.size() - 1);
    if (!(emax > 0.0) || ev(0) < 1e-12 * emax) {
        if (d.lpNorm<Eigen::Infinity>() == 0.0) {
            return WaldResult{0.0, static_cast<int>(rows), 1.0};
        }
        throw restriction_error("wald: singular restriction covariance");
    }
    const double W = d.dot(S.llt().solve(d));
    WaldResult out;
    out.statistic = std::max(0.0, W);
    out.df = static_cast<int>(rows);
    out.pvalue = chi_square_survival(out.statistic, out.df);
    return out;
}

/// Autoregressive distributed lag specification: y_t on a constant,
/// y_{t-1..p} and x_{t-0..q}.
struct AdlSpec {
    int p = 1;
    int q = 0;
    std::string y_name = "y";
    std::string x_name = "x";

    struct Term {
        std::string coefficient;
        std::string variable;
        int lag;
    };

    std::vector<Term> layout() const {
        if (p < 1 || q < 0) throw configuration_error("adl: requires p >= 1, q >= 0");
        std::vector<Term> out;
        out.push_back({"const", "", 0});
        for (int j = 1; j <= p; ++j)
            out.push_back({y_name + ".l" + std::to_string(j), y_name, j});
        for (int j = 0; j <= q; ++j)
            out.push_back({x_name + ".l" + std::to_string(j), x_name, j});
        return out;
    }
};

inline RegressionFit adl_fit(const ObservationSeries& y, const ObservationSeries& x,
                             const AdlSpec& spec) {
    validate_series(y);
    validate_series(x);
    if (y.dates != x.dates) throw configuration_error("adl: series are not on a common calendar");
    const int maxlag = std::max(spec.p, spec.q);
    const long n = static_cast<long>(y.values.size());
    if (n <= spec.p + spec.q + 2) throw insufficient_data_error("adl: series too short");

    const long rows = n - maxlag;
    AdlSpec effective = spec;
    effective.y_name = y.name.empty() ? spec.y_name : y.name;
    effective.x_name = x.name.empty() ? spec.x_name : x.name;

    DesignMatrix design;
    Eigen::VectorXd yv(rows);
    for (long t = 0; t < rows; ++t) yv(t) = y.values[static_cast<std::size_t>(t + maxlag)];
    for (const auto& term : effective.layout()) {
        std::vector<double> col(static_cast<std::size_t>(rows));
        if (term.variable.empty()) {
            std::fill(col.begin(), col.end(), 1.0);
        } else {
            const auto& src = (term.variable == effective.y_name) ? y.values : x.values;
            for (long t = 0; t < rows; ++t)
                col[static_cast<std::size_t>(t)] = src[static_cast<std::size_t>(t + maxlag - term.lag)];
        }
        design.add_column(term.coefficient, col);
    }
    return ols_fit(design, yv);
}

/// Wald test of the coefficient-sum restriction: the y lags and all x terms
/// sum to one. One degree of freedom.
inline WaldResult lop_coefficient_sum_test(const RegressionFit& fit, const AdlSpec& spec) {
    Eigen::MatrixXd R = Eigen::MatrixXd::Zero(1, fit.coefficients.size());
    int selected = 0;
    for (std::size_t i = 0; i < fit.names.size(); ++i) {
        if (fit.names[i] == "const") continue;
        R(0, static_cast<Eigen::Index>(i)) = 1.0;
        ++selected;
    }
    if (selected != spec.p + spec.q + 1)
        throw configuration_error("lop test: fit does not match the ADL specification");
    Eigen::VectorXd q(1);
    q(0) = 1.0;
    return wald_linear_restriction(fit, R, q);
}

} // namespace cointkit
