// nested_ls.hpp
// Cross-product-matrix least squares for the lag-selection hot loops.
// One symmetric elimination sweep over the bordered Gram matrix [Z y]'[Z y]
// yields the residual sum of squares for every nested column prefix, so a
// Schwarz-criterion search over lag orders costs a single pass over the data.

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <vector>

namespace cointkit::detail {

/// SSR of y regressed on the first j columns of Z, for j = 0..k, from the
/// bordered Gram matrix G = [Z y]'[Z y]. Entries become NaN once an
/// elimination pivot collapses (numerically collinear prefix). Regressor
/// columns are scaled to unit diagonal first; the projection residual is
/// invariant to column scale, and mixed-magnitude designs (trend columns)
/// keep full precision.
inline std::vector<double> prefix_ssr_from_gram(Eigen::MatrixXd G) {
    const Eigen::Index k = G.rows() - 1;
    std::vector<double> ssr(static_cast<std::size_t>(k) + 1,
                            std::numeric_limits<double>::quiet_NaN());
    ssr[0] = G(k, k);
    Eigen::VectorXd d_scale = Eigen::VectorXd::Ones(k + 1);
    for (Eigen::Index j = 0; j < k; ++j)
        if (G(j, j) > 0.0) d_scale(j) = 1.0 / std::sqrt(G(j, j));
    for (Eigen::Index r = 0; r <= k; ++r)
        for (Eigen::Index c = 0; c <= k; ++c) G(r, c) *= d_scale(r) * d_scale(c);

    for (Eigen::Index j = 0; j < k; ++j) {
        const double d = G(j, j);
        if (!(d > 1e-13)) break;  // scaled diagonal starts at 1
        for (Eigen::Index r = j + 1; r <= k; ++r) {
            const double f = G(r, j) / d;
            if (f == 0.0) continue;
            for (Eigen::Index c = j + 1; c <= k; ++c) G(r, c) -= f * G(j, c);
        }
        ssr[static_cast<std::size_t>(j) + 1] = std::max(0.0, G(k, k));
    }
    return ssr;
}

struct GramFit {
    Eigen::VectorXd coefficients;
    double ssr = 0.0;
    long T = 0;
    long k = 0;
    bool ok = false;
    Eigen::LLT<Eigen::MatrixXd> llt;  // factor of the equilibrated Z'Z
    Eigen::VectorXd scale;            // column scales used for equilibration

    double sigma2() const { return ssr / static_cast<double>(T - k); }

    /// t-ratio of coefficient j against zero.
    double t_stat(Eigen::Index j) const { return t_stat_against(j, 0.0); }

    /// t-ratio of coefficient j against a hypothesized value.
    double t_stat_against(Eigen::Index j, double hypothesis) const {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(coefficients.size());
        e(j) = 1.0;
        const double vjj = llt.solve(e)(j) * scale(j) * scale(j);
        return (coefficients(j) - hypothesis) / std::sqrt(sigma2() * vjj);
    }
};

/// Least squares through the normal equations with diagonal equilibration,
/// for hot loops working from cross products. Gxx = Z'Z, gxy = Z'y, yy = y'y.
inline GramFit solve_gram(const Eigen::MatrixXd& Gxx, const Eigen::VectorXd& gxy, double yy,
                          long T) {
    GramFit fit;
    fit.T = T;
    fit.k = Gxx.rows();
    fit.scale = Eigen::VectorXd::Ones(fit.k);
    for (Eigen::Index j = 0; j < Gxx.rows(); ++j)
        if (Gxx(j, j) > 0.0) fit.scale(j) = 1.0 / std::sqrt(Gxx(j, j));
    const Eigen::MatrixXd G =
        fit.scale.asDiagonal() * Gxx * fit.scale.asDiagonal();
    const Eigen::VectorXd g = fit.scale.asDiagonal() * gxy;
    fit.llt.compute(G);
    if (fit.llt.info() != Eigen::Success) return fit;
    const Eigen::VectorXd b = fit.llt.solve(g);
    fit.coefficients = fit.scale.asDiagonal() * b;
    fit.ssr = std::max(0.0, yy - b.dot(g));
    fit.ok = true;
    return fit;
}

} // namespace cointkit::detail
