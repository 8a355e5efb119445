// vecm.hpp
// Reduced-rank estimation of the error-correction system: trace tests for
// the cointegration rank, VECM estimation at a fixed rank, likelihood-ratio
// tests of restrictions on the cointegrating vectors, and the levels-VAR
// fits behind the coefficient-sum integration tests.
//
// The eigenproblem |lambda S11 - S10 S00^{-1} S01| = 0 is solved on the
// symmetrized form via a Cholesky factor of S11, which keeps the eigenvalues
// real and inside [0, 1).

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cointkit/critical_values.hpp"
#include "cointkit/errors.hpp"
#include "cointkit/regression.hpp"
#include "cointkit/series.hpp"
#include "cointkit/stats.hpp"

namespace cointkit {

/// Treatment of the constant: inside the cointegrating relation (restricted)
/// or as a free intercept in the differenced equations (unrestricted).
enum class VecmDeterministic { restricted_constant, unrestricted_constant };

inline const char* to_string(VecmDeterministic d) {
    return d == VecmDeterministic::restricted_constant ? "restricted_constant"
                                                       : "unrestricted_constant";
}

namespace detail {

// Concentrated moment matrices of the reduced-rank regression.
struct JohansenMoments {
    Eigen::MatrixXd S00, S01, S11;  // S10 = S01'
    long T = 0;                     // effective sample
    int i = 0;                      // system dimension
    int levels_dim = 0;             // rows of the (possibly augmented) level block
    Eigen::MatrixXd R0, R1;         // concentrated residuals (columns are time)
    Eigen::MatrixXd Z2;             // short-run regressors (columns are time)
    Eigen::MatrixXd M02, M22, M12;  // for recovering short-run coefficients
};

inline Eigen::MatrixXd panel_matrix(const MarketPanel& panel) {
    const int i = static_cast<int>(panel.dims());
    const long T = static_cast<long>(panel.size());
    Eigen::MatrixXd X(i, T);
    for (int d = 0; d < i; ++d)
        for (long t = 0; t < T; ++t) X(d, t) = panel.series[d].values[t];
    return X;
}

inline JohansenMoments concentrate(const Eigen::MatrixXd& X, int p, VecmDeterministic det) {
    const int i = static_cast<int>(X.rows());
    const long T_total = X.cols();
    const long T = T_total - p;
    if (T < 2 * i + 3) throw insufficient_data_error("johansen: effective sample too small");

    JohansenMoments m;
    m.T = T;
    m.i = i;
    const bool restricted = det == VecmDeterministic::restricted_constant;
    m.levels_dim = i + (restricted ? 1 : 0);

    Eigen::MatrixXd Z0(i, T);             // Dx_t
    Eigen::MatrixXd Z1(m.levels_dim, T);  // x_{t-1} (+ 1 when restricted)
    const int short_run = i * (p - 1) + (restricted ? 0 : 1);
    Eigen::MatrixXd Z2(std::max(short_run, 1), T);

    for (long s = 0; s < T; ++s) {
        const long t = s + p;
        Z0.col(s) = X.col(t) - X.col(t - 1);
        Z1.col(s).head(i) = X.col(t - 1);
        if (restricted) Z1(i, s) = 1.0;
        int row = 0;
        for (int k = 1; k <= p - 1; ++k) {
            Z2.block(row, s, i, 1) = X.col(t - k) - X.col(t - k - 1);
            row += i;
        }
        if (!restricted) Z2(row, s) = 1.0;
    }

    if (short_run > 0) {
        m.Z2 = Z2.topRows(short_run);
        const Eigen::MatrixXd M22 = m.Z2 * m.Z2.transpose() / static_cast<double>(T);
        const Eigen::MatrixXd M02 = Z0 * m.Z2.transpose() / static_cast<double>(T);
        const Eigen::MatrixXd M12 = Z1 * m.Z2.transpose() / static_cast<double>(T);
        Eigen::LLT<Eigen::MatrixXd> llt(M22);
        if (llt.info() != Eigen::Success)
            throw collinearity_error("johansen: singular short-run moment matrix");
        m.R0 = Z0 - M02 * llt.solve(m.Z2);
        m.R1 = Z1 - M12 * llt.solve(m.Z2);
        m.M02 = M02;
        m.M22 = M22;
        m.M12 = M12;
    } else {
        m.R0 = Z0;
        m.R1 = Z1;
    }
    m.S00 = m.R0 * m.R0.transpose() / static_cast<double>(T);
    m.S01 = m.R0 * m.R1.transpose() / static_cast<double>(T);
    m.S11 = m.R1 * m.R1.transpose() / static_cast<double>(T);
    return m;
}

struct EigenSolution {
    std::vector<double> eigenvalues;  // descending
    Eigen::MatrixXd vectors;          // columns aligned with eigenvalues
};

// Eigenvalues/vectors of S11^{-1} S10 S00^{-1} S01 via the symmetrized form.
inline EigenSolution reduced_rank_eigen(const Eigen::MatrixXd& S00, const Eigen::MatrixXd& S01,
                                        const Eigen::MatrixXd& S11) {
    Eigen::LLT<Eigen::MatrixXd> llt11(S11);
    if (llt11.info() != Eigen::Success)
        throw collinearity_error("johansen: S11 is not positive definite");
    Eigen::LLT<Eigen::MatrixXd> llt00(S00);
    if (llt00.info() != Eigen::Success)
        throw collinearity_error("johansen: S00 is not positive definite");

    const Eigen::MatrixXd L = llt11.matrixL();
    const Eigen::MatrixXd A = S01.transpose();  // S10
    const Eigen::MatrixXd inner = A * llt00.solve(S01);  // S10 S00^{-1} S01
    const Eigen::MatrixXd Linv_inner =
        L.triangularView<Eigen::Lower>().solve(inner);
    const Eigen::MatrixXd W =
        L.triangularView<Eigen::Lower>().solve(Linv_inner.transpose()).transpose();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (W + W.transpose()));
    if (es.info() != Eigen::Success) throw collinearity_error("johansen: eigensolver failed");

    const Eigen::Index n = S11.rows();
    EigenSolution out;
    out.eigenvalues.resize(static_cast<std::size_t>(n));
    out.vectors.resize(n, n);
    // Eigen returns ascending order; flip to descending and map back through L'.
    for (Eigen::Index j = 0; j < n; ++j) {
        const Eigen::Index src = n - 1 - j;
        double lambda = es.eigenvalues()(src);
        lambda = std::min(std::max(lambda, 0.0), 1.0 - 1e-15);
        out.eigenvalues[static_cast<std::size_t>(j)] = lambda;
        out.vectors.col(j) =
            L.transpose().triangularView<Eigen::Upper>().solve(es.eigenvectors().col(src));
    }
    return out;
}

} // namespace detail

struct RankTestOutcome {
    std::vector<double> eigenvalues;  // lambda_1 >= ... >= lambda_i, in [0,1)
    std::vector<double> trace_stats;  // index r = 0..i-1; the r = i entry is 0 by definition
    std::vector<CriticalValueMap> critical_values;  // per candidate rank
    int selected_rank = 0;  // smallest r whose trace statistic is not rejected
    double level = 0.05;
    long effective_T = 0;
    VecmDeterministic deterministic = VecmDeterministic::restricted_constant;
};

/// Johansen trace test over candidate ranks.
inline RankTestOutcome johansen_rank_test(const MarketPanel& panel, int p,
                                          VecmDeterministic det, double level = 0.05) {
    const int i = static_cast<int>(panel.dims());
    const long T = static_cast<long>(panel.size());
    if (p < 1) throw configuration_error("johansen: p must be >= 1");
    if (T <= static_cast<long>(i) * p + 10)
        throw insufficient_data_error("johansen: need T > i*p + 10");

    const auto X = detail::panel_matrix(panel);
    const auto m = detail::concentrate(X, p, det);
    const auto eig = detail::reduced_rank_eigen(m.S00, m.S01, m.S11);

    RankTestOutcome out;
    out.level = level;
    out.effective_T = m.T;
    out.deterministic = det;
    out.eigenvalues.assign(eig.eigenvalues.begin(), eig.eigenvalues.begin() + i);

    out.trace_stats.resize(static_cast<std::size_t>(i));
    for (int r = 0; r < i; ++r) {
        double acc = 0.0;
        for (int j = r; j < i; ++j) acc += std::log(1.0 - out.eigenvalues[j]);
        out.trace_stats[r] = -static_cast<double>(m.T) * acc;
    }
    const bool restricted = det == VecmDeterministic::restricted_constant;
    out.critical_values.resize(static_cast<std::size_t>(i));
    out.selected_rank = i;
    for (int r = 0; r < i; ++r) {
        CriticalValueMap cvs;
        for (double lv : {0.01, 0.05, 0.10})
            cvs[lv] = johansen_trace_critical_value(i - r, restricted, lv);
        out.critical_values[r] = cvs;
        if (out.selected_rank == i && out.trace_stats[r] < cvs.at(level)) out.selected_rank = r;
    }
    return out;
}

struct VecmModel {
    int p = 2;
    int r = 1;
    VecmDeterministic deterministic = VecmDeterministic::restricted_constant;
    std::vector<std::string> names;  // variable order
    Eigen::MatrixXd alpha;           // i x r loadings
    Eigen::MatrixXd beta;            // levels_dim x r, numeraire-normalized
    std::vector<Eigen::MatrixXd> gamma;  // short-run matrices Gamma_1..Gamma_{p-1}
    Eigen::VectorXd mu;              // intercept of the differenced equations
    Eigen::MatrixXd sigma;           // residual covariance
    Eigen::MatrixXd residuals;       // T' x i
    Eigen::MatrixXd beta_cov;        // covariance of the free beta elements
    std::vector<double> eigenvalues; // of the unrestricted problem (descending)
    long effective_T = 0;
    int levels_dim = 0;              // i, or i+1 with the restricted constant

    // Moment matrices retained for likelihood-ratio restriction tests.
    Eigen::MatrixXd S00, S01, S11;

    /// Standard error of beta(row, col); zero rows pinned by normalization.
    double beta_std_error(int row, int col) const {
        const int free_rows = levels_dim - r;
        if (row < r) return 0.0;
        const int idx = col * free_rows + (row - r);
        return std::sqrt(beta_cov(idx, idx));
    }
};

/// Estimates the error-correction system at a fixed cointegration rank.
/// beta is normalized so its leading r x r block is the identity: relation j
/// carries a unit coefficient on variable j (for r = 1, the first variable in
/// panel order is the numeraire).
inline VecmModel vecm_estimate(const MarketPanel& panel, int p, int r, VecmDeterministic det) {
    const int i = static_cast<int>(panel.dims());
    if (r < 1 || r >= i)
        throw rank_error("vecm: rank must lie in 1..i-1 (the loading matrix cannot be regular)");
    const long T = static_cast<long>(panel.size());
    if (p < 1) throw configuration_error("vecm: p must be >= 1");
    if (T <= static_cast<long>(i) * p + 10)
        throw insufficient_data_error("vecm: need T > i*p + 10");

    const auto X = detail::panel_matrix(panel);
    const auto m = detail::concentrate(X, p, det);
    const auto eig = detail::reduced_rank_eigen(m.S00, m.S01, m.S11);

    VecmModel model;
    model.p = p;
    model.r = r;
    model.deterministic = det;
    model.names = panel.names();
    model.effective_T = m.T;
    model.levels_dim = m.levels_dim;
    model.eigenvalues = eig.eigenvalues;
    model.S00 = m.S00;
    model.S01 = m.S01;
    model.S11 = m.S11;

    Eigen::MatrixXd beta_raw = eig.vectors.leftCols(r);
    const Eigen::MatrixXd top = beta_raw.topRows(r);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(top);
    if (!lu.isInvertible())
        throw degenerate_error("vecm: numeraire normalization failed (singular leading block)");
    model.beta = beta_raw * lu.inverse();

    // alpha and the short-run matrices by least squares given beta.
    const Eigen::MatrixXd ec = model.beta.transpose() * m.R1;  // r x T
    const Eigen::MatrixXd Secc = ec * ec.transpose() / static_cast<double>(m.T);
    const Eigen::MatrixXd S0e = m.R0 * ec.transpose() / static_cast<double>(m.T);
    Eigen::LLT<Eigen::MatrixXd> llt(Secc);
    if (llt.info() != Eigen::Success)
        throw collinearity_error("vecm: singular error-correction moment matrix");
    model.alpha = llt.solve(S0e.transpose()).transpose();  // i x r

    // Short-run block: Psi = (M02 - alpha beta' M12) M22^{-1}.
    const int short_run = i * (p - 1) + (det == VecmDeterministic::unrestricted_constant ? 1 : 0);
    Eigen::MatrixXd psi;
    if (short_run > 0) {
        const Eigen::MatrixXd lhs = m.M02 - model.alpha * model.beta.transpose() * m.M12;
        Eigen::LLT<Eigen::MatrixXd> llt22(m.M22);
        if (llt22.info() != Eigen::Success)
            throw collinearity_error("vecm: singular short-run moment matrix");
        psi = llt22.solve(lhs.transpose()).transpose();  // i x short_run
        for (int k = 0; k < p - 1; ++k)
            model.gamma.push_back(psi.block(0, k * i, i, i));
    }

    if (det == VecmDeterministic::unrestricted_constant && short_run > 0)
        model.mu = psi.col(short_run - 1);
    else if (det == VecmDeterministic::restricted_constant)
        model.mu = model.alpha * model.beta.row(i).transpose();
    else
        model.mu = Eigen::VectorXd::Zero(i);

    // Residuals of the full system on the concentrated sample.
    const long Tt = m.T;
    Eigen::MatrixXd fitted = model.alpha * (model.beta.transpose() * m.R1);
    Eigen::MatrixXd E = m.R0 - fitted;  // i x T
    model.residuals = E.transpose();
    model.sigma = E * E.transpose() / static_cast<double>(Tt);

    // Covariance of the free beta rows: (alpha' Sigma^{-1} alpha)^{-1} kron
    // (H' (T S11) H)^{-1}, H spanning the non-normalized rows.
    {
        const int free_rows = m.levels_dim - r;
        Eigen::MatrixXd H = Eigen::MatrixXd::Zero(m.levels_dim, free_rows);
        H.bottomRows(free_rows).setIdentity();
        Eigen::LLT<Eigen::MatrixXd> llt_sigma(model.sigma);
        if (llt_sigma.info() != Eigen::Success)
            throw collinearity_error("vecm: singular residual covariance");
        const Eigen::MatrixXd a_info = model.alpha.transpose() * llt_sigma.solve(model.alpha);
        const Eigen::MatrixXd a_info_inv = a_info.llt().solve(Eigen::MatrixXd::Identity(r, r));
        const Eigen::MatrixXd h_info =
            H.transpose() * (static_cast<double>(Tt) * m.S11) * H;
        const Eigen::MatrixXd h_info_inv =
            h_info.llt().solve(Eigen::MatrixXd::Identity(free_rows, free_rows));
        model.beta_cov.resize(r * free_rows, r * free_rows);
        for (int a = 0; a < r; ++a)
            for (int b = 0; b < r; ++b)
                model.beta_cov.block(a * free_rows, b * free_rows, free_rows, free_rows) =
                    a_info_inv(a, b) * h_info_inv;
    }
    return model;
}

/// Level-VAR matrices implied by the error-correction form:
/// A_1 = I + alpha beta_x' + Gamma_1, A_k = Gamma_k - Gamma_{k-1},
/// A_p = -Gamma_{p-1}.
inline std::vector<Eigen::MatrixXd> implied_var_matrices(const VecmModel& model) {
    const int i = static_cast<int>(model.names.size());
    const Eigen::MatrixXd pi = model.alpha * model.beta.topRows(i).transpose();
    std::vector<Eigen::MatrixXd> A;
    if (model.p == 1) {
        A.push_back(Eigen::MatrixXd::Identity(i, i) + pi);
        return A;
    }
    A.push_back(Eigen::MatrixXd::Identity(i, i) + pi + model.gamma.front());
    for (int k = 2; k <= model.p - 1; ++k)
        A.push_back(model.gamma[static_cast<std::size_t>(k - 1)] -
                    model.gamma[static_cast<std::size_t>(k - 2)]);
    A.push_back(-model.gamma.back());
    return A;
}

/// Likelihood-ratio test of homogeneous restrictions R beta = 0 applied to
/// every cointegrating relation. The restricted eigenproblem is solved in
/// the column space of the null-space basis of R.
inline WaldResult beta_restriction_test(const VecmModel& model, const Eigen::MatrixXd& R) {
    if (R.cols() != model.levels_dim)
        throw restriction_error("beta restriction: column count must match the beta rows");
    if (R.rows() < 1) throw restriction_error("beta restriction: empty restriction");

    Eigen::FullPivLU<Eigen::MatrixXd> lu(R);
    const int q = static_cast<int>(lu.rank());
    if (q < 1) throw restriction_error("beta restriction: restriction matrix has rank zero");
    const int s = model.levels_dim - q;
    if (s < model.r)
        throw restriction_error("beta restriction: restricted space too small for the rank");
    const Eigen::MatrixXd H = lu.kernel();  // levels_dim x s

    const auto restricted = detail::reduced_rank_eigen(
        model.S00, model.S01 * H, H.transpose() * model.S11 * H);

    // Restricted eigenvalues cannot exceed the unrestricted ones, so the
    // log-likelihood gap below is nonnegative up to rounding.
    double stat = 0.0;
    for (int j = 0; j < model.r; ++j) {
        stat += std::log(1.0 - restricted.eigenvalues[static_cast<std::size_t>(j)]) -
                std::log(1.0 - model.eigenvalues[static_cast<std::size_t>(j)]);
    }
    stat *= static_cast<double>(model.effective_T);
    if (stat < 0.0 && stat > -1e-9) stat = 0.0;

    WaldResult out;
    out.statistic = stat;
    out.df = model.r * q;
    out.pvalue = chi_square_survival(std::max(0.0, stat), out.df);
    return out;
}

/// Restriction row asserting proportional transmission between two variables
/// of a system: beta_j + beta_k = 0, i.e. (1, -1) after normalizing on j.
inline Eigen::MatrixXd pair_proportionality_restriction(int levels_dim, int j, int k) {
    Eigen::MatrixXd R = Eigen::MatrixXd::Zero(1, levels_dim);
    R(0, j) = 1.0;
    R(0, k) = 1.0;
    return R;
}

/// Restriction row asserting the normalized relation's variable weights sum
/// to zero: beta_1 = 1 and the rest sum to -1.
inline Eigen::MatrixXd sum_to_zero_restriction(int levels_dim, int variables) {
    Eigen::MatrixXd R = Eigen::MatrixXd::Zero(1, levels_dim);
    for (int v = 0; v < variables; ++v) R(0, v) = 1.0;
    return R;
}

/// Structured text dump of an estimated model: loadings, normalized vectors,
/// short-run matrices, residual covariance and the eigenvalue spectrum. The
/// report writer embeds this verbatim.
inline std::string dump_model(const VecmModel& model) {
    std::ostringstream os;
    char buf[64];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%12.5f", v);
        return std::string(buf);
    };
    const int i = static_cast<int>(model.names.size());
    os << "vecm: p = " << model.p << ", r = " << model.r << ", "
       << to_string(model.deterministic) << ", T' = " << model.effective_T << '\n';
    os << "alpha (loadings):\n";
    for (int v = 0; v < i; ++v) {
        os << "  " << model.names[v] << ':';
        for (int c = 0; c < model.r; ++c) os << num(model.alpha(v, c));
        os << '\n';
    }
    os << "beta (normalized):\n";
    for (int v = 0; v < model.levels_dim; ++v) {
        os << "  " << (v < i ? model.names[v] : std::string("const")) << ':';
        for (int c = 0; c < model.r; ++c) os << num(model.beta(v, c));
        os << '\n';
    }
    for (std::size_t k = 0; k < model.gamma.size(); ++k) {
        os << "gamma_" << (k + 1) << ":\n";
        for (int v = 0; v < i; ++v) {
            os << "  " << model.names[v] << ':';
            for (int c = 0; c < i; ++c) os << num(model.gamma[k](v, c));
            os << '\n';
        }
    }
    os << "mu (intercepts):";
    for (int v = 0; v < i; ++v) os << num(model.mu(v));
    os << '\n';
    os << "sigma (residual covariance):\n";
    for (int v = 0; v < i; ++v) {
        os << "  " << model.names[v] << ':';
        for (int c = 0; c < i; ++c) os << num(model.sigma(v, c));
        os << '\n';
    }
    os << "eigenvalues:";
    for (double l : model.eigenvalues) os << num(l);
    os << '\n';
    return os.str();
}

struct VarFit {
    std::vector<RegressionFit> equations;  // one per variable, identical regressors
    std::vector<std::string> names;        // variable order
    int p = 1;
    bool includes_constant = true;
    long effective_T = 0;
};

/// Equation-by-equation OLS of each variable on p lags of all variables.
inline VarFit levels_var_fit(const MarketPanel& panel, int p, bool include_constant = true) {
    const int i = static_cast<int>(panel.dims());
    const long T = static_cast<long>(panel.size());
    if (p < 1) throw configuration_error("levels var: p must be >= 1");
    const long k = static_cast<long>(i) * p + (include_constant ? 1 : 0);
    if (T - p < k + 3) throw insufficient_data_error("levels var: sample too short to estimate");

    const long rows = T - p;
    DesignMatrix design;
    std::vector<double> col(static_cast<std::size_t>(rows));
    if (include_constant) {
        std::fill(col.begin(), col.end(), 1.0);
        design.add_column("const", col);
    }
    for (int k = 1; k <= p; ++k) {
        for (int v = 0; v < i; ++v) {
            for (long t = 0; t < rows; ++t)
                col[static_cast<std::size_t>(t)] =
                    panel.series[v].values[static_cast<std::size_t>(t + p - k)];
            design.add_column(panel.series[v].name + ".l" + std::to_string(k), col);
        }
    }

    VarFit out;
    out.names = panel.names();
    out.p = p;
    out.includes_constant = include_constant;
    out.effective_T = rows;
    for (int v = 0; v < i; ++v) {
        Eigen::VectorXd y(rows);
        for (long t = 0; t < rows; ++t)
            y(t) = panel.series[v].values[static_cast<std::size_t>(t + p)];
        out.equations.push_back(ols_fit(design, y));
    }
    return out;
}

struct VarSumTest {
    double sum = 0.0;
    double statistic = 0.0;
    int df = 1;
    double pvalue = 1.0;
    long effective_T = 0;
};

/// Wald test that the lag coefficients of one levels-VAR equation sum to one.
/// The equation is estimated without a free constant by default, matching a
/// system whose constant lives inside the cointegrating relation.
inline VarSumTest var_sum_integration_test(const MarketPanel& panel, int p, int equation_index,
                                           bool include_constant = false) {
    const int i = static_cast<int>(panel.dims());
    if (equation_index < 0 || equation_index >= i)
        throw configuration_error("var sum test: equation index out of range");
    const auto var = levels_var_fit(panel, p, include_constant);
    const auto& fit = var.equations[static_cast<std::size_t>(equation_index)];

    Eigen::MatrixXd R = Eigen::MatrixXd::Zero(1, fit.coefficients.size());
    double sum = 0.0;
    for (std::size_t c = 0; c < fit.names.size(); ++c) {
        if (fit.names[c] == "const") continue;
        R(0, static_cast<Eigen::Index>(c)) = 1.0;
        sum += fit.coefficients(static_cast<Eigen::Index>(c));
    }
    Eigen::VectorXd target(1);
    target << 1.0;
    const auto wald = wald_linear_restriction(fit, R, target);

    VarSumTest out;
    out.sum = sum;
    out.statistic = wald.statistic;
    out.df = wald.df;
    out.pvalue = wald.pvalue;
    out.effective_T = var.effective_T;
    return out;
}

} // namespace cointkit
