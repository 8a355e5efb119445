// causality.hpp
// Granger causality tests in levels VARs and in error-correction form, and
// the all-pairs causality matrix.

#pragma once

#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "cointkit/errors.hpp"
#include "cointkit/parallel.hpp"
#include "cointkit/regression.hpp"
#include "cointkit/series.hpp"
#include "cointkit/stats.hpp"
#include "cointkit/vecm.hpp"

namespace cointkit {

enum class CausalityMode { levels_var, vecm };

inline const char* to_string(CausalityMode m) {
    return m == CausalityMode::levels_var ? "levels_var" : "vecm";
}

struct CausalityOutcome {
    std::string cause;
    std::string effect;
    double statistic = 0.0;  // F form
    int df_num = 0;
    int df_den = 0;
    double pvalue = 1.0;
    bool includes_ec_term = false;
    int lag_order = 0;
    double chi_square = 0.0;  // q * F, the asymptotic Wald equivalent
    long effective_T = 0;
};

namespace detail {

struct CausalityDesign {
    DesignMatrix unrestricted;
    DesignMatrix restricted;
    Eigen::VectorXd y;
    int dropped = 0;  // coefficients excluded under the null
};

inline int lag_for(const std::map<std::string, int>& lag_map, const std::string& name,
                   int fallback) {
    const auto it = lag_map.find(name);
    return it == lag_map.end() ? fallback : it->second;
}

// Levels VAR design for the effect equation, with and without the cause.
inline CausalityDesign levels_design(const MarketPanel& panel, const std::string& cause,
                                     const std::string& effect, int p,
                                     const std::map<std::string, int>& lag_map) {
    int max_lag = 0;
    for (const auto& s : panel.series) max_lag = std::max(max_lag, lag_for(lag_map, s.name, p));
    const long T = static_cast<long>(panel.size());
    const long rows = T - max_lag;
    if (rows < 10) throw insufficient_data_error("granger: effective sample too small");

    CausalityDesign d;
    d.y.resize(rows);
    const auto& ev = panel.at(effect).values;
    for (long t = 0; t < rows; ++t) d.y(t) = ev[static_cast<std::size_t>(t + max_lag)];

    std::vector<double> col(static_cast<std::size_t>(rows), 1.0);
    d.unrestricted.add_column("const", col);
    d.restricted.add_column("const", col);
    for (const auto& s : panel.series) {
        const int lags = lag_for(lag_map, s.name, p);
        for (int k = 1; k <= lags; ++k) {
            for (long t = 0; t < rows; ++t)
                col[static_cast<std::size_t>(t)] = s.values[static_cast<std::size_t>(t + max_lag - k)];
            const std::string name = s.name + ".l" + std::to_string(k);
            d.unrestricted.add_column(name, col);
            if (s.name != cause)
                d.restricted.add_column(name, col);
            else
                ++d.dropped;
        }
    }
    return d;
}

// Error-correction design: differences with p-1 lags plus the lagged
// equilibrium deviations; the null drops the cause's lags and the loadings.
inline CausalityDesign vecm_design(const MarketPanel& panel, const std::string& cause,
                                   const std::string& effect, const VecmModel& model) {
    const int p = model.p;
    const int i = static_cast<int>(panel.dims());
    const long T = static_cast<long>(panel.size());
    const long rows = T - p;
    if (rows < 10) throw insufficient_data_error("granger: effective sample too small");

    CausalityDesign d;
    d.y.resize(rows);
    const auto& ev = panel.at(effect).values;
    for (long t = 0; t < rows; ++t)
        d.y(t) = ev[static_cast<std::size_t>(t + p)] - ev[static_cast<std::size_t>(t + p - 1)];

    std::vector<double> col(static_cast<std::size_t>(rows));
    if (model.deterministic == VecmDeterministic::unrestricted_constant) {
        std::fill(col.begin(), col.end(), 1.0);
        d.unrestricted.add_column("const", col);
        d.restricted.add_column("const", col);
    }
    for (const auto& s : panel.series) {
        for (int k = 1; k <= p - 1; ++k) {
            for (long t = 0; t < rows; ++t)
                col[static_cast<std::size_t>(t)] =
                    s.values[static_cast<std::size_t>(t + p - k)] -
                    s.values[static_cast<std::size_t>(t + p - k - 1)];
            const std::string name = "d." + s.name + ".l" + std::to_string(k);
            d.unrestricted.add_column(name, col);
            if (s.name != cause)
                d.restricted.add_column(name, col);
            else
                ++d.dropped;
        }
    }
    // Lagged equilibrium deviations beta' x*_{t-1}.
    for (int rel = 0; rel < model.r; ++rel) {
        for (long t = 0; t < rows; ++t) {
            double acc = 0.0;
            for (int v = 0; v < i; ++v)
                acc += model.beta(v, rel) * panel.series[v].values[static_cast<std::size_t>(t + p - 1)];
            if (model.levels_dim > i) acc += model.beta(i, rel);
            col[static_cast<std::size_t>(t)] = acc;
        }
        d.unrestricted.add_column("ec" + std::to_string(rel + 1), col);
        ++d.dropped;
    }
    return d;
}

} // namespace detail

/// F test of the null that `cause` does not Granger-cause `effect`. In
/// levels mode the null removes all lags of the cause from the effect's VAR
/// equation; in error-correction mode it removes the cause's difference lags
/// and the equilibrium loadings.
inline CausalityOutcome granger_test(const MarketPanel& panel, const std::string& cause,
                                     const std::string& effect, int p, CausalityMode mode,
                                     const VecmModel* model = nullptr,
                                     const std::map<std::string, int>& lag_map = {}) {
    if (cause == effect) throw configuration_error("granger: cause and effect must differ");
    if (!panel.has(cause) || !panel.has(effect))
        throw configuration_error("granger: unknown market in (" + cause + ", " + effect + ")");
    if (p < 1) throw configuration_error("granger: p must be >= 1");

    detail::CausalityDesign d;
    if (mode == CausalityMode::levels_var) {
        d = detail::levels_design(panel, cause, effect, p, lag_map);
    } else {
        if (model == nullptr || model->r < 1)
            throw configuration_error("granger: vecm mode needs a fitted model with rank >= 1");
        if (model->p != p)
            throw configuration_error("granger: lag order does not match the fitted model");
        d = detail::vecm_design(panel, cause, effect, *model);
    }

    const auto unrestricted = ols_fit(d.unrestricted, d.y);
    const auto restricted = ols_fit(d.restricted, d.y);
    const int q = d.dropped;
    const long df_den = unrestricted.T - unrestricted.k;

    CausalityOutcome out;
    out.cause = cause;
    out.effect = effect;
    out.includes_ec_term = mode == CausalityMode::vecm;
    out.lag_order = p;
    out.df_num = q;
    out.df_den = static_cast<int>(df_den);
    out.effective_T = unrestricted.T;
    const double num = std::max(0.0, restricted.ssr - unrestricted.ssr) / q;
    const double den = unrestricted.ssr / static_cast<double>(df_den);
    if (!(den > 0.0)) throw degenerate_error("granger: unrestricted fit has zero variance");
    out.statistic = num / den;
    out.chi_square = out.statistic * q;
    out.pvalue = f_survival(out.statistic, out.df_num, out.df_den);
    return out;
}

/// All ordered pairs (cause, effect). Cells are independent; evaluation may
/// be concurrent and assembles deterministically in row-major pair order.
inline std::vector<CausalityOutcome> causality_matrix(const MarketPanel& panel, int p,
                                                      CausalityMode mode,
                                                      const VecmModel* model = nullptr) {
    const int i = static_cast<int>(panel.dims());
    if (i < 2) throw configuration_error("causality matrix: need at least two markets");
    std::vector<std::pair<int, int>> pairs;
    for (int a = 0; a < i; ++a)
        for (int b = 0; b < i; ++b)
            if (a != b) pairs.emplace_back(a, b);

    std::vector<CausalityOutcome> out(pairs.size());
    parallel_for_index(pairs.size(), [&](std::size_t idx) {
        out[idx] = granger_test(panel, panel.series[pairs[idx].first].name,
                                panel.series[pairs[idx].second].name, p, mode, model);
    });
    return out;
}

/// Cause-row / effect-column CSV with significance stars at 5% and 1%.
inline void write_causality_csv(const std::vector<CausalityOutcome>& cells,
                                const std::vector<std::string>& names, std::ostream& os) {
    std::map<std::pair<std::string, std::string>, const CausalityOutcome*> index;
    for (const auto& c : cells) index[{c.cause, c.effect}] = &c;
    os << "cause";
    for (const auto& n : names) os << ',' << n;
    os << '\n';
    char buf[64];
    for (const auto& row : names) {
        os << row;
        for (const auto& colname : names) {
            if (row == colname) {
                os << ",-";
                continue;
            }
            const auto* cell = index.at({row, colname});
            const char* stars = cell->pvalue < 0.01 ? " **" : (cell->pvalue < 0.05 ? " *" : "");
            std::snprintf(buf, sizeof(buf), ",%.5f%s", cell->statistic, stars);
            os << buf;
        }
        os << '\n';
    }
}

} // namespace cointkit
