// series.hpp
// Market panels and the elementary transforms every test consumes: rebasing,
// log transform, differencing, lagging, closing-time alignment, and
// descriptive statistics.
//
// All types are immutable after construction and every operation is a pure
// function returning a fresh value, so concurrent use needs no coordination.

#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include "cointkit/dates.hpp"
#include "cointkit/errors.hpp"

namespace cointkit {

/// One market's level series on its own trading calendar.
struct ObservationSeries {
    std::string name;
    std::vector<std::string> dates;   // strictly increasing, no duplicates
    std::vector<double> values;       // finite, same length as dates
    std::vector<std::string> provenance;  // transform chain, oldest first
};

inline void validate_series(const ObservationSeries& s) {
    if (s.dates.size() != s.values.size())
        throw configuration_error("series '" + s.name + "': dates/values length mismatch");
    if (s.dates.empty())
        throw insufficient_data_error("series '" + s.name + "': empty");
    for (std::size_t i = 0; i < s.dates.size(); ++i) {
        if (!std::isfinite(s.values[i]))
            throw domain_error("series '" + s.name + "': non-finite value at " + s.dates[i]);
        if (i > 0 && !(s.dates[i - 1] < s.dates[i]))
            throw configuration_error("series '" + s.name + "': dates not strictly increasing at " +
                                      s.dates[i]);
    }
}

/// Aligned multivariate panel; every member series shares `calendar`.
struct MarketPanel {
    std::vector<ObservationSeries> series;
    std::vector<std::string> calendar;

    std::size_t size() const { return calendar.size(); }
    std::size_t dims() const { return series.size(); }

    std::vector<std::string> names() const {
        std::vector<std::string> out;
        out.reserve(series.size());
        for (const auto& s : series) out.push_back(s.name);
        return out;
    }

    const ObservationSeries& at(const std::string& name) const {
        for (const auto& s : series)
            if (s.name == name) return s;
        throw configuration_error("panel: unknown market '" + name + "'");
    }

    bool has(const std::string& name) const {
        for (const auto& s : series)
            if (s.name == name) return true;
        return false;
    }
};

/// Builds a panel from per-market series by inner join on dates. Dates absent
/// from any market are dropped; nothing is interpolated.
inline MarketPanel make_panel(std::vector<ObservationSeries> input) {
    if (input.empty()) throw configuration_error("panel: needs at least one series");
    {
        std::unordered_set<std::string> seen;
        for (const auto& s : input) {
            validate_series(s);
            if (!seen.insert(s.name).second)
                throw configuration_error("panel: duplicate market name '" + s.name + "'");
        }
    }
    // Intersection of calendars, preserving order of the first series.
    std::vector<std::string> common = input.front().dates;
    for (std::size_t k = 1; k < input.size(); ++k) {
        std::unordered_set<std::string> have(input[k].dates.begin(), input[k].dates.end());
        std::vector<std::string> next;
        next.reserve(common.size());
        for (const auto& d : common)
            if (have.count(d)) next.push_back(d);
        common.swap(next);
    }
    if (common.empty()) throw insufficient_data_error("panel: no common trading dates");

    MarketPanel panel;
    panel.calendar = common;
    panel.series.reserve(input.size());
    for (auto& s : input) {
        ObservationSeries aligned;
        aligned.name = s.name;
        aligned.provenance = s.provenance;
        aligned.dates = common;
        aligned.values.reserve(common.size());
        std::size_t j = 0;
        for (const auto& d : common) {
            while (j < s.dates.size() && s.dates[j] != d) ++j;
            if (j == s.dates.size())
                throw configuration_error("panel: internal join failure on '" + s.name + "'");
            aligned.values.push_back(s.values[j]);
        }
        panel.series.push_back(std::move(aligned));
    }
    return panel;
}

/// Rescales so the value at base_date becomes exactly 100.
inline ObservationSeries rebase_to_relative(const ObservationSeries& s,
                                            const std::string& base_date) {
    validate_series(s);
    auto it = std::find(s.dates.begin(), s.dates.end(), base_date);
    if (it == s.dates.end())
        throw configuration_error("rebase: base date " + base_date + " not in series '" +
                                  s.name + "'");
    for (std::size_t i = 0; i < s.values.size(); ++i)
        if (!(s.values[i] > 0.0))
            throw domain_error("rebase: nonpositive value in '" + s.name + "' at " + s.dates[i]);
    const double base = s.values[static_cast<std::size_t>(it - s.dates.begin())];
    ObservationSeries out = s;
    for (auto& v : out.values) v = 100.0 * v / base;
    out.values[static_cast<std::size_t>(it - s.dates.begin())] = 100.0;
    out.provenance.push_back("rebase(" + base_date + ")");
    return out;
}

/// Elementwise natural logarithm.
inline ObservationSeries log_transform(const ObservationSeries& s) {
    validate_series(s);
    ObservationSeries out = s;
    for (std::size_t i = 0; i < s.values.size(); ++i) {
        if (!(s.values[i] > 0.0))
            throw domain_error("log: nonpositive value in '" + s.name + "' at " + s.dates[i]);
        out.values[i] = std::log(s.values[i]);
    }
    out.provenance.push_back("log");
    return out;
}

/// k-th order differencing; the first `order` dates drop off the calendar.
inline ObservationSeries difference(const ObservationSeries& s, int order = 1) {
    validate_series(s);
    if (order < 1) throw configuration_error("difference: order must be positive");
    if (s.values.size() <= static_cast<std::size_t>(order))
        throw insufficient_data_error("difference: series '" + s.name + "' too short");
    ObservationSeries out;
    out.name = s.name;
    out.provenance = s.provenance;
    out.provenance.push_back("diff(" + std::to_string(order) + ")");
    std::vector<double> cur = s.values;
    for (int d = 0; d < order; ++d) {
        std::vector<double> next(cur.size() - 1);
        for (std::size_t t = 0; t + 1 < cur.size(); ++t) next[t] = cur[t + 1] - cur[t];
        cur.swap(next);
    }
    out.values = std::move(cur);
    out.dates.assign(s.dates.begin() + order, s.dates.end());
    return out;
}

/// output_t = input_{t-k}; the first k calendar entries drop so lagged and
/// unlagged columns stay date-aligned.
inline ObservationSeries lag(const ObservationSeries& s, int k) {
    validate_series(s);
    if (k < 0) throw configuration_error("lag: k must be nonnegative");
    if (static_cast<std::size_t>(k) >= s.values.size())
        throw insufficient_data_error("lag: k >= length of '" + s.name + "'");
    ObservationSeries out;
    out.name = s.name;
    out.provenance = s.provenance;
    if (k > 0) out.provenance.push_back("lag(" + std::to_string(k) + ")");
    out.dates.assign(s.dates.begin() + k, s.dates.end());
    out.values.assign(s.values.begin(), s.values.end() - k);
    return out;
}

/// Which markets close first / last in the trading day; drives the one-day
/// lag rule that proxies contemporaneous cross-market relationships.
struct AlignmentRoles {
    std::set<std::string> first_to_close;
    std::set<std::string> last_to_close;
};

/// A panel of regressor views under closing-time alignment. For each
/// dependent market, lag_offsets records the lag applied to every other
/// market's column when it serves as a regressor.
struct AlignedPanel {
    MarketPanel source;  // untrimmed input panel
    int max_lag = 0;
    std::map<std::string, std::map<std::string, int>> lag_offsets;

    std::vector<std::string> calendar() const {
        return {source.calendar.begin() + max_lag, source.calendar.end()};
    }

    /// Identity view of the usable sample (values at the trimmed calendar).
    MarketPanel view() const {
        MarketPanel out;
        out.calendar = calendar();
        for (const auto& s : source.series) {
            ObservationSeries t;
            t.name = s.name;
            t.provenance = s.provenance;
            t.dates = out.calendar;
            t.values.assign(s.values.begin() + max_lag, s.values.end());
            out.series.push_back(std::move(t));
        }
        return out;
    }

    std::vector<double> dependent(const std::string& name) const {
        const auto& s = source.at(name);
        return {s.values.begin() + max_lag, s.values.end()};
    }

    std::vector<double> regressor(const std::string& dep, const std::string& reg) const {
        const auto it = lag_offsets.find(dep);
        if (it == lag_offsets.end())
            throw configuration_error("alignment: unknown dependent '" + dep + "'");
        const auto jt = it->second.find(reg);
        if (jt == it->second.end())
            throw configuration_error("alignment: '" + reg + "' is not a regressor for '" +
                                      dep + "'");
        const int offset = jt->second;
        const auto& s = source.at(reg);
        return {s.values.begin() + (max_lag - offset), s.values.end() - offset};
    }
};

/// Applies the fixed lag rule: a first-to-close dependent sees every other
/// market lagged one day; any other dependent sees the last-to-close markets
/// lagged one day and the rest contemporaneous.
inline AlignedPanel apply_closing_time_alignment(const MarketPanel& panel,
                                                 const AlignmentRoles& roles) {
    for (const auto& n : roles.first_to_close)
        if (!panel.has(n)) throw configuration_error("alignment: unknown market '" + n + "'");
    for (const auto& n : roles.last_to_close) {
        if (!panel.has(n)) throw configuration_error("alignment: unknown market '" + n + "'");
        if (roles.first_to_close.count(n))
            throw configuration_error("alignment: '" + n + "' is both first and last to close");
    }

    AlignedPanel out;
    out.source = panel;
    const bool any_lag = !roles.first_to_close.empty() || !roles.last_to_close.empty();
    out.max_lag = any_lag ? 1 : 0;
    if (panel.size() <= static_cast<std::size_t>(out.max_lag))
        throw insufficient_data_error("alignment: panel too short for one-day lags");

    for (const auto& dep : panel.series) {
        std::map<std::string, int> offsets;
        const bool dep_first = roles.first_to_close.count(dep.name) > 0;
        for (const auto& reg : panel.series) {
            if (reg.name == dep.name) continue;
            int off = 0;
            if (dep_first)
                off = 1;
            else if (roles.last_to_close.count(reg.name))
                off = 1;
            offsets[reg.name] = off;
        }
        out.lag_offsets[dep.name] = std::move(offsets);
    }
    return out;
}

/// Sample moment summary; skewness and kurtosis use 1/T central moments.
struct SummaryStats {
    double mean = 0.0;
    double variance = 0.0;         // unbiased (T-1) convention
    double skewness = 0.0;         // m3 / m2^{3/2}
    double excess_kurtosis = 0.0;  // m4 / m2^2 - 3
    double jarque_bera = 0.0;      // T/6 (S^2 + (K-3)^2 / 4)
};

inline SummaryStats descriptive_stats(const ObservationSeries& s) {
    validate_series(s);
    const std::size_t n = s.values.size();
    if (n < 4) throw insufficient_data_error("descriptive_stats: need at least 4 observations");
    double mean = 0.0;
    for (double v : s.values) mean += v;
    mean /= static_cast<double>(n);
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double v : s.values) {
        const double d = v - mean;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
    }
    const double T = static_cast<double>(n);
    m2 /= T;
    m3 /= T;
    m4 /= T;
    if (!(m2 > 0.0)) throw degenerate_error("descriptive_stats: zero variance");
    SummaryStats out;
    out.mean = mean;
    out.variance = m2 * T / (T - 1.0);
    out.skewness = m3 / std::pow(m2, 1.5);
    const double kurt = m4 / (m2 * m2);
    out.excess_kurtosis = kurt - 3.0;
    out.jarque_bera = T / 6.0 * (out.skewness * out.skewness + (kurt - 3.0) * (kurt - 3.0) / 4.0);
    return out;
}

} // namespace cointkit
