// critical_values.hpp
// Embedded critical-value datasets for every test in the toolkit. Sources and
// anchor points are documented in docs/critical_value_tables.md.

#pragma once

#include <array>
#include <map>

#include "cointkit/errors.hpp"

namespace cointkit {

/// Deterministic terms of a test regression.
enum class Deterministic { none, constant, constant_and_trend };

inline const char* to_string(Deterministic d) {
    switch (d) {
        case Deterministic::none: return "none";
        case Deterministic::constant: return "constant";
        default: return "constant_and_trend";
    }
}

/// Structural-break models of the single-break cointegration tests.
enum class BreakModelKind { level_shift, level_shift_with_trend, regime_shift };

inline const char* to_string(BreakModelKind m) {
    switch (m) {
        case BreakModelKind::level_shift: return "C";
        case BreakModelKind::level_shift_with_trend: return "C/T";
        default: return "C/S";
    }
}

namespace detail {

inline int level_index(double level) {
    if (level == 0.01) return 0;
    if (level == 0.05) return 1;
    if (level == 0.10) return 2;
    throw configuration_error("critical values tabulated at 1%, 5%, 10% only");
}

struct ResponseSurface {
    double binf, b1, b2;
    double at(long T) const {
        if (T <= 0) return binf;
        const double x = 1.0 / static_cast<double>(T);
        return binf + b1 * x + b2 * x * x;
    }
};

// MacKinnon response surfaces for the Dickey-Fuller t distribution,
// {1%, 5%, 10%} per deterministic spec.
inline constexpr ResponseSurface kAdfSurface[3][3] = {
    // none
    {{-2.5658, -1.960, -10.04}, {-1.9393, -0.398, 0.0}, {-1.6156, -0.181, 0.0}},
    // constant
    {{-3.4336, -5.999, -29.25}, {-2.8621, -2.738, -8.36}, {-2.5671, -1.438, -4.48}},
    // constant and trend
    {{-3.9638, -8.353, -47.44}, {-3.4126, -4.039, -17.83}, {-3.1279, -2.418, -7.58}},
};

// MacKinnon response surfaces for residual-based cointegration tests with a
// constant, indexed by the total variable count N = m + 1, N = 2..7.
inline constexpr ResponseSurface kEgSurface[6][3] = {
    {{-3.9001, -10.534, -30.03}, {-3.3377, -5.967, -8.98}, {-3.0462, -4.069, -5.73}},
    {{-4.2981, -13.790, -46.37}, {-3.7429, -8.352, -13.41}, {-3.4518, -6.241, -2.79}},
    {{-4.6493, -17.188, -59.20}, {-4.1000, -10.745, -21.57}, {-3.8110, -8.317, -5.19}},
    {{-4.9587, -22.504, -50.22}, {-4.4185, -13.461, -21.16}, {-4.1327, -10.359, -13.49}},
    {{-5.2497, -26.606, -49.56}, {-4.7048, -16.499, -25.48}, {-4.4242, -12.883, -20.57}},
    {{-5.5127, -30.735, -34.57}, {-4.9571, -19.688, -26.84}, {-4.6928, -15.531, -23.21}},
};

// KPSS asymptotic critical values, {1%, 5%, 10%}.
inline constexpr double kKpssConstant[3] = {0.739, 0.463, 0.347};
inline constexpr double kKpssTrend[3] = {0.216, 0.146, 0.119};

// Gregory-Hansen asymptotic critical values. The published table covers
// m = 1..4 regressors; m = 5 and 6 reuse the m = 4 row (the deepest
// tabulated), the established practice for larger systems. Layout:
// [model][m-1][level] with models ordered C, C/T, C/S.
inline constexpr double kGhAdfZt[3][6][3] = {
    {// C
     {-5.13, -4.61, -4.34},
     {-5.44, -4.92, -4.69},
     {-5.77, -5.28, -5.02},
     {-6.05, -5.56, -5.31},
     {-6.05, -5.56, -5.31},
     {-6.05, -5.56, -5.31}},
    {// C/T
     {-5.45, -4.99, -4.72},
     {-5.80, -5.29, -5.03},
     {-6.05, -5.57, -5.33},
     {-6.36, -5.83, -5.59},
     {-6.36, -5.83, -5.59},
     {-6.36, -5.83, -5.59}},
    {// C/S
     {-5.47, -4.95, -4.68},
     {-5.97, -5.50, -5.23},
     {-6.51, -6.00, -5.75},
     {-6.92, -6.41, -6.17},
     {-6.92, -6.41, -6.17},
     {-6.92, -6.41, -6.17}},
};

inline constexpr double kGhZa[3][6][3] = {
    {// C
     {-50.07, -40.48, -36.19},
     {-57.01, -46.98, -42.49},
     {-63.64, -53.58, -48.65},
     {-70.18, -59.40, -54.38},
     {-70.18, -59.40, -54.38},
     {-70.18, -59.40, -54.38}},
    {// C/T
     {-57.28, -47.96, -43.22},
     {-64.77, -53.92, -48.94},
     {-70.27, -59.76, -54.94},
     {-76.95, -65.44, -60.12},
     {-76.95, -65.44, -60.12},
     {-76.95, -65.44, -60.12}},
    {// C/S
     {-57.17, -47.04, -41.85},
     {-68.21, -58.33, -52.85},
     {-80.15, -68.94, -63.42},
     {-90.35, -78.52, -72.56},
     {-90.35, -78.52, -72.56},
     {-90.35, -78.52, -72.56}},
};

// Johansen trace critical values indexed by n = i - r, n = 1..7,
// {1%, 5%, 10%}, for the restricted- and unrestricted-constant cases.
inline constexpr double kTraceRestrictedConst[7][3] = {
    {12.97, 9.24, 7.52},    {24.60, 19.96, 17.85},  {41.07, 34.91, 32.00},
    {60.16, 53.12, 49.65},  {84.45, 76.07, 71.86},  {111.01, 102.14, 97.18},
    {143.09, 131.70, 126.58},
};

inline constexpr double kTraceUnrestrictedConst[7][3] = {
    {6.65, 3.76, 2.69},     {20.04, 15.41, 13.33},  {35.65, 29.68, 26.79},
    {54.46, 47.21, 43.95},  {76.07, 68.52, 64.84},  {103.18, 94.15, 89.48},
    {133.57, 124.24, 118.50},
};

// 5% boundary half-widths for the squared-CUSUM path, indexed by f = T - k.
// Tabulated by exact-null simulation (1e6 replications per point; see
// tools/gen_cusumq_table.cpp).
inline constexpr std::array<std::pair<int, double>, 39> kCusumSqC0 = {{
    {10, 0.4735},  {15, 0.4100},  {20, 0.3666},  {25, 0.3350},  {30, 0.3102},
    {35, 0.2899},  {40, 0.2736},  {45, 0.2599},  {50, 0.2482},  {55, 0.2378},
    {60, 0.2284},  {65, 0.2206},  {70, 0.2130},  {75, 0.2062},  {80, 0.2004},
    {85, 0.1949},  {90, 0.1897},  {95, 0.1848},  {100, 0.1806}, {105, 0.1766},
    {110, 0.1728}, {115, 0.1694}, {120, 0.1658}, {125, 0.1628}, {130, 0.1597},
    {135, 0.1570}, {140, 0.1543}, {145, 0.1518}, {150, 0.1494}, {155, 0.1470},
    {160, 0.1450}, {165, 0.1427}, {170, 0.1406}, {175, 0.1388}, {180, 0.1369},
    {185, 0.1351}, {190, 0.1334}, {195, 0.1318}, {200, 0.1303},
}};

} // namespace detail

/// Finite-sample Dickey-Fuller critical value; T <= 0 returns the asymptote.
inline double adf_critical_value(Deterministic spec, double level, long T = 0) {
    return detail::kAdfSurface[static_cast<int>(spec)][detail::level_index(level)].at(T);
}

/// KPSS critical value (asymptotic); the test is defined for the constant
/// and constant-and-trend specs only.
inline double kpss_critical_value(Deterministic spec, double level) {
    const int li = detail::level_index(level);
    if (spec == Deterministic::constant) return detail::kKpssConstant[li];
    if (spec == Deterministic::constant_and_trend) return detail::kKpssTrend[li];
    throw configuration_error("kpss critical values: spec must include a constant");
}

/// Residual-based cointegration critical value for m regressors (1..6).
inline double eg_critical_value(int m, double level, long T = 0) {
    if (m < 1 || m > 6)
        throw configuration_error("eg critical values tabulated for 1..6 regressors");
    return detail::kEgSurface[m - 1][detail::level_index(level)].at(T);
}

/// Break-cointegration critical value. ADF* and Zt* share a table; Za* has
/// its own scale.
inline double gh_critical_value(BreakModelKind model, bool za_family, int m, double level) {
    if (m < 1 || m > 6)
        throw configuration_error("gh critical values tabulated for 1..6 regressors");
    const int mi = static_cast<int>(model);
    const int li = detail::level_index(level);
    return za_family ? detail::kGhZa[mi][m - 1][li] : detail::kGhAdfZt[mi][m - 1][li];
}

/// Johansen trace critical value for i - r remaining directions.
inline double johansen_trace_critical_value(int n_minus_r, bool restricted_constant,
                                            double level) {
    if (n_minus_r < 1 || n_minus_r > 7)
        throw configuration_error("trace critical values tabulated for i - r in 1..7");
    const int li = detail::level_index(level);
    return restricted_constant ? detail::kTraceRestrictedConst[n_minus_r - 1][li]
                               : detail::kTraceUnrestrictedConst[n_minus_r - 1][li];
}

/// 5% CUSUM boundary coefficient.
inline constexpr double cusum_bound_coefficient() { return 0.948; }

/// 5% squared-CUSUM boundary half-width for f = T - k, linearly interpolated
/// between tabulated points and clamped outside [10, 200].
inline double cusum_sq_c0(int f) {
    const auto& tab = detail::kCusumSqC0;
    if (f <= tab.front().first) return tab.front().second;
    if (f >= tab.back().first) return tab.back().second;
    for (std::size_t i = 1; i < tab.size(); ++i) {
        if (f <= tab[i].first) {
            const double x0 = tab[i - 1].first, y0 = tab[i - 1].second;
            const double x1 = tab[i].first, y1 = tab[i].second;
            return y0 + (y1 - y0) * (f - x0) / (x1 - x0);
        }
    }
    return tab.back().second;
}

/// Critical values keyed by significance level (0.01, 0.05, 0.10).
using CriticalValueMap = std::map<double, double>;

} // namespace cointkit
