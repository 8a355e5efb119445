// helpers.hpp
// Shared test utilities: series builders and the independent oracles the
// fixtures are checked against. Oracles here deliberately avoid the library's
// numerical paths (no Eigen): exact rational Gaussian elimination for
// normal-equations fixtures and direct summation everywhere else.

#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "cointkit/dates.hpp"
#include "cointkit/series.hpp"

namespace testkit {

inline cointkit::ObservationSeries make_series(const std::string& name,
                                               const std::vector<double>& values,
                                               std::int64_t start_serial = 10957) {
    cointkit::ObservationSeries s;
    s.name = name;
    s.values = values;
    s.dates.reserve(values.size());
    for (std::size_t i = 0; i < values.size(); ++i)
        s.dates.push_back(cointkit::serial_to_iso(start_serial + static_cast<std::int64_t>(i)));
    return s;
}

// ---------------------------------------------------------------------------
// Exact rational arithmetic (128-bit) for normal-equations oracles.
// ---------------------------------------------------------------------------

struct Frac {
    __int128 num = 0;
    __int128 den = 1;

    Frac() = default;
    Frac(long long n) : num(n), den(1) {}
    Frac(__int128 n, __int128 d) : num(n), den(d) { normalize(); }

    static __int128 gcd128(__int128 a, __int128 b) {
        if (a < 0) a = -a;
        if (b < 0) b = -b;
        while (b != 0) {
            const __int128 t = a % b;
            a = b;
            b = t;
        }
        return a;
    }

    void normalize() {
        if (den == 0) throw std::runtime_error("Frac: zero denominator");
        if (den < 0) {
            num = -num;
            den = -den;
        }
        const __int128 g = gcd128(num, den);
        if (g > 1) {
            num /= g;
            den /= g;
        }
    }

    double to_double() const {
        return static_cast<double>(num) / static_cast<double>(den);
    }

    friend Frac operator+(const Frac& a, const Frac& b) {
        return Frac(a.num * b.den + b.num * a.den, a.den * b.den);
    }
    friend Frac operator-(const Frac& a, const Frac& b) {
        return Frac(a.num * b.den - b.num * a.den, a.den * b.den);
    }
    friend Frac operator*(const Frac& a, const Frac& b) {
        return Frac(a.num * b.num, a.den * b.den);
    }
    friend Frac operator/(const Frac& a, const Frac& b) {
        return Frac(a.num * b.den, a.den * b.num);
    }
    bool is_zero() const { return num == 0; }
};

/// Solves A x = b exactly by fraction-free-ish Gaussian elimination with
/// partial pivoting on rational entries.
inline std::vector<Frac> solve_rational(std::vector<std::vector<Frac>> A, std::vector<Frac> b) {
    const std::size_t n = A.size();
    for (std::size_t j = 0; j < n; ++j) {
        std::size_t pivot = j;
        while (pivot < n && A[pivot][j].is_zero()) ++pivot;
        if (pivot == n) throw std::runtime_error("solve_rational: singular system");
        std::swap(A[j], A[pivot]);
        std::swap(b[j], b[pivot]);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == j || A[r][j].is_zero()) continue;
            const Frac f = A[r][j] / A[j][j];
            for (std::size_t c = j; c < n; ++c) A[r][c] = A[r][c] - f * A[j][c];
            b[r] = b[r] - f * b[j];
        }
    }
    std::vector<Frac> x(n);
    for (std::size_t j = 0; j < n; ++j) x[j] = b[j] / A[j][j];
    return x;
}

struct RationalOls {
    std::vector<Frac> coefficients;
    Frac ssr;
    std::vector<std::vector<Frac>> xtx_inverse;  // (X'X)^{-1}, exact
};

/// Exact OLS of y on X via rational normal equations. Inputs must be exactly
/// representable (integers or simple fractions).
inline RationalOls rational_ols(const std::vector<std::vector<Frac>>& X,
                                const std::vector<Frac>& y) {
    const std::size_t T = X.size();
    const std::size_t k = X.front().size();
    std::vector<std::vector<Frac>> G(k, std::vector<Frac>(k));
    std::vector<Frac> g(k);
    for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t c = a; c < k; ++c) {
            Frac acc;
            for (std::size_t t = 0; t < T; ++t) acc = acc + X[t][a] * X[t][c];
            G[a][c] = acc;
            G[c][a] = acc;
        }
        Frac acc;
        for (std::size_t t = 0; t < T; ++t) acc = acc + X[t][a] * y[t];
        g[a] = acc;
    }
    RationalOls out;
    out.coefficients = solve_rational(G, g);
    Frac ssr;
    for (std::size_t t = 0; t < T; ++t) {
        Frac fitted;
        for (std::size_t c = 0; c < k; ++c) fitted = fitted + X[t][c] * out.coefficients[c];
        const Frac r = y[t] - fitted;
        ssr = ssr + r * r;
    }
    out.ssr = ssr;
    out.xtx_inverse.assign(k, std::vector<Frac>(k));
    for (std::size_t c = 0; c < k; ++c) {
        std::vector<Frac> e(k);
        e[c] = Frac(1);
        const auto col = solve_rational(G, e);
        for (std::size_t r = 0; r < k; ++r) out.xtx_inverse[r][c] = col[r];
    }
    return out;
}

// ---------------------------------------------------------------------------
// Adaptive Simpson quadrature for distribution-function oracles.
// ---------------------------------------------------------------------------

template <typename F>
double simpson(F f, double a, double b) {
    const double c = 0.5 * (a + b);
    return (b - a) / 6.0 * (f(a) + 4.0 * f(c) + f(b));
}

template <typename F>
double adaptive_simpson(F f, double a, double b, double eps, double whole, int depth) {
    const double c = 0.5 * (a + b);
    const double left = simpson(f, a, c);
    const double right = simpson(f, c, b);
    if (depth <= 0 || std::fabs(left + right - whole) <= 15.0 * eps)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson(f, a, c, 0.5 * eps, left, depth - 1) +
           adaptive_simpson(f, c, b, 0.5 * eps, right, depth - 1);
}

template <typename F>
double integrate(F f, double a, double b, double eps = 1e-12) {
    return adaptive_simpson(f, a, b, eps, simpson(f, a, b), 40);
}

/// Student-t density, for quadrature oracles.
inline double t_density(double x, int df) {
    const double v = df;
    return std::exp(std::lgamma(0.5 * (v + 1.0)) - std::lgamma(0.5 * v)) /
           std::sqrt(v * 3.14159265358979323846) *
           std::pow(1.0 + x * x / v, -0.5 * (v + 1.0));
}

} // namespace testkit
