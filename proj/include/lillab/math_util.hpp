#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "lillab/errors.hpp"

namespace lillab {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// log(exp(a) + exp(b)) without overflow; -inf acts as the additive zero.
inline double log_add(double a, double b) {
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    double m = std::max(a, b);
    return m + std::log1p(std::exp(std::min(a, b) - m));
}

/// log(exp(a) - exp(b)), requires a >= b.
inline double log_sub(double a, double b) {
    if (b == kNegInf) return a;
    if (b > a) throw NumericError("log_sub: negative difference");
    if (a == b) return kNegInf;
    return a + std::log1p(-std::exp(b - a));
}

inline double log_sum(std::span<const double> xs) {
    double m = kNegInf;
    for (double x : xs) m = std::max(m, x);
    if (m == kNegInf) return kNegInf;
    double s = 0.0;
    for (double x : xs) s += std::exp(x - m);
    return m + std::log(s);
}

/// log E_1(r) from log r, valid over the whole log-space range.
/// E_1(r) = -Ei(-r); series branch for tiny r, asymptotic e^-r/r (1 - 1/r + ...)
/// for large r, std::expint in between.
inline double log_expint_e1_from_log(double log_r) {
    if (log_r < -36.0) {
        // E_1(r) = -gamma - ln r + r - ..., dominated by -ln r
        static constexpr double kEulerGamma = 0.57721566490153286;
        return std::log(-log_r - kEulerGamma);
    }
    if (log_r > std::log(700.0)) {
        double r = std::exp(log_r);
        if (!std::isfinite(r)) return kNegInf;  // exp(-r) underflows anyway
        // e^-r/r * (1 - 1/r + 2/r^2 - 6/r^3)
        double corr = 1.0 - 1.0 / r + 2.0 / (r * r) - 6.0 / (r * r * r);
        return -r - log_r + std::log(corr);
    }
    double r = std::exp(log_r);
    double e1 = -std::expint(-r);
    return std::log(e1);
}

/// Golden-section search for the minimum of f over [a, b].
/// Returns (argmin, min). Maximize by negating f.
template <class F>
std::pair<double, double> golden_section_min(F&& f, double a, double b, double rel_tol,
                                             int max_iter = 200) {
    static const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - invphi * (b - a);
    double x2 = a + invphi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int it = 0; it < max_iter && (b - a) > rel_tol * (std::abs(a) + std::abs(b) + 1e-300);
         ++it) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - invphi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + invphi * (b - a);
            f2 = f(x2);
        }
    }
    return f1 <= f2 ? std::make_pair(x1, f1) : std::make_pair(x2, f2);
}

/// Least-squares slope of y against x.
inline double ls_slope(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw NumericError("ls_slope: need >= 2 points");
    double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    double den = n * sxx - sx * sx;
    if (den == 0) throw NumericError("ls_slope: degenerate abscissae");
    return (n * sxy - sx * sy) / den;
}

inline double quantile_sorted(std::span<const double> sorted, double q) {
    if (sorted.empty()) throw NumericError("quantile of empty sample");
    double pos = q * (static_cast<double>(sorted.size()) - 1.0);
    std::size_t lo = static_cast<std::size_t>(pos);
    std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    double frac = pos - static_cast<double>(lo);
    return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

inline double quantile(std::vector<double> sample, double q) {
    std::sort(sample.begin(), sample.end());
    return quantile_sorted(sample, q);
}

/// Wilson score interval for a binomial proportion.
struct WilsonInterval {
    double lo, hi;
};
inline WilsonInterval wilson_interval(std::size_t successes, std::size_t n, double z) {
    if (n == 0) return {0.0, 1.0};
    double nn = static_cast<double>(n);
    double p = static_cast<double>(successes) / nn;
    double z2 = z * z;
    double denom = 1.0 + z2 / nn;
    double center = (p + z2 / (2 * nn)) / denom;
    double half = z * std::sqrt(p * (1 - p) / nn + z2 / (4 * nn * nn)) / denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

/// Asymptotic Kolmogorov-Smirnov tail probability Q(lambda).
inline double ks_q(double lambda) {
    if (lambda < 1e-8) return 1.0;
    double sum = 0.0;
    for (int k = 1; k <= 100; ++k) {
        double term = 2.0 * ((k % 2 == 1) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * lambda * lambda);
        sum += term;
        if (std::abs(term) < 1e-12) break;
    }
    return std::clamp(sum, 0.0, 1.0);
}

/// Two-sample KS test p-value (asymptotic).
inline double ks_two_sample_p(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] <= b[j])
            ++i;
        else
            ++j;
        double fa = static_cast<double>(i) / static_cast<double>(a.size());
        double fb = static_cast<double>(j) / static_cast<double>(b.size());
        d = std::max(d, std::abs(fa - fb));
    }
    double ne = static_cast<double>(a.size()) * static_cast<double>(b.size()) /
                static_cast<double>(a.size() + b.size());
    double sq = std::sqrt(ne);
    return ks_q((sq + 0.12 + 0.11 / sq) * d);
}

}  // namespace lillab
