#pragma once

// Log-space adaptive quadrature. All improper integrals in this library are
// computed as log(integral) of exp(g(x)) where g returns the log-integrand;
// g(x) == -inf marks points where the integrand vanishes. Panels get a local
// offset so the dynamic range of a panel never overflows a double.

#include <cmath>
#include <functional>

#include "lillab/defaults.hpp"
#include "lillab/errors.hpp"
#include "lillab/math_util.hpp"

namespace lillab {

using LogFn = std::function<double(double)>;

struct QuadOptions {
    double rel_tol = defaults::kQuadRelTol;
    int max_depth = defaults::kQuadMaxDepth;
    double truncation = defaults::kQuadTruncation;
};

namespace detail {

inline double simpson(double h, double fa, double fm, double fb) {
    return (fa + 4.0 * fm + fb) * (h / 6.0);
}

template <class F>
double adaptive_simpson_rec(F& f, double a, double m, double b, double fa, double fm, double fb,
                            double whole, double tol, int depth) {
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = simpson(m - a, fa, flm, fm);
    double right = simpson(b - m, fm, frm, fb);
    double err = left + right - whole;
    if (std::abs(err) <= 15.0 * tol || depth <= 0) return left + right + err / 15.0;
    return adaptive_simpson_rec(f, a, lm, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson_rec(f, m, rm, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

/// Plain adaptive Simpson of f over [a, b] with mixed rel/abs control.
template <class F>
double adaptive_simpson(F&& f, double a, double b, double rel_tol = defaults::kQuadRelTol,
                        int max_depth = defaults::kQuadMaxDepth, double abs_tol = 0.0) {
    if (!(a < b)) return 0.0;
    double m = 0.5 * (a + b);
    double fa = f(a), fm = f(m), fb = f(b);
    double whole = detail::simpson(b - a, fa, fm, fb);
    double tol = std::max(rel_tol * (std::abs(whole) + 1e-300), abs_tol);
    return detail::adaptive_simpson_rec(f, a, m, b, fa, fm, fb, whole, tol, max_depth);
}

/// log of integral_a^b exp(g(x)) dx for a finite panel. The offset is probed at
/// nine interior points; exp underflow below the offset is harmless.
inline double log_integrate_panel(const LogFn& g, double a, double b, const QuadOptions& opts) {
    if (!(a < b)) return kNegInf;
    double offset = kNegInf;
    for (int i = 0; i <= 8; ++i) offset = std::max(offset, g(a + (b - a) * i / 8.0));
    if (offset == kNegInf) return kNegInf;
    auto h = [&](double x) {
        double v = g(x) - offset;
        return v < -745.0 ? 0.0 : std::exp(v);
    };
    // h <= O(1) by the offset, so an absolute floor bounds the recursion even
    // when rounding noise makes the panel look rough
    double s = adaptive_simpson(h, a, b, opts.rel_tol, opts.max_depth, 1e-13 * (b - a));
    if (s <= 0.0) return kNegInf;
    return offset + std::log(s);
}

/// log of integral over [a, b], split into panels of width <= panel_w.
inline double log_integrate(const LogFn& g, double a, double b, const QuadOptions& opts = {},
                            double panel_w = 4.0) {
    if (!(a < b)) return kNegInf;
    int n = std::max(1, static_cast<int>(std::ceil((b - a) / panel_w)));
    double acc = kNegInf;
    for (int i = 0; i < n; ++i) {
        double pa = a + (b - a) * i / n;
        double pb = a + (b - a) * (i + 1) / n;
        acc = log_add(acc, log_integrate_panel(g, pa, pb, opts));
    }
    return acc;
}

/// log of integral_{-inf}^{b} exp(g); expands left in blocks until the running
/// sum stops moving. Throws NumericError if block contributions refuse to
/// decay (divergent lower end), e.g. the Hunt denominator with L1 violated.
inline double log_integrate_left(const LogFn& g, double b, const QuadOptions& opts = {},
                                 double block_w = 4.0, int max_blocks = 1000) {
    double acc = kNegInf;
    double prev_block = kNegInf;
    int non_decreasing = 0;
    for (int i = 0; i < max_blocks; ++i) {
        double hi = b - block_w * i;
        double lo = hi - block_w;
        double blk = log_integrate_panel(g, lo, hi, opts);
        acc = log_add(acc, blk);
        if (acc != kNegInf && blk < acc + std::log(opts.truncation)) return acc;
        if (blk >= prev_block - 1e-9 && prev_block != kNegInf)
            ++non_decreasing;
        else
            non_decreasing = 0;
        if (non_decreasing >= 12 && i >= 20)
            throw NumericError("improper integral diverges at the lower limit");
        prev_block = blk;
    }
    throw NumericError("improper integral did not truncate (lower end)");
}

/// log of integral_{a}^{inf} exp(g); expands right in blocks.
inline double log_integrate_right(const LogFn& g, double a, const QuadOptions& opts = {},
                                  double block_w = 4.0, int max_blocks = 1000) {
    double acc = kNegInf;
    double prev_block = kNegInf;
    int non_decreasing = 0;
    for (int i = 0; i < max_blocks; ++i) {
        double lo = a + block_w * i;
        double hi = lo + block_w;
        double blk = log_integrate_panel(g, lo, hi, opts);
        acc = log_add(acc, blk);
        if (acc != kNegInf && blk < acc + std::log(opts.truncation)) return acc;
        if (blk >= prev_block - 1e-9 && prev_block != kNegInf)
            ++non_decreasing;
        else
            non_decreasing = 0;
        if (non_decreasing >= 12 && i >= 20)
            throw NumericError("improper integral diverges at the upper limit");
        prev_block = blk;
    }
    throw NumericError("improper integral did not truncate (upper end)");
}

/// log of integral over the whole line, expanding from a seed point where the
/// integrand is expected to peak.
inline double log_integrate_line(const LogFn& g, double seed, const QuadOptions& opts = {},
                                 double block_w = 4.0, int max_blocks = 1000) {
    double right = log_integrate_right(g, seed, opts, block_w, max_blocks);
    double left = log_integrate_left(g, seed, opts, block_w, max_blocks);
    return log_add(left, right);
}

}  // namespace lillab
