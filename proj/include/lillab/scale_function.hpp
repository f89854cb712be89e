#pragma once

// ScaleFunction: a positive strictly monotone function on an interval of
// (0, inf), backed either by a parsed expression tree or by an arbitrary
// log-space callable (used for quadrature-derived scales). All evaluation is
// log-log: log f as a function of log r. A cached log-spaced sample
// (monotone_grid) certifies monotonicity at construction and seeds inversion
// brackets; log-space bisection then works far outside the grid.

#include <cmath>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lillab/defaults.hpp"
#include "lillab/errors.hpp"
#include "lillab/expr.hpp"
#include "lillab/math_util.hpp"
#include "lillab/quadrature.hpp"

namespace lillab {

enum class Orientation { Increasing, Decreasing };

class ScaleFunction {
public:
    ScaleFunction() = default;

    static ScaleFunction from_expr(ScaleExpr expr, double r_lo, double r_hi,
                                   Orientation orient = Orientation::Increasing) {
        auto b = std::make_shared<Backend>();
        b->expr = std::move(expr);
        b->label = print_expr(*b->expr);
        b->fn = [e = *b->expr](double x) { return log_eval_expr(e, x); };
        return finish(std::move(b), r_lo, r_hi, orient);
    }

    static ScaleFunction from_expression(std::string_view text, double r_lo, double r_hi,
                                         Orientation orient = Orientation::Increasing) {
        return from_expr(parse_scale_expr(text), r_lo, r_hi, orient);
    }

    static ScaleFunction from_log_fn(LogFn fn, double r_lo, double r_hi, Orientation orient,
                                     std::string label) {
        auto b = std::make_shared<Backend>();
        b->fn = std::move(fn);
        b->label = std::move(label);
        return finish(std::move(b), r_lo, r_hi, orient);
    }

    double log_eval(double log_r) const {
        check_domain(log_r);
        return backend_->fn(log_r);
    }

    double eval(double r) const {
        if (!(r > 0.0)) throw DomainError("eval: argument must be positive");
        return std::exp(log_eval(std::log(r)));
    }

    /// log r such that f(r) = exp(log_y), by bracketed bisection seeded from
    /// the monotone grid. Relative tolerance on f is kInversionRelTol.
    double log_inverse(double log_y) const {
        const auto& g = *backend_;
        const bool inc = g.orient == Orientation::Increasing;
        // below(f(x)) is true iff x lies left of the solution
        auto below = [&](double fv) { return inc ? fv < log_y : fv > log_y; };

        double lo = g.grid_x.front(), hi = g.grid_x.back();
        double flo = g.grid_f.front(), fhi = g.grid_f.back();
        bool on_grid = true;
        // expand the bracket left toward the domain edge
        for (int guard = 0; !below(flo); ++guard) {
            double next = lo - std::max(8.0, std::abs(lo));
            if (std::isfinite(g.log_lo) && next <= g.log_lo)
                next = g.log_lo + (lo - g.log_lo) * 1e-3;
            if (!(next < lo) || next < -1e300 || guard > 400)
                throw DomainError("inverse: target outside range (low end)");
            hi = lo;
            fhi = flo;
            lo = next;
            flo = g.fn(lo);
            on_grid = false;
        }
        // expand right
        for (int guard = 0; below(fhi); ++guard) {
            double next = hi + std::max(8.0, std::abs(hi));
            if (std::isfinite(g.log_hi) && next >= g.log_hi)
                next = g.log_hi - (g.log_hi - hi) * 1e-3;
            if (!(next > hi) || next > 1e300 || guard > 400)
                throw DomainError("inverse: target outside range (high end)");
            lo = hi;
            flo = fhi;
            hi = next;
            fhi = g.fn(hi);
            on_grid = false;
        }
        if (on_grid) {
            // binary search on the cached grid for a tight seed bracket
            std::size_t a = 0, b = g.grid_x.size() - 1;
            while (b - a > 1) {
                std::size_t m = (a + b) / 2;
                if (below(g.grid_f[m]))
                    a = m;
                else
                    b = m;
            }
            lo = g.grid_x[a];
            hi = g.grid_x[b];
        }
        double mid = 0.5 * (lo + hi);
        for (int it = 0; it < defaults::kInversionMaxIter; ++it) {
            mid = 0.5 * (lo + hi);
            double fm = g.fn(mid);
            if (std::abs(fm - log_y) <= defaults::kInversionRelTol) return mid;
            if (below(fm))
                lo = mid;
            else
                hi = mid;
            if (hi - lo <= 1e-15 * (std::abs(lo) + std::abs(hi) + 1.0)) break;
        }
        return mid;
    }

    double inverse(double y) const {
        if (!(y > 0.0)) throw DomainError("inverse: target must be positive");
        return std::exp(log_inverse(std::log(y)));
    }

    Orientation orientation() const { return backend_->orient; }
    double log_domain_lo() const { return backend_->log_lo; }
    double log_domain_hi() const { return backend_->log_hi; }
    double domain_lo() const { return std::exp(backend_->log_lo); }
    double domain_hi() const { return std::exp(backend_->log_hi); }
    const std::string& label() const { return backend_->label; }
    const std::optional<ScaleExpr>& expr() const { return backend_->expr; }

    std::string print() const {
        if (!backend_->expr) throw Error("print: not an expression-backed scale function");
        return print_expr(*backend_->expr);
    }

    /// 1/f with flipped orientation.
    ScaleFunction reciprocal() const {
        auto fn = backend_->fn;
        return from_log_fn([fn](double x) { return -fn(x); }, domain_lo(), domain_hi(),
                           orientation() == Orientation::Increasing ? Orientation::Decreasing
                                                                    : Orientation::Increasing,
                           "1/(" + label() + ")");
    }

    /// c * f, c > 0.
    ScaleFunction scaled(double c) const {
        if (!(c > 0.0)) throw ConstructionError("scaled: factor must be positive");
        auto fn = backend_->fn;
        double lc = std::log(c);
        return from_log_fn([fn, lc](double x) { return fn(x) + lc; }, domain_lo(), domain_hi(),
                           orientation(), format_double(c) + "*(" + label() + ")");
    }

    /// Spec role check for phi-type scales: vanishes at 0+, diverges at inf.
    bool phi_role_ok() const {
        const auto& g = *backend_;
        bool ok = true;
        if (g.log_lo == -kInf) ok = ok && g.grid_f.front() < g.fn(g.grid_x.front() + 1.0);
        if (g.log_lo == -kInf) ok = ok && g.fn(-60.0) < -1.0;
        if (g.log_hi == kInf) ok = ok && g.fn(60.0) > 1.0;
        return ok;
    }

    std::pair<std::vector<double>, std::vector<double>> grid() const {
        return {backend_->grid_x, backend_->grid_f};
    }

private:
    struct Backend {
        std::optional<ScaleExpr> expr;
        LogFn fn;
        std::string label;
        Orientation orient = Orientation::Increasing;
        double log_lo = -kInf, log_hi = kInf;
        std::vector<double> grid_x, grid_f;
    };

    std::shared_ptr<const Backend> backend_;

    void check_domain(double log_r) const {
        if (log_r <= backend_->log_lo || log_r >= backend_->log_hi)
            throw DomainError("argument outside declared domain of " + backend_->label);
    }

    static ScaleFunction finish(std::shared_ptr<Backend> b, double r_lo, double r_hi,
                                Orientation orient) {
        if (!(r_lo >= 0.0) || !(r_hi > r_lo)) throw ConstructionError("bad domain interval");
        b->orient = orient;
        b->log_lo = r_lo == 0.0 ? -kInf : std::log(r_lo);
        b->log_hi = std::isinf(r_hi) ? kInf : std::log(r_hi);

        double glo = std::max(b->log_lo, defaults::kGridLogLo);
        double ghi = std::min(b->log_hi, defaults::kGridLogHi);
        if (!(glo < ghi)) throw ConstructionError("domain too small for a sampling grid");
        double inset = 1e-6 * (ghi - glo);
        glo += inset;
        ghi -= inset;

        int n = defaults::kMonotoneGridSize;
        b->grid_x.resize(n);
        b->grid_f.resize(n);
        for (int i = 0; i < n; ++i) {
            double x = glo + (ghi - glo) * i / (n - 1);
            double f;
            try {
                f = b->fn(x);
            } catch (const DomainError& e) {
                throw ConstructionError(std::string("invalid on declared domain: ") + e.what());
            }
            if (!std::isfinite(f))
                throw ConstructionError("non-finite value on declared domain of " + b->label);
            b->grid_x[i] = x;
            b->grid_f[i] = f;
        }
        int sign = orient == Orientation::Increasing ? 1 : -1;
        for (int i = 1; i < n; ++i) {
            if (!(sign * (b->grid_f[i] - b->grid_f[i - 1]) > 0.0))
                throw ConstructionError(
                    "monotonicity violated on grid of " + b->label + " near log r = " +
                    format_double(b->grid_x[i]));
        }
        ScaleFunction s;
        s.backend_ = std::move(b);
        return s;
    }
};

// ---------------------------------------------------------------------------
// weak scaling certificates (finite-lattice checks of the L/U conditions)

enum class ScalingKind { Lower, Upper };

enum class ScalingRegime { NearZero, NearInfinity, Global };

struct LatticeSpec {
    int points = defaults::kLatticeSize;
    double log_lo = 0.0, log_hi = 0.0;  // filled in by check_scaling
};

struct ScalingWitness {
    double s = 0.0, r = 0.0;
    double ratio = 0.0;  // (g(r)/g(s)) / (c (r/s)^beta); < 1 violates Lower, > 1 Upper
};

struct ScalingCertificate {
    ScalingKind kind = ScalingKind::Upper;
    ScalingRegime regime = ScalingRegime::Global;
    double cutoff = kInf;  // the 'a' of L_a / L^a; ignored for Global
    double beta = 0.0;
    double c = 1.0;
    LatticeSpec lattice;
    bool holds = false;
    std::optional<ScalingWitness> witness;
};

/// Checks g(r)/g(s) >= c (r/s)^beta (Lower) or <= c (r/s)^beta (Upper) on
/// every ordered lattice pair inside the regime range. The certificate is a
/// finite-lattice statement, not a proof.
inline ScalingCertificate check_scaling(const ScaleFunction& f, ScalingKind kind,
                                        ScalingRegime regime, double beta, double c,
                                        double cutoff = kInf,
                                        int lattice_points = defaults::kLatticeSize) {
    if (!(beta > 0.0)) throw ConstructionError("scaling certificate requires beta > 0");
    if (kind == ScalingKind::Lower && !(c <= 1.0))
        throw ConstructionError("lower scaling requires c <= 1");
    if (kind == ScalingKind::Upper && !(c >= 1.0))
        throw ConstructionError("upper scaling requires c >= 1");
    if (lattice_points < 2) throw ConstructionError("lattice too small");

    double lo = std::max(f.log_domain_lo(), defaults::kGridLogLo);
    double hi = std::min(f.log_domain_hi(), defaults::kGridLogHi);
    if (regime == ScalingRegime::NearZero) hi = std::min(hi, std::log(cutoff));
    if (regime == ScalingRegime::NearInfinity) lo = std::max(lo, std::log(cutoff));
    if (!(lo < hi)) throw ConstructionError("empty lattice range for regime");
    double inset = 1e-6 * (hi - lo);
    lo += inset;
    hi -= inset;

    ScalingCertificate cert{kind, regime, cutoff, beta, c, {lattice_points, lo, hi}, true, {}};
    std::vector<double> xs(lattice_points), fs(lattice_points);
    for (int i = 0; i < lattice_points; ++i) {
        xs[i] = lo + (hi - lo) * i / (lattice_points - 1);
        fs[i] = f.log_eval(xs[i]);
    }
    double logc = std::log(c);
    double worst = 0.0;
    constexpr double kSlack = 1e-9;  // absorbs rounding in the equality cases
    for (int i = 0; i < lattice_points; ++i) {
        for (int j = i; j < lattice_points; ++j) {
            // log of (g(r)/g(s)) / (c (r/s)^beta), r = xs[j] >= s = xs[i]
            double lhs = fs[j] - fs[i] - logc - beta * (xs[j] - xs[i]);
            bool viol = kind == ScalingKind::Lower ? lhs < -kSlack : lhs > kSlack;
            if (viol) {
                double sev = std::abs(lhs);
                if (!cert.witness || sev > worst) {
                    worst = sev;
                    cert.witness = ScalingWitness{std::exp(xs[i]), std::exp(xs[j]), std::exp(lhs)};
                }
                cert.holds = false;
            }
        }
    }
    return cert;
}

// ---------------------------------------------------------------------------
// continuized tail (the Pi_1 construction)

/// Builds the increasing continuous replacement for r -> 1/w(F(r)):
///   near infinity:  Pi_1(r) = 1 / int_1^inf e^{1-u} w(F(ru)) du
///   near zero:      Pi_1(r) = 1 / (int_1^inf e^{1-u} w(F(ru)) du + e^{-r} w(F(R2/2)))
/// The u-integral truncates once the integrand drops below kQuadTruncation of
/// the running sum (e^{1-u} decay guarantees this).
inline ScaleFunction continuize_tail(const ScaleFunction& w, const ScaleFunction& F,
                                     ScalingRegime regime, double R2 = 0.0) {
    if (w.orientation() != Orientation::Decreasing)
        throw ConstructionError("continuize_tail: w must be a decreasing tail");
    if (F.orientation() != Orientation::Increasing)
        throw ConstructionError("continuize_tail: F must be increasing");
    if (regime == ScalingRegime::NearZero && !(R2 > 0.0))
        throw ConstructionError("continuize_tail: near-zero regime needs a cutoff R2");

    double extra = kNegInf;  // log of w(F(R2/2)) for the near-zero cutoff term
    if (regime == ScalingRegime::NearZero)
        extra = w.log_eval(F.log_eval(std::log(R2 / 2.0)));

    auto fn = [w, F, regime, extra](double x) {
        LogFn g = [&](double lu) {
            // substituted u = e^{lu}: integrand e^{1-u} w(F(r u)) du = e^{1-u+lu} w(...) dlu
            double u = std::exp(lu);
            return 1.0 - u + lu + w.log_eval(F.log_eval(x + lu));
        };
        double integral = log_integrate_right(g, 0.0, {}, 1.0, 64);
        if (regime == ScalingRegime::NearZero)
            integral = log_add(integral, -std::exp(x) + extra);
        return -integral;
    };
    // result shares w's composable range; evaluation beyond it raises DomainError
    return ScaleFunction::from_log_fn(fn, 0.0, kInf, Orientation::Increasing,
                                      "continuize(" + w.label() + " o " + F.label() + ")");
}

}  // namespace lillab
