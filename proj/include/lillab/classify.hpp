#pragma once

// LIL regime classification: the psi/phi ratio dichotomy, the Khintchine-type
// and sup-form integral tests, and rate-function synthesis.
//
// Integral verdicts are horizon-stamped, declared decision rules, not proofs.
// Shells are geometric in the iterated-log variable u = log|log t| (ratio
// 2^(1/4), u in [1, 64]); in that variable every tail the tests must separate
// is genuinely geometric, so the fitted-ratio rule has wide margins. All
// integrands run through log-space arithmetic, so shell boundaries like
// t = exp(-e^64) are exact.

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "lillab/aux_pair.hpp"
#include "lillab/defaults.hpp"
#include "lillab/errors.hpp"
#include "lillab/math_util.hpp"
#include "lillab/quadrature.hpp"
#include "lillab/rate_function.hpp"
#include "lillab/scale_function.hpp"

namespace lillab {

// ---------------------------------------------------------------------------
// ratio dichotomy

enum class DichotomyClass { A1, A2 };

struct RegimeVerdict {
    DichotomyClass cls = DichotomyClass::A1;
    Regime regime = Regime::Zero;
    bool borderline = false;
    double horizon = 0.0;        // the r actually reached
    double growth_log = 0.0;     // log of running-max end / first-decade max
    std::vector<double> trace_log_r;
    std::vector<double> trace_log_ratio;
    std::vector<double> trace_running_max;
};

namespace detail {

/// Shared verdict rule for a ratio trace ordered toward the regime limit:
/// stabilized running max -> A1; growth beyond the divergence factor -> A2;
/// otherwise borderline (class by whether growth exceeds 2x).
inline void classify_trace(RegimeVerdict& v) {
    const auto& rm = v.trace_running_max;
    std::size_t n = rm.size();
    if (n < 2 * static_cast<std::size_t>(defaults::kTracePointsPerDecade))
        throw NumericError("ratio trace too short to classify");
    std::size_t dec = defaults::kTracePointsPerDecade;
    double first_decade_max = rm[dec - 1];
    double growth = rm[n - 1] - first_decade_max;
    double last_decade_change = rm[n - 1] - rm[n - 1 - dec];
    v.growth_log = growth;
    if (last_decade_change < defaults::kStabilizationTol) {
        v.cls = DichotomyClass::A1;
        v.borderline = false;
    } else if (growth >= std::log(defaults::kDivergenceFactor)) {
        v.cls = DichotomyClass::A2;
        v.borderline = false;
    } else {
        v.cls = growth >= std::log(2.0) ? DichotomyClass::A2 : DichotomyClass::A1;
        v.borderline = true;
    }
}

}  // namespace detail

/// Evaluates psi(r)/phi(r) on a log grid toward the regime limit and
/// classifies by the declared running-max rule. The trace is always returned
/// for inspection of borderline cases.
inline RegimeVerdict ratio_dichotomy(const AuxiliaryPair& pair, Regime regime,
                                     double horizon = 0.0) {
    RegimeVerdict v;
    v.regime = regime;
    double x_near, x_far;
    if (regime == Regime::Zero) {
        if (horizon <= 0.0) horizon = defaults::kHorizonZero;
        x_near = std::min(std::log(0.25), std::min(pair.phi().log_domain_hi(),
                                                   pair.psi().log_domain_hi()) -
                                              1e-6);
        x_far = std::log(horizon);
        if (!(x_far < x_near)) throw DomainError("horizon above the trace start");
    } else {
        if (horizon <= 0.0) horizon = defaults::kHorizonInfinity;
        x_near = std::max(std::log(4.0), std::max(pair.phi().log_domain_lo(),
                                                  pair.psi().log_domain_lo()) +
                                             1e-6);
        x_far = std::log(horizon);
        if (!(x_far > x_near)) throw DomainError("horizon below the trace start");
    }
    int n = std::max(2 * defaults::kTracePointsPerDecade,
                     static_cast<int>(std::abs(x_far - x_near) / std::log(10.0) *
                                      defaults::kTracePointsPerDecade));
    double run = kNegInf;
    for (int i = 0; i <= n; ++i) {
        double x = x_near + (x_far - x_near) * i / n;
        double lr = pair.psi().log_eval(x) - pair.phi().log_eval(x);
        run = std::max(run, lr);
        v.trace_log_r.push_back(x);
        v.trace_log_ratio.push_back(lr);
        v.trace_running_max.push_back(run);
    }
    v.horizon = horizon;
    detail::classify_trace(v);
    return v;
}

// ---------------------------------------------------------------------------
// integral tests

enum class IntegralVerdict { Finite, Infinite, Inconclusive };

inline const char* verdict_name(IntegralVerdict v) {
    switch (v) {
        case IntegralVerdict::Finite: return "finite";
        case IntegralVerdict::Infinite: return "infinite";
        default: return "inconclusive";
    }
}

struct ShellReport {
    IntegralVerdict verdict = IntegralVerdict::Inconclusive;
    double fitted_rho = 0.0;  // per-shell ratio from the last-window LS fit
    std::vector<double> log_shells;
};

/// g(u) must be the log-integrand of the full integral after substituting
/// u = log|log t| (Jacobian included). Shells are geometric in u.
inline ShellReport shell_test(const LogFn& g) {
    ShellReport rep;
    double q = std::exp2(defaults::kShellRatioLog2);
    // verdicts need log-shell accuracy ~1e-3; a tight tolerance would chase the
    // eps*|log t| rounding floor of the integrand instead
    QuadOptions opts{1e-6, 18, defaults::kQuadTruncation};
    std::vector<double>& shells = rep.log_shells;
    for (double u = defaults::kShellUMin; u * q <= defaults::kShellUMax * (1 + 1e-12); u *= q)
        shells.push_back(log_integrate(g, u, u * q, opts, 1.0));
    std::size_t n = shells.size();
    std::size_t m = static_cast<std::size_t>(defaults::kShellFitCount);
    if (n < 2 * m) throw NumericError("too few shells for the verdict rule");

    std::vector<double> idx(m), tail(m);
    for (std::size_t i = 0; i < m; ++i) {
        idx[i] = static_cast<double>(i);
        tail[i] = shells[n - m + i];
    }
    rep.fitted_rho = std::exp(ls_slope(idx, tail));
    if (rep.fitted_rho <= defaults::kShellRhoFinite) {
        rep.verdict = IntegralVerdict::Finite;
        return rep;
    }
    double min_last = kInf, max_first = kNegInf;
    for (std::size_t i = 0; i < m; ++i) {
        min_last = std::min(min_last, shells[n - m + i]);
        max_first = std::max(max_first, shells[i]);
    }
    if (min_last >= max_first + std::log(defaults::kShellInfiniteFloor))
        rep.verdict = IntegralVerdict::Infinite;
    return rep;
}

/// Khintchine-type test: int dt / phi(Psi(t)) toward the regime limit.
inline ShellReport khintchine_test(const ScaleFunction& phi, const RateFunction& rate,
                                   Regime regime) {
    double sgn = regime == Regime::Zero ? -1.0 : 1.0;
    LogFn g = [&phi, &rate, sgn](double u) {
        double x_t = sgn * std::exp(u);
        return x_t + u - phi.log_eval(rate.log_eval(x_t));
    };
    return shell_test(g);
}

namespace detail {

inline ShellReport sup_integral_test(const AuxiliaryPair& pair, Regime regime) {
    double sgn = regime == Regime::Zero ? -1.0 : 1.0;
    // integrand phi(r) LL / (r psi(r LL)) dr with LL = log|log r| = u
    LogFn g = [&pair, sgn](double u) {
        double x = sgn * std::exp(u);
        return pair.phi().log_eval(x) + std::log(u) - pair.psi().log_eval(x + std::log(u)) + u;
    };
    return shell_test(g);
}

}  // namespace detail

inline ShellReport integral_test_zero(const AuxiliaryPair& pair) {
    return detail::sup_integral_test(pair, Regime::Zero);
}

inline ShellReport integral_test_infinity(const AuxiliaryPair& pair) {
    return detail::sup_integral_test(pair, Regime::Infinity);
}

// ---------------------------------------------------------------------------
// rate synthesis

inline RateFunction rate_fn_closed(const ScaleFunction& phi, Regime regime) {
    return RateFunction::closed_form(phi, regime);
}

namespace detail {

// nudge x down/up until pred holds exactly in double arithmetic
template <class P>
double enforce(P&& pred, double x, bool downward) {
    for (int i = 0; i < 64 && !pred(x); ++i)
        x += (downward ? -1.0 : 1.0) * 1e-12 * std::max(1.0, std::abs(x)) * std::exp2(i);
    if (!pred(x)) throw NumericError("rate sequence: could not enforce the inequality exactly");
    return x;
}

}  // namespace detail

/// Builds the step rate (e:defsn / e:defPsi). Near zero: for n = 4..n_max,
/// s_n is the largest value with n phi(s_n) (log n)^{2+delta} <= psi(s_n log n)
/// and 4 phi(s_n) <= phi(s_{n-1}); near infinity the smallest valid value,
/// with psi capped by phi(1 + r^sqrt(kUpsilonRatio)) as the existence proof
/// requires, and s_n >= e^n. Every emitted knot re-verifies both inequalities
/// exactly before being accepted.
inline RateFunction rate_fn_sequence(const AuxiliaryPair& pair, double delta, Regime regime,
                                     int n_max = defaults::kRateNMax,
                                     double upsilon_ratio = defaults::kUpsilonRatio) {
    if (!(delta > 0)) throw DomainError("rate_fn_sequence: delta must be positive");
    if (n_max < 6) throw DomainError("rate_fn_sequence: n_max too small");
    const ScaleFunction& phi = pair.phi();
    const ScaleFunction& psi = pair.psi();
    const double cap_exp = std::sqrt(upsilon_ratio);

    auto log_psi_eff = [&](double x) {
        if (regime == Regime::Zero) return psi.log_eval(x);
        // psi_cap(r) = psi(r) /\ phi(1 + r^cap_exp)
        double arg = log_add(0.0, cap_exp * x);
        return std::min(psi.log_eval(x), phi.log_eval(arg));
    };

    // constraint A at index n, log-scale s: psi_eff(s log n) >= n phi(s) (log n)^{2+delta}
    auto slack_a = [&](int n, double ls) {
        double lln = std::log(std::log(static_cast<double>(n)));
        return log_psi_eff(ls + lln) -
               (std::log(static_cast<double>(n)) + phi.log_eval(ls) + (2.0 + delta) * lln);
    };

    std::vector<double> log_s, log_t, log_v;
    const bool zero = regime == Regime::Zero;
    double bound = zero ? std::min(phi.log_domain_hi(), psi.log_domain_hi()) - 2.0 : kNegInf;

    for (int n = 4; n <= n_max; ++n) {
        double lln = std::log(std::log(static_cast<double>(n)));
        if (!log_s.empty()) {
            double prev_phi = phi.log_eval(log_s.back());
            double edge = zero ? phi.log_inverse(prev_phi - std::log(4.0))
                               : phi.log_inverse(prev_phi + std::log(4.0));
            bound = edge;
        }
        if (!zero) bound = std::max(bound, static_cast<double>(n));

        // find a feasible point by marching away from the bound
        double probe = bound, step = 4.0;
        bool found = slack_a(n, probe) >= 0.0;
        for (int i = 0; i < 300 && !found; ++i) {
            probe += zero ? -step : step;
            if (std::abs(probe) > 5e5) break;
            found = slack_a(n, probe) >= 0.0;
        }
        if (!found)
            throw NumericError("rate_fn_sequence infeasible at n = " + std::to_string(n) +
                               " (binding constraint: psi/phi gap too small; pair not A2 at "
                               "this scale)");
        // bisect toward the extreme admissible value (largest near zero,
        // smallest near infinity), between the feasible probe and the bound
        double in = probe, out = bound;
        if (slack_a(n, out) >= 0.0) {
            in = out;  // the cap itself is admissible
        } else {
            for (int it = 0; it < 200 && std::abs(out - in) >
                                             1e-13 * (std::abs(in) + std::abs(out) + 1.0);
                 ++it) {
                double mid = 0.5 * (in + out);
                (slack_a(n, mid) >= 0.0 ? in : out) = mid;
            }
        }
        // exact re-verification of both inequalities at the emitted knot
        auto ok = [&](double ls) {
            if (slack_a(n, ls) < 0.0) return false;
            if (!log_s.empty()) {
                double lhs = phi.log_eval(ls), prev = phi.log_eval(log_s.back());
                if (zero && !(std::log(4.0) + lhs <= prev)) return false;
                if (!zero && !(std::log(4.0) + prev <= lhs)) return false;
            }
            if (!zero && !(ls >= n)) return false;
            return true;
        };
        double ls = detail::enforce(ok, in, /*downward=*/zero);
        log_s.push_back(ls);
        log_t.push_back(phi.log_eval(ls) + lln);
        log_v.push_back(ls + lln);
    }

    std::string prov = std::string("sequence(delta=") + format_double(delta) + ")";
    if (zero) {
        // knots descend with n; flip to ascending t order
        std::vector<double> kt(log_t.rbegin(), log_t.rend());
        std::vector<double> kv(log_v.rbegin(), log_v.rend());
        return RateFunction::step(std::move(kt), std::move(kv), regime, prov);
    }
    return RateFunction::step(std::move(log_t), std::move(log_v), regime, prov);
}

// ---------------------------------------------------------------------------
// factorization probe

struct FactorizationProbe {
    double liminf_estimate = 0.0;
    double limsup_estimate = 0.0;
    std::vector<double> trace_log_t;
    std::vector<double> trace_factor_log;
    std::vector<double> running_min_log, running_max_log;
};

/// Running min/max of f(t) = Psi(t)/Psi_1(t) over a dyadic grid toward the
/// regime limit, restricted to the step rate's knot range when applicable.
inline FactorizationProbe factorization_probe(const RateFunction& rate, const ScaleFunction& phi,
                                              Regime regime) {
    RateFunction psi1 = rate_fn_closed(phi, regime);
    double x_start, x_end;
    if (rate.is_step()) {
        x_start = rate.log_knots().back();
        x_end = rate.log_knots().front() + 1e-9;
        if (regime == Regime::Infinity) {
            x_start = rate.log_knots().front() + 1e-9;
            x_end = rate.log_knots().back();
        }
    } else {
        x_start = regime == Regime::Zero ? -1.5 : 1.5;
        x_end = regime == Regime::Zero ? std::log(defaults::kHorizonZero)
                                       : std::log(defaults::kHorizonInfinity);
    }
    // dyadic trace from the near end toward the limit
    FactorizationProbe p;
    double run_min = kInf, run_max = kNegInf;
    double from = regime == Regime::Zero ? std::max(x_start, x_end) : std::min(x_start, x_end);
    double to = regime == Regime::Zero ? std::min(x_start, x_end) : std::max(x_start, x_end);
    double dir = regime == Regime::Zero ? -std::log(2.0) : std::log(2.0);
    for (double x = from;; x += dir) {
        if (regime == Regime::Zero ? x < to : x > to) break;
        if (std::abs(x) <= 1.05) continue;  // closed form needs |log t| > 1
        double f = rate.log_eval(x) - psi1.log_eval(x);
        run_min = std::min(run_min, f);
        run_max = std::max(run_max, f);
        p.trace_log_t.push_back(x);
        p.trace_factor_log.push_back(f);
        p.running_min_log.push_back(run_min);
        p.running_max_log.push_back(run_max);
    }
    if (p.trace_log_t.empty()) throw NumericError("factorization probe: empty grid");
    p.liminf_estimate = std::exp(run_min);
    p.limsup_estimate = std::exp(run_max);
    return p;
}

}  // namespace lillab
