#pragma once

// Auxiliary functions for exit-time tail estimates. For a pair phi <= psi the
// chaining profile g(rho) = t rho / phi(rho) is scanned over
// [psi^-1(t), phi^-1(t)]; Upsilon_1/Upsilon_2 are its extremes and
// vartheta_1/vartheta_2 the extreme level-rho crossings of g against r.
// vartheta measures the number of chaining steps needed to reach distance r
// by time t, which is what the tail envelopes exponentiate.

#include <cmath>
#include <utility>

#include "lillab/defaults.hpp"
#include "lillab/errors.hpp"
#include "lillab/math_util.hpp"
#include "lillab/scale_function.hpp"

namespace lillab {

struct EnvelopeConstants {
    double c7 = 1.0, c8 = 1.0, c9 = 1.0;     // upper envelope
    double c10 = 1.0, c11 = 1.0, c12 = 1.0;  // lower envelope
    double a1 = 2.0, a2 = 0.5, c1p = 1.0;    // survival exponents and radius factor

    void validate() const {
        if (!(c8 > 0 && c9 > 0 && c11 > 0 && c12 > 0))
            throw ConstructionError("envelope constants C8, C9, C11, C12 must be positive");
        if (!(a1 >= a2 && a2 > 0)) throw ConstructionError("survival needs a1 >= a2 > 0");
    }
};

class AuxiliaryPair {
public:
    AuxiliaryPair(ScaleFunction phi, ScaleFunction psi,
                  int rho_grid_size = defaults::kRhoGridSize)
        : phi_(std::move(phi)), psi_(std::move(psi)), rho_grid_(rho_grid_size) {
        if (phi_.orientation() != Orientation::Increasing ||
            psi_.orientation() != Orientation::Increasing)
            throw ConstructionError("pair requires increasing scale functions");
        log_lo_ = std::max(phi_.log_domain_lo(), psi_.log_domain_lo());
        log_hi_ = std::min(phi_.log_domain_hi(), psi_.log_domain_hi());
        if (!(log_lo_ < log_hi_)) throw ConstructionError("pair domains do not overlap");
        double glo = std::max(log_lo_, defaults::kGridLogLo);
        double ghi = std::min(log_hi_, defaults::kGridLogHi);
        double inset = 1e-6 * (ghi - glo);
        for (int i = 0; i < 64; ++i) {
            double x = glo + inset + (ghi - glo - 2 * inset) * i / 63.0;
            if (phi_.log_eval(x) > psi_.log_eval(x) + 1e-12)
                throw ConstructionError("phi(r) <= psi(r) violated at r = " +
                                        format_double(std::exp(x)));
        }
    }

    const ScaleFunction& phi() const { return phi_; }
    const ScaleFunction& psi() const { return psi_; }

    double log_phi_inv(double log_t) const { return phi_.log_inverse(log_t); }
    double log_psi_inv(double log_t) const { return psi_.log_inverse(log_t); }

    double upsilon1(double t) const { return std::exp(log_upsilon(std::log(t), /*want_min=*/true)); }
    double upsilon2(double t) const { return std::exp(log_upsilon(std::log(t), /*want_min=*/false)); }

    double theta1(double t, double r) const {
        return std::exp(log_theta(std::log(t), r <= 0.0 ? kNegInf : std::log(r), true));
    }
    double theta2(double t, double r) const {
        return std::exp(log_theta(std::log(t), r <= 0.0 ? kNegInf : std::log(r), false));
    }

    /// log g(rho) = log t + log rho - log phi(rho)
    double log_profile(double log_t, double log_rho) const {
        return log_t + log_rho - phi_.log_eval(log_rho);
    }

    /// Extreme of the profile over [psi^-1(t), phi^-1(t)]: grid scan plus
    /// golden-section refinement on the best bracket.
    double log_upsilon(double log_t, bool want_min) const {
        auto [a, b] = rho_interval(log_t);
        if (b - a < 1e-14) return log_profile(log_t, b);
        int n = rho_grid_;
        double best = kInf * (want_min ? 1 : -1);
        int best_i = 0;
        for (int i = 0; i < n; ++i) {
            double x = a + (b - a) * i / (n - 1);
            double v = log_profile(log_t, x);
            if (want_min ? v < best : v > best) {
                best = v;
                best_i = i;
            }
        }
        double lo = a + (b - a) * std::max(0, best_i - 1) / (n - 1);
        double hi = a + (b - a) * std::min(n - 1, best_i + 1) / (n - 1);
        auto f = [&](double x) {
            double v = log_profile(log_t, x);
            return want_min ? v : -v;
        };
        auto [x_star, v_star] = golden_section_min(f, lo, hi, defaults::kGoldenRelTol);
        (void)x_star;
        double refined = want_min ? v_star : -v_star;
        // the endpoint rho = phi^-1(t) has profile exactly phi^-1(t); keep the
        // guaranteed sandwich Upsilon_1 <= phi^-1(t) <= Upsilon_2
        double at_end = log_profile(log_t, b);
        return want_min ? std::min(refined, at_end) : std::max(refined, at_end);
    }

    /// Three-branch vartheta (log-space). first=true gives vartheta_1.
    double log_theta(double log_t, double log_r, bool first) const {
        auto [a, b] = rho_interval(log_t);  // a = log psi^-1(t), b = log phi^-1(t)
        if (b - a < 1e-14) return b;
        double u1 = log_upsilon(log_t, true), u2 = log_upsilon(log_t, false);
        if (log_r < u1) return b;
        if (log_r > u2) return a;
        int n = rho_grid_;
        auto g = [&](double x) { return log_profile(log_t, x); };
        if (first) {
            // min{rho : g(rho) <= r}; scan left to right for the first admissible point
            double prev_x = a, prev_g = g(a);
            if (prev_g <= log_r) return a;
            for (int i = 1; i < n; ++i) {
                double x = a + (b - a) * i / (n - 1);
                double gy = g(x);
                if (gy <= log_r) return bisect_crossing(g, prev_x, x, log_r, /*descending=*/true);
                prev_x = x;
                prev_g = gy;
            }
            return b;  // g > r up to the endpoint; r must equal u1 numerically
        }
        // max{rho : g(rho) >= r}; scan right to left
        double prev_x = b, prev_g = g(b);
        if (prev_g >= log_r) return b;
        for (int i = n - 2; i >= 0; --i) {
            double x = a + (b - a) * i / (n - 1);
            double gy = g(x);
            if (gy >= log_r) return bisect_crossing(g, x, prev_x, log_r, /*descending=*/true);
            prev_x = x;
            prev_g = gy;
        }
        return a;
    }

    std::pair<double, double> rho_interval(double log_t) const {
        double a = psi_.log_inverse(log_t);
        double b = phi_.log_inverse(log_t);
        if (a > b + 1e-12) throw DomainError("inverse-range mismatch: psi^-1(t) > phi^-1(t)");
        return {a, std::max(a, b)};
    }

private:
    ScaleFunction phi_, psi_;
    int rho_grid_;
    double log_lo_ = 0, log_hi_ = 0;

    // locate g = target inside [lo, hi] where g passes from >target to <=target
    // (descending) or the reverse; returns the crossing abscissa
    template <class G>
    static double bisect_crossing(G&& g, double lo, double hi, double target, bool descending) {
        for (int it = 0; it < 80 && hi - lo > 1e-15 * (std::abs(lo) + std::abs(hi) + 1.0); ++it) {
            double mid = 0.5 * (lo + hi);
            bool left_side = descending ? g(mid) > target : g(mid) < target;
            if (left_side)
                lo = mid;
            else
                hi = mid;
        }
        return 0.5 * (lo + hi);
    }
};

struct CheckResult {
    bool ok = false;
    double slack = 0.0;
};

/// Lemma-backed inequality: with Upsilon_1(t) <= eps r,
///   eps r / vartheta_1(t, eps r) >= t / phi(vartheta_1(t, eps r)).
/// Failures indicate numeric bugs, not mathematical possibilities.
inline CheckResult lemma41_check(const AuxiliaryPair& pair, double eps, double t, double r) {
    if (!(eps > 0 && eps < 1)) throw DomainError("lemma41_check: eps must be in (0,1)");
    double log_t = std::log(t);
    double log_er = std::log(eps) + std::log(r);
    if (pair.log_upsilon(log_t, true) > log_er + 1e-12)
        throw DomainError("lemma41_check: precondition Upsilon_1(t) <= eps r fails");
    double lth = pair.log_theta(log_t, log_er, true);
    double lhs = log_er - lth;
    double rhs = log_t - pair.phi().log_eval(lth);
    return {lhs >= rhs - 1e-8, std::exp(lhs) - std::exp(rhs)};
}

/// Lemma-backed exponential bound: under U(psi, beta3, C_U') and
/// psi^-1(t) <= r, exp(-k r / psi^-1(t)) <= C_U' beta3^beta3 k^-beta3 t/psi(r).
inline CheckResult exp_bound_check(const ScaleFunction& psi, const ScalingCertificate& cert,
                                   double k, double t, double r) {
    if (cert.kind != ScalingKind::Upper || !cert.holds)
        throw DomainError("exp_bound_check: needs a holding upper certificate for psi");
    double beta3 = cert.beta, cu = cert.c;
    double log_t = std::log(t);
    double lpsi_inv = psi.log_inverse(log_t);
    if (lpsi_inv > std::log(r) + 1e-12)
        throw DomainError("exp_bound_check: precondition psi^-1(t) <= r fails");
    double lhs = -k * std::exp(std::log(r) - lpsi_inv);
    double rhs = std::log(cu) + beta3 * std::log(beta3) - beta3 * std::log(k) + log_t -
                 psi.log_eval(std::log(r));
    return {lhs <= rhs + 1e-8, rhs - lhs};
}

/// Upper exit-time tail envelope: min(1, C7 (t/psi(r) + exp(-C8 r / vartheta_1(t, C9 r)))).
inline double exit_tail_upper(const AuxiliaryPair& pair, const EnvelopeConstants& c, double t,
                              double r) {
    c.validate();
    double log_t = std::log(t), log_r = std::log(r);
    double jump = log_t - pair.psi().log_eval(log_r);
    double lth = pair.log_theta(log_t, log_r + std::log(c.c9), true);
    double chain = -c.c8 * std::exp(log_r - lth);
    double v = c.c7 * std::exp(log_add(jump, chain));
    return std::min(1.0, v);
}

/// Lower exit-time tail envelope: C10 (t/psi(r) + exp(-C11 r / vartheta_2(t, C12 r))),
/// valid for t <= phi(a r); clamped to [0, 1].
inline double exit_tail_lower(const AuxiliaryPair& pair, const EnvelopeConstants& c, double t,
                              double r, double a = 1.0) {
    c.validate();
    double log_t = std::log(t), log_r = std::log(r);
    if (log_t > pair.phi().log_eval(std::log(a) + log_r) + 1e-12)
        throw DomainError("exit_tail_lower: precondition t <= phi(a r) fails");
    double jump = log_t - pair.psi().log_eval(log_r);
    double lth = pair.log_theta(log_t, log_r + std::log(c.c12), false);
    double chain = -c.c11 * std::exp(log_r - lth);
    double v = c.c10 * std::exp(log_add(jump, chain));
    return std::clamp(v, 0.0, 1.0);
}

/// Two-sided envelope for P(tau >= n phi(C1' r)): (e^{-a1 n}, e^{-a2 n}).
inline std::pair<double, double> survival_envelope(const EnvelopeConstants& c, int n) {
    c.validate();
    if (n < 1) throw DomainError("survival_envelope: n >= 1");
    return {std::exp(-c.a1 * n), std::exp(-c.a2 * n)};
}

}  // namespace lillab
