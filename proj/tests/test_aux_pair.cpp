#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "lillab/aux_pair.hpp"

using namespace lillab;

namespace {

// brute-force oracle: direct dense scan of the profile, independent of the
// golden-section / bisection implementation path
struct BruteAux {
    const AuxiliaryPair& pair;
    double t;
    int n = 100000;

    double profile(double rho) const { return t * rho / pair.phi().eval(rho); }

    std::pair<double, double> extremes() const {
        auto [a, b] = pair.rho_interval(std::log(t));
        double mn = kInf, mx = -kInf;
        for (int i = 0; i <= n; ++i) {
            double rho = std::exp(a + (b - a) * i / n);
            double v = profile(rho);
            mn = std::min(mn, v);
            mx = std::max(mx, v);
        }
        return {mn, mx};
    }

    std::pair<double, double> thetas(double r) const {
        auto [a, b] = pair.rho_interval(std::log(t));
        auto [u1, u2] = extremes();
        if (r < u1) return {std::exp(b), std::exp(b)};
        if (r > u2) return {std::exp(a), std::exp(a)};
        double t1 = kInf, t2 = -kInf;
        for (int i = 0; i <= n; ++i) {
            double rho = std::exp(a + (b - a) * i / n);
            double v = profile(rho);
            if (v <= r) t1 = std::min(t1, rho);
            if (v >= r) t2 = std::max(t2, rho);
        }
        return {t1, t2};
    }
};

AuxiliaryPair make_pair(const char* phi, const char* psi, double hi) {
    return AuxiliaryPair(ScaleFunction::from_expression(phi, 0.0, hi),
                         ScaleFunction::from_expression(psi, 0.0, hi));
}

}  // namespace

TEST_CASE("pair construction rejects phi > psi") {
    CHECK_THROWS_AS(make_pair("r", "r^2", 0.9), ConstructionError);  // r^2 < r on (0,1)
    CHECK_NOTHROW(make_pair("r^2", "r", 0.9));
}

TEST_CASE("degenerate pair: Upsilon and vartheta collapse to sqrt(t)") {
    auto pair = make_pair("r^2", "r^2", kInf);
    double t = 0.37;
    CHECK(pair.upsilon1(t) == Catch::Approx(std::sqrt(t)).epsilon(1e-9));
    CHECK(pair.upsilon2(t) == Catch::Approx(std::sqrt(t)).epsilon(1e-9));
    for (double r : {0.0, 1e-8, 0.3, 5.0, 1e9}) {
        CHECK(pair.theta1(t, r) == Catch::Approx(std::sqrt(t)).epsilon(1e-9));
        CHECK(pair.theta2(t, r) == Catch::Approx(std::sqrt(t)).epsilon(1e-9));
    }
}

TEST_CASE("closed-form endpoints for the (r^2, r) pair") {
    auto pair = make_pair("r^2", "r", 0.999);
    double t = 0.01;
    // profile t rho/phi(rho) = t/rho is decreasing on [0.01, 0.1]
    CHECK(pair.upsilon1(t) == Catch::Approx(0.1).epsilon(1e-8));
    CHECK(pair.upsilon2(t) == Catch::Approx(1.0).epsilon(1e-8));
    BruteAux oracle{pair, t};
    auto [mn, mx] = oracle.extremes();
    CHECK(pair.upsilon1(t) == Catch::Approx(mn).epsilon(1e-6));
    CHECK(pair.upsilon2(t) == Catch::Approx(mx).epsilon(1e-6));
}

TEST_CASE("grid-limit: Upsilon2/phi^-1 diverges for (r^3, r^3 |log r|)") {
    auto pair = make_pair("r^3", "r^3*loginv(r)^1", 0.3);
    double prev = 0.0;
    int increases = 0;
    std::vector<double> ts = {1e-6, 1e-12, 1e-18, 1e-27, 1e-36, 1e-48};
    for (double t : ts) {
        double ratio = pair.upsilon2(t) / std::exp(pair.phi().log_inverse(std::log(t)));
        if (ratio > prev) ++increases;
        prev = ratio;
    }
    CHECK(increases == static_cast<int>(ts.size()));
    CHECK(prev > 10.0);
}

TEST_CASE("vartheta middle branch: unique crossing of t/rho") {
    auto pair = make_pair("r^2", "r", 0.999);
    double t = 0.01, r = 0.5;
    CHECK(pair.theta1(t, r) == Catch::Approx(0.02).epsilon(1e-8));
    CHECK(pair.theta2(t, r) == Catch::Approx(0.02).epsilon(1e-8));
    BruteAux oracle{pair, t};
    auto [o1, o2] = oracle.thetas(r);
    CHECK(pair.theta1(t, r) == Catch::Approx(o1).epsilon(1e-4));
    CHECK(pair.theta2(t, r) == Catch::Approx(o2).epsilon(1e-4));
}

TEST_CASE("vartheta boundary branches") {
    auto pair = make_pair("r^2", "r", 0.999);
    double t = 0.01;
    double u1 = pair.upsilon1(t), u2 = pair.upsilon2(t);
    double phi_inv = std::sqrt(t), psi_inv = t;
    CHECK(pair.theta1(t, 0.5 * u1) == Catch::Approx(phi_inv).epsilon(1e-9));
    CHECK(pair.theta2(t, 0.5 * u1) == Catch::Approx(phi_inv).epsilon(1e-9));
    CHECK(pair.theta1(t, 2.0 * u2) == Catch::Approx(psi_inv).epsilon(1e-9));
    CHECK(pair.theta2(t, 2.0 * u2) == Catch::Approx(psi_inv).epsilon(1e-9));
}

TEST_CASE("lemma 4.1 check: slack vanishes exactly at the crossing branch") {
    auto pair = make_pair("r^2", "r", 0.999);
    auto res = lemma41_check(pair, 0.5, 0.01, 1.0);
    CHECK(res.ok);
    // eps r / theta1 = 0.5/0.02 = 25 and t/phi(theta1) = 0.01/0.0004 = 25
    CHECK(std::abs(res.slack) < 1e-4);
}

TEST_CASE("lemma 4.1 check: positive slack for the degenerate pair") {
    auto pair = make_pair("r^2", "r^2", kInf);
    double t = 0.04, eps = 0.5, r = 1.0;  // sqrt(t) = 0.2 <= 0.5
    auto res = lemma41_check(pair, eps, t, r);
    CHECK(res.ok);
    CHECK(res.slack > 0.0);
    CHECK_THROWS_AS(lemma41_check(pair, 0.1, 1.0, 1.0), DomainError);  // pre fails
}

TEST_CASE("lemma 4.1 check: grid sweep incl. eps near 1") {
    auto pair = make_pair("r^3", "r^3*loginv(r)^1", 0.3);
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int tried = 0;
    for (int i = 0; i < 4000 && tried < 1000; ++i) {
        double t = std::exp(-30.0 + 25.0 * u(rng));
        double eps = (i % 3 == 0) ? 1.0 - 1e-3 : 0.3 + 0.69 * u(rng);
        double r = std::exp(-6.0 + 5.0 * u(rng));
        double u1 = pair.upsilon1(t);
        if (u1 > eps * r) continue;
        ++tried;
        auto res = lemma41_check(pair, eps, t, r);
        CHECK(res.ok);
    }
    CHECK(tried >= 500);
}

TEST_CASE("lemma 4.2 exponential bound: psi = r with k = 1 is e^-x <= 1/x") {
    auto psi = ScaleFunction::from_expression("r", 0.0, kInf);
    auto cert = check_scaling(psi, ScalingKind::Upper, ScalingRegime::Global, 1.0, 1.0);
    REQUIRE(cert.holds);
    for (double t : {0.01, 0.5, 2.0}) {
        for (double mult : {1.0, 1.5, 10.0, 1e4}) {
            auto res = exp_bound_check(psi, cert, 1.0, t, t * mult);
            CHECK(res.ok);
        }
    }
}

TEST_CASE("lemma 4.2 exponential bound: psi = r^3 near zero with k = 2") {
    auto psi = ScaleFunction::from_expression("r^3", 0.0, kInf);
    auto cert = check_scaling(psi, ScalingKind::Upper, ScalingRegime::NearZero, 3.0, 1.0, 1.0);
    REQUIRE(cert.holds);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 500; ++i) {
        double t = std::exp(-20.0 + 14.0 * u(rng));
        double r = std::exp(std::log(std::cbrt(t)) + 4.0 * u(rng));
        auto res = exp_bound_check(psi, cert, 2.0, t, r);
        CHECK(res.ok);
    }
}

TEST_CASE("lemma 4.2 endpoint arithmetic: k = 10 at r = psi^-1(t)") {
    auto psi = ScaleFunction::from_expression("r", 0.0, kInf);
    auto cert = check_scaling(psi, ScalingKind::Upper, ScalingRegime::Global, 1.0, 1.0);
    double t = 0.3;
    auto res = exp_bound_check(psi, cert, 10.0, t, t);
    CHECK(res.ok);
    // e^-10 <= 10^-1 directly
    CHECK(std::exp(-10.0) <= 0.1);
}

TEST_CASE("exit tail upper: clamp and plug-in arithmetic") {
    auto pair = make_pair("r^2", "r", 0.999);
    EnvelopeConstants c;
    CHECK(exit_tail_upper(pair, c, 0.9, 0.5) == 1.0);  // t/psi(r) = 1.8 clamps
    double v = exit_tail_upper(pair, c, 0.01, 0.5);
    CHECK(v == Catch::Approx(0.02 + std::exp(-25.0)).epsilon(1e-8));
}

TEST_CASE("exit tail upper with phi = psi reduces to the EP_0 form") {
    auto pair = make_pair("r^2", "r^2", kInf);
    EnvelopeConstants c;
    // via the exponential lemma with beta2 = 2, C_U = 1, C8 = 1:
    // bound <= C7 (1 + 4) t / phi(r) whenever t <= phi(r)
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 300; ++i) {
        double r = std::exp(-4.0 + 8.0 * u(rng));
        double t = pair.phi().eval(r) * u(rng);
        if (t <= 0) continue;
        double v = exit_tail_upper(pair, c, t, r);
        CHECK(v <= 5.0 * t / pair.phi().eval(r) + 1e-12);
    }
}

TEST_CASE("exit tail lower: mirrors the upper for strictly monotone profiles") {
    auto pair = make_pair("r^2", "r", 0.999);
    EnvelopeConstants c;
    double v = exit_tail_lower(pair, c, 0.01, 0.5);
    CHECK(v == Catch::Approx(0.02 + std::exp(-25.0)).epsilon(1e-8));
    CHECK_THROWS_AS(exit_tail_lower(pair, c, 0.9, 0.5), DomainError);  // t > phi(r)
}

TEST_CASE("exit tail lower: third branch uses psi^-1(t)") {
    auto pair = make_pair("r^2", "r", 0.999);
    // for psi = r the profile max Upsilon2(t) = 1, so engage the branch via C12
    double t = 1e-4;
    double r = 0.9;
    EnvelopeConstants c;
    c.c12 = 2.0;
    REQUIRE(c.c12 * r > pair.upsilon2(t));
    REQUIRE(t <= pair.phi().eval(r));
    double vb = exit_tail_lower(pair, c, t, r);
    double psi_inv = t;
    double expect = std::min(1.0, t / r + std::exp(-r / psi_inv));
    CHECK(vb == Catch::Approx(expect).epsilon(1e-6));
}

TEST_CASE("lower envelope never exceeds upper for unit constants (collapsing profile)") {
    auto pair = make_pair("r^2", "r", 0.999);
    EnvelopeConstants c;
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 300; ++i) {
        double r = std::exp(-5.0 + 4.9 * u(rng));
        double t = pair.phi().eval(r) * std::pow(u(rng), 2.0);
        if (!(t > 0)) continue;
        double lo = exit_tail_lower(pair, c, t, r);
        double hi = exit_tail_upper(pair, c, t, r);
        CHECK(lo <= hi + 1e-12);
    }
}

TEST_CASE("survival envelope") {
    EnvelopeConstants c;
    c.a1 = 2.0;
    c.a2 = 0.5;
    auto [lo, hi] = survival_envelope(c, 1);
    CHECK(lo == Catch::Approx(std::exp(-2.0)));
    CHECK(hi == Catch::Approx(std::exp(-0.5)));
    // log-linear in n
    auto [lo3, hi3] = survival_envelope(c, 3);
    CHECK(std::log(hi3) - std::log(lo3) == Catch::Approx(3 * (2.0 - 0.5)));
}

TEST_CASE("property battery over the catalog pairs") {
    struct P {
        const char* phi;
        const char* psi;
        double hi;
        double lt_lo, lt_hi;  // log t sampling range
    };
    P cases[] = {
        {"r^2", "r^2", 1e12, -20.0, 10.0},
        {"r^2", "r", 0.999, -12.0, -0.5},
        {"r^3", "r^3*loginv(r)^1", 0.3, -30.0, -5.0},
        {"r^2", "r^2*loginv(r)^2", 0.3, -30.0, -4.0},
        {"loginv(r)^-0.5", "3.8779*loginv(r)^-0.5", 0.2, -1.0, -0.3},
    };
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> uu(0.0, 1.0);
    for (const auto& pc : cases) {
        auto pair = make_pair(pc.phi, pc.psi, pc.hi);
        INFO("pair " << pc.phi << " / " << pc.psi);
        for (int i = 0; i < 1000; ++i) {
            double log_t = pc.lt_lo + (pc.lt_hi - pc.lt_lo) * uu(rng);
            double lphi_inv = pair.phi().log_inverse(log_t);
            double lu1 = pair.log_upsilon(log_t, true);
            double lu2 = pair.log_upsilon(log_t, false);
            // sandwich
            REQUIRE(lu1 <= lphi_inv + 1e-9);
            REQUIRE(lu2 >= lphi_inv - 1e-9);
            // monotone in r and ordered
            double lr1 = lu1 + (lu2 - lu1 + 2.0) * uu(rng) - 1.0;
            double lr2 = lr1 + 2.0 * uu(rng);
            double th1_a = pair.log_theta(log_t, lr1, true);
            double th1_b = pair.log_theta(log_t, lr2, true);
            double th2_a = pair.log_theta(log_t, lr1, false);
            double th2_b = pair.log_theta(log_t, lr2, false);
            REQUIRE(th1_a >= th1_b - 1e-8);
            REQUIRE(th2_a >= th2_b - 1e-8);
            REQUIRE(th1_a <= th2_a + 1e-8);
            // range
            auto [a, b] = pair.rho_interval(log_t);
            REQUIRE(th1_a >= a - 1e-9);
            REQUIRE(th2_a <= b + 1e-9);
            // defining inequality on the middle branch
            if (lr1 >= lu1 && lr1 <= lu2) {
                REQUIRE(pair.log_profile(log_t, th1_a) <= lr1 + 1e-6);
                REQUIRE(pair.log_profile(log_t, th2_a) >= lr1 - 1e-6);
            }
        }
    }
}
