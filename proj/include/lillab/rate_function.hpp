#pragma once

// Rate functions Psi for limsup laws: either the closed form
// phi^-1(t / loglog) * loglog (with the running-sup monotone correction near
// zero, where the raw form can dip), or a step function built from a sequence
// of knots (t_n) and values (s_n log n).

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "lillab/errors.hpp"
#include "lillab/math_util.hpp"
#include "lillab/scale_function.hpp"

namespace lillab {

enum class Regime { Zero, Infinity };

inline const char* regime_name(Regime r) { return r == Regime::Zero ? "zero" : "infinity"; }

class RateFunction {
public:
    static RateFunction closed_form(ScaleFunction phi, Regime regime) {
        auto im = std::make_shared<Impl>();
        im->phi = std::move(phi);
        im->regime = regime;
        im->provenance = "closed-form";
        if (regime == Regime::Zero) im->build_correction();
        RateFunction rf;
        rf.impl_ = std::move(im);
        return rf;
    }

    /// Wraps an increasing scale function of t as a rate.
    static RateFunction from_scale(ScaleFunction f, Regime regime) {
        if (f.orientation() != Orientation::Increasing)
            throw ConstructionError("rate functions must be nondecreasing");
        auto im = std::make_shared<Impl>();
        im->phi = std::move(f);
        im->regime = regime;
        im->raw_scale = true;
        im->provenance = "scale";
        RateFunction rf;
        rf.impl_ = std::move(im);
        return rf;
    }

    /// Step rate from knots: log_t ascending with matching log values.
    /// Near zero the value extends above the top knot (e:defPsi tail piece);
    /// evaluation below the deepest knot is a domain error.
    static RateFunction step(std::vector<double> log_knots, std::vector<double> log_values,
                             Regime regime, std::string provenance) {
        if (log_knots.size() != log_values.size() || log_knots.size() < 2)
            throw ConstructionError("step rate needs >= 2 knots");
        for (std::size_t i = 1; i < log_knots.size(); ++i)
            if (!(log_knots[i] > log_knots[i - 1]))
                throw ConstructionError("step rate knots must be strictly increasing");
        auto im = std::make_shared<Impl>();
        im->regime = regime;
        im->provenance = std::move(provenance);
        im->knots = std::move(log_knots);
        im->values = std::move(log_values);
        RateFunction rf;
        rf.impl_ = std::move(im);
        return rf;
    }

    bool is_step() const { return !impl_->knots.empty(); }
    Regime regime() const { return impl_->regime; }
    const std::string& provenance() const { return impl_->provenance; }
    const std::vector<double>& log_knots() const { return impl_->knots; }
    const std::vector<double>& log_values() const { return impl_->values; }

    double log_eval(double log_t) const {
        const auto& im = *impl_;
        if (is_step()) {
            if (log_t <= im.knots.front())
                throw DomainError("step rate evaluated below its deepest knot");
            if (log_t > im.knots.back()) {
                if (im.regime == Regime::Zero) return im.values.back();
                throw DomainError("step rate evaluated beyond its last knot");
            }
            auto it = std::lower_bound(im.knots.begin(), im.knots.end(), log_t);
            return im.values[static_cast<std::size_t>(it - im.knots.begin())];
        }
        return im.log_closed(log_t);
    }

    double eval(double t) const {
        if (!(t > 0)) throw DomainError("rate argument must be positive");
        return std::exp(log_eval(std::log(t)));
    }

private:
    struct Impl {
        ScaleFunction phi;
        Regime regime = Regime::Zero;
        bool raw_scale = false;  // from_scale: Psi(t) = phi(t) directly
        std::string provenance;
        std::vector<double> knots, values;    // step variant (log space)
        std::vector<double> corr_x, corr_v;   // running-max correction (zero regime)

        // raw Psi_1: phi^-1(t / loglog) * loglog
        double log_raw(double x) const {
            double ax = std::abs(x);
            if (ax <= 1.0)
                throw DomainError("closed rate needs |log t| > 1");
            if (regime == Regime::Infinity && x < 0)
                throw DomainError("closed rate at infinity needs t > e");
            double ll = std::log(ax);  // log|log t| as a value
            return phi.log_inverse(x - std::log(ll)) + std::log(ll);
        }

        double log_closed(double x) const {
            if (raw_scale) return phi.log_eval(x);
            if (regime == Regime::Infinity) return log_raw(x);
            double v = log_raw(x);
            if (corr_x.empty() || x <= corr_x.front()) return v;
            double cx = std::min(x, corr_x.back());
            auto it = std::upper_bound(corr_x.begin(), corr_x.end(), cx);
            std::size_t j = it == corr_x.begin() ? 0 : static_cast<std::size_t>(it - corr_x.begin()) - 1;
            return std::max(v, corr_v[j]);
        }

        // running sup of the raw form over a cached grid (Remark 1.6(ii))
        void build_correction() {
            double lo = std::max(phi.log_domain_lo() + 1.0, -720.0);
            // keep t/loglog t inside phi's domain
            double hi = std::min(-1.05, phi.log_domain_hi() - 1.0);
            if (!(lo < hi)) return;
            int n = 2048;
            corr_x.resize(n);
            corr_v.resize(n);
            double run = kNegInf;
            for (int i = 0; i < n; ++i) {
                double x = lo + (hi - lo) * i / (n - 1);
                run = std::max(run, log_raw(x));
                corr_x[i] = x;
                corr_v[i] = run;
            }
        }
    };

    std::shared_ptr<const Impl> impl_;
};

}  // namespace lillab
