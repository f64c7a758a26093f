#include "fprw/classify.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <boost/math/tools/roots.hpp>

namespace fprw {

namespace {

std::string fraction(double x) {
    const double twice = 2.0 * x;
    std::ostringstream os;
    if (std::abs(x - std::round(x)) < 1e-9) {
        os << std::llround(x);
    } else if (std::abs(twice - std::round(twice)) < 1e-9) {
        os << std::llround(twice) << "/2";
    } else {
        os.precision(6);
        os << x;
    }
    return os.str();
}

class ProductModel final : public GreenModel {
public:
    ProductModel(FreeProduct fp, const ClassifyOptions& opt) : fp_(std::move(fp)), pa_(analyze_product(fp_)) {
        law_ = classify_multi(fp_, opt);
    }

    double radius() const override { return pa_.radius; }

    ExtReal green(double z, int deriv) const override {
        if (deriv < 0 || deriv > 2) throw Error(ErrorCode::InvalidSpec, "derivative order must be 0, 1 or 2");
        z = clamp_z(z);
        if (z == 0.0 && deriv == 0) return ExtReal(1.0);
        if (pa_.degenerate && z == pa_.radius) return ExtReal::infinity();
        const bool at_radius = z == pa_.radius;
        const double t = t_of_z(z);
        const PhiDerivs ph = phi_of(fp_, t);
        const double G = ph.value;
        if (deriv == 0) return ExtReal(G);
        if (at_radius && !(pa_.psi_bar > 0.0)) return ExtReal::infinity();
        const double den = 1.0 - z * ph.d1;
        const double Gp = ph.d1 * G / den;
        if (deriv == 1) return ExtReal(Gp);
        if (ph.d2.is_infinite()) return ExtReal::infinity();
        const double tp = G + z * Gp;
        return ExtReal((ph.d2.value() * tp * tp + 2.0 * ph.d1 * Gp) / den);
    }

    PowerSeries series(std::size_t N) const override { return product_green_series(fp_, N); }
    int period() const override { return fp_.period(); }

    std::optional<Singularity> singularity() const override {
        switch (law_.kind) {
            case LawKind::Inherited: return fp_.factor(law_.factor_index).singularity();
            case LawKind::ThreeHalves: return make_singularity(0.5, 0);
            default: return std::nullopt;
        }
    }

    std::string kind() const override { return "product"; }
    double psi_limit_at_radius() const override {
        return pa_.degenerate ? psi_of(fp_, std::numeric_limits<double>::infinity()) : 0.0;
    }

    ExtReal theta() const override {
        if (pa_.degenerate) return ExtReal::infinity();
        return ExtReal(pa_.t_star);
    }

    double psi_at(double z) const override {
        z = clamp_z(z);
        if (pa_.degenerate && z == pa_.radius) return psi_limit_at_radius();
        return psi_of(fp_, t_of_z(z));
    }

    PhiDerivs phi_derivs_at(double z) const override { return phi_of(fp_, t_of_z(clamp_z(z))); }

    double invert_w(double t) const override {
        check_t(t);
        return std::min(t / phi_of(fp_, t).value, pa_.radius);
    }

    double psi_w(double t) const override {
        if (std::isinf(t)) {
            if (!pa_.degenerate) throw Error(ErrorCode::OutOfDomain, "psi_w(inf) with finite theta");
            return psi_limit_at_radius();
        }
        check_t(t);
        return psi_of(fp_, std::min(t, pa_.t_star));
    }

    PhiDerivs phi_w(double t) const override {
        check_t(t);
        return phi_of(fp_, std::min(t, pa_.t_star));
    }

    const AsymptoticLaw& law() const { return law_; }

private:
    void check_t(double t) const {
        if (!(t >= 0.0)) throw Error(ErrorCode::OutOfDomain, "t must be nonnegative");
        if (!pa_.degenerate && t > pa_.t_star * (1.0 + 1e-12)) throw Error(ErrorCode::OutOfDomain, "t beyond theta");
    }

    double t_of_z(double z) const {
        if (!pa_.degenerate) {
            if (z >= pa_.radius) return pa_.t_star;
            return product_t_of_z(fp_, z, pa_.t_star);
        }
        double hi = 1.0;
        while (hi / phi_of(fp_, hi).value < z) {
            hi *= 2.0;
            if (hi > 1e300) throw Error(ErrorCode::RootNotBracketed, "t(z) not bracketed");
        }
        return product_t_of_z(fp_, z, hi);
    }

    FreeProduct fp_;
    ProductAnalytics pa_;
    AsymptoticLaw law_;
};

}  // namespace

std::string law_kind_name(LawKind k) {
    switch (k) {
        case LawKind::Inherited: return "inherited";
        case LawKind::ThreeHalves: return "three_halves";
        case LawKind::OneHalfDegenerate: return "one_half_degenerate";
    }
    return "unknown";
}

std::string exponent_label(double lambda, int kappa) {
    std::string s = "n^-" + fraction(lambda);
    if (kappa == 1) s += " log n";
    if (kappa > 1) s += " log^" + std::to_string(kappa) + " n";
    return s;
}

std::string AsymptoticLaw::label() const { return exponent_label(lambda, kappa); }

int period(const FreeProduct& fp) { return fp.period(); }

AsymptoticLaw classify_from(const FreeProduct& fp, const ProductAnalytics& pa, const ClassifyOptions& opt) {
    AsymptoticLaw law;
    law.radius = pa.radius;
    law.period = pa.period;
    law.psi_bar = pa.psi_bar;
    if (pa.degenerate) {
        law.kind = LawKind::OneHalfDegenerate;
        law.lambda = 0.5;
        law.kappa = 0;
        return law;
    }
    if (std::abs(pa.psi_bar) <= opt.warning_band) law.confidence = Confidence::NearCritical;
    if (pa.psi_bar <= opt.critical_tol) {
        law.kind = LawKind::ThreeHalves;
        law.lambda = 1.5;
        law.kappa = 0;
        return law;
    }
    // Psi(theta_bar) > 0: the law of the argmin factor with the weakest decay.
    bool found = false;
    for (std::size_t i : pa.argmin) {
        const GreenModel& f = fp.factor(i);
        if (f.g_at_radius().is_infinite() || f.gprime_at_radius().is_infinite())
            throw Error(ErrorCode::InvalidSpec, "factor " + std::to_string(i + 1) +
                                                    " attains theta_bar with infinite G or G' while Psi(theta_bar) > 0");
        const auto sing = f.singularity();
        if (!sing)
            throw Error(ErrorCode::MissingSingularity,
                        "factor " + std::to_string(i + 1) + " is inherited but has no singularity descriptor");
        const bool better = !found || sing->lambda < law.lambda - 1e-12 ||
                            (std::abs(sing->lambda - law.lambda) <= 1e-12 && sing->kappa > law.kappa);
        if (better) {
            law.kind = LawKind::Inherited;
            law.factor_index = i;
            law.lambda = sing->lambda;
            law.kappa = sing->kappa;
            found = true;
        }
    }
    return law;
}

AsymptoticLaw classify_direct(const FreeProduct& fp, const ClassifyOptions& opt) {
    return classify_from(fp, analyze_product(fp), opt);
}

AsymptoticLaw classify_two(const FreeProduct& fp, const ClassifyOptions& opt) {
    if (fp.size() != 2) throw Error(ErrorCode::UnsupportedFactorCount, "classify_two needs exactly two factors");
    return classify_direct(fp, opt);
}

AsymptoticLaw classify_multi(const FreeProduct& fp, const ClassifyOptions& opt) {
    const std::size_t m = fp.size();
    if (m == 2) return classify_two(fp, opt);
    std::vector<GreenModelPtr> head;
    std::vector<double> w;
    double head_weight = 0.0;
    for (std::size_t i = 0; i + 1 < m; ++i) {
        head.push_back(fp.factor_ptr(i));
        w.push_back(fp.alpha(i));
        head_weight += fp.alpha(i);
    }
    const auto inner = std::make_shared<ProductModel>(FreeProduct(head, w), opt);
    const FreeProduct outer({inner, fp.factor_ptr(m - 1)}, {head_weight, fp.alpha(m - 1)});
    AsymptoticLaw law = classify_two(outer, opt);
    if (law.kind == LawKind::Inherited) {
        if (law.factor_index == 0) {
            if (inner->law().kind != LawKind::Inherited)
                throw Error(ErrorCode::InvalidSpec, "folded product inherited a law it does not carry");
            law.factor_index = inner->law().factor_index;
        } else {
            law.factor_index = m - 1;
        }
    }
    return law;
}

GreenModelPtr product_as_factor(const FreeProduct& fp, const ClassifyOptions& opt) {
    return std::make_shared<ProductModel>(fp, opt);
}

ExponentFit fit_exponent(const PowerSeries& series, double radius, int period, std::size_t n_lo, std::size_t n_hi,
                         int kappa) {
    const std::size_t d = static_cast<std::size_t>(std::max(period, 1));
    if (n_hi > series.order()) n_hi = series.order();
    n_hi -= n_hi % d;
    n_lo += (d - n_lo % d) % d;
    if (n_lo < d) n_lo = d;
    if (n_hi < n_lo + 4 * d) throw Error(ErrorCode::InsufficientData, "fit range holds too few lattice points");
    auto coeff = [&](std::size_t n) {
        const double c = series[n];
        if (!(c > 0.0)) throw Error(ErrorCode::InsufficientData, "zero coefficient at n=" + std::to_string(n));
        return kappa > 0 ? c / std::pow(std::log(static_cast<double>(n)), kappa) : c;
    };
    const double rd = std::pow(radius, static_cast<double>(d));
    auto lam = [&](std::size_t n) {
        const double r = coeff(n + d) * rd / coeff(n);
        return -std::log(r) / std::log(static_cast<double>(n + d) / static_cast<double>(n));
    };
    const std::size_t n2 = n_hi - d;
    std::size_t n1 = std::max(n_lo, n2 / 2);
    n1 -= n1 % d;
    if (n1 >= n2) n1 = n_lo;
    const double l2 = lam(n2);
    const double l1 = lam(n1);
    const double lr = (static_cast<double>(n2) * l2 - static_cast<double>(n1) * l1) / static_cast<double>(n2 - n1);
    return {lr, l2, kappa};
}

double series_growth_rate(const PowerSeries& series, int period, std::size_t n_hi) {
    // Comparing coefficients six periods apart keeps both sides in the same
    // residue class of any near-period 2 or 3, which otherwise oscillates.
    const std::size_t d = 6 * static_cast<std::size_t>(std::max(period, 1));
    if (n_hi > series.order()) n_hi = series.order();
    n_hi -= n_hi % d;
    if (n_hi < 4 * d) throw Error(ErrorCode::InsufficientData, "series too short for a growth estimate");
    auto rate = [&](std::size_t n) {
        const double a = series[n];
        const double b = series[n - d];
        if (!(a > 0.0) || !(b > 0.0)) throw Error(ErrorCode::InsufficientData, "zero coefficient in growth estimate");
        return std::pow(a / b, 1.0 / static_cast<double>(d));
    };
    std::size_t n1 = n_hi / 2;
    n1 -= n1 % d;
    const double r2 = rate(n_hi);
    const double r1 = rate(n1);
    return (static_cast<double>(n_hi) * r2 - static_cast<double>(n1) * r1) / static_cast<double>(n_hi - n1);
}

}  // namespace fprw
