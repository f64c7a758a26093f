#include "fprw/phase.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <thread>

#include <boost/math/tools/roots.hpp>

namespace fprw {

namespace {

double solve_alpha(const FactorPair& pair, double lo, double hi, double flo, double fhi, double tol) {
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0.0) == (fhi > 0.0)) throw Error(ErrorCode::RootNotBracketed, "Upsilon does not change sign");
    auto f = [&](double a) { return upsilon(pair, a); };
    boost::uintmax_t iters = 200;
    auto stop = [tol](double a, double b) { return std::abs(b - a) <= tol; };
    const auto r = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, stop, iters);
    return 0.5 * (r.first + r.second);
}

}  // namespace

FactorPair::FactorPair(GreenModelPtr first, GreenModelPtr second) : f_{std::move(first), std::move(second)} {
    theta_[0] = f_[0]->theta();
    theta_[1] = f_[1]->theta();
}

FactorPair FactorPair::from_specs(const FactorSpec& first, const FactorSpec& second) {
    return FactorPair(make_model(first), make_model(second));
}

FreeProduct FactorPair::product(double alpha1) const { return FreeProduct({f_[0], f_[1]}, {alpha1, 1.0 - alpha1}); }

bool FactorPair::degenerate() const { return f_[0]->finite_order() == 2 && f_[1]->finite_order() == 2; }

std::optional<double> critical_alpha(const FactorPair& pair) {
    if (pair.theta(0).is_infinite() && pair.theta(1).is_infinite()) return std::nullopt;
    return share(pair.theta(0), pair.theta(1));
}

double upsilon(const FactorPair& pair, double alpha1) {
    if (!(alpha1 >= 0.0 && alpha1 <= 1.0)) throw Error(ErrorCode::OutOfDomain, "alpha1 must lie in [0,1]");
    const double inf = std::numeric_limits<double>::infinity();
    const ExtReal th1 = pair.theta(0);
    const ExtReal th2 = pair.theta(1);
    if (th1.is_infinite() && th2.is_infinite()) return pair.first().psi_w(inf) + pair.second().psi_w(inf) - 1.0;
    if (alpha1 == 0.0) {
        if (th2.is_finite()) return pair.second().psi_w(th2.value());
        return pair.first().psi_w(th1.value()) + pair.second().psi_w(inf) - 1.0;
    }
    if (alpha1 == 1.0) {
        if (th1.is_finite()) return pair.first().psi_w(th1.value());
        return pair.first().psi_w(inf) + pair.second().psi_w(th2.value()) - 1.0;
    }
    const double a2 = 1.0 - alpha1;
    double tbar = inf;
    if (th1.is_finite()) tbar = th1.value() / alpha1;
    if (th2.is_finite()) tbar = std::min(tbar, th2.value() / a2);
    return pair.first().psi_w(alpha1 * tbar) + pair.second().psi_w(a2 * tbar) - 1.0;
}

PhaseRoots phase_roots(const FactorPair& pair, double tol) {
    PhaseRoots roots;
    const auto ac = critical_alpha(pair);
    if (!ac) return roots;
    const double u0 = upsilon(pair, 0.0);
    const double uc = upsilon(pair, *ac);
    const double u1 = upsilon(pair, 1.0);
    if (*ac > 0.0 && u0 > 0.0 && uc < 0.0) roots.alpha_low = solve_alpha(pair, 0.0, *ac, u0, uc, tol);
    if (*ac < 1.0 && uc < 0.0 && u1 > 0.0) roots.alpha_high = solve_alpha(pair, *ac, 1.0, uc, u1, tol);
    return roots;
}

AsymptoticLaw law_from_upsilon(const FactorPair& pair, double alpha1, double ups, const ClassifyOptions& opt) {
    const FreeProduct fp = pair.product(alpha1);
    ProductAnalytics pa;
    const ThetaBar tb = theta_bar(fp);
    pa.theta_bar = tb.value;
    pa.argmin = tb.argmin;
    pa.psi_bar = ups;
    pa.degenerate = fp.degenerate();
    pa.period = fp.period();
    pa.radius = std::numeric_limits<double>::quiet_NaN();
    return classify_from(fp, pa, opt);
}

PhaseDiagram regime_case(const FactorPair& pair, const PhaseOptions& opt) {
    PhaseDiagram pd;
    pd.degenerate = pair.degenerate();
    pd.alpha_c = critical_alpha(pair);
    pd.upsilon_0 = upsilon(pair, 0.0);
    pd.upsilon_1 = upsilon(pair, 1.0);
    pd.upsilon_c = pd.alpha_c ? upsilon(pair, *pd.alpha_c) : pd.upsilon_0;
    const PhaseRoots roots = phase_roots(pair);
    pd.alpha_low = roots.alpha_low;
    pd.alpha_high = roots.alpha_high;
    if (pd.degenerate) {
        pd.case_label = 'E';
        return pd;
    }
    const bool both_finite = pair.theta(0).is_finite() && pair.theta(1).is_finite();
    if (both_finite && std::abs(pd.upsilon_c) <= opt.critical_window) {
        const double ac = *pd.alpha_c;
        if (upsilon(pair, 0.5 * ac) > 0.0 && upsilon(pair, 0.5 * (1.0 + ac)) > 0.0) {
            pd.case_label = 'F';
            pd.alpha_low = ac;
            pd.alpha_high = ac;
            if (std::abs(pd.upsilon_c) > opt.classify.critical_tol) {
                pd.ambiguous = true;
                pd.candidates = {'F', pd.upsilon_c < 0.0 ? 'A' : 'D'};
            }
            return pd;
        }
    }
    if (pd.alpha_low && pd.alpha_high) pd.case_label = 'A';
    else if (pd.alpha_low) pd.case_label = 'B';
    else if (pd.alpha_high) pd.case_label = 'C';
    else if (pd.upsilon_c > 0.0) pd.case_label = 'D';
    else pd.case_label = 'E';
    return pd;
}

unsigned worker_count(unsigned requested) {
    unsigned n = requested ? requested : std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("FPRW_THREADS")) {
        const long cap = std::strtol(env, nullptr, 10);
        if (cap >= 1) n = std::min<unsigned>(n, static_cast<unsigned>(cap));
    }
    return std::max(1u, n);
}

PhaseDiagram sweep(const FactorPair& pair, const PhaseOptions& opt) {
    if (opt.grid < 3) throw Error(ErrorCode::InvalidSpec, "grid size must be at least 3");
    PhaseDiagram pd = regime_case(pair, opt);
    // Logit-uniform grid: the endpoint limits are approached slowly.
    std::vector<double> alphas;
    const double span = 12.0;
    for (std::size_t k = 0; k < opt.grid; ++k) {
        const double u = -span + 2.0 * span * static_cast<double>(k) / static_cast<double>(opt.grid - 1);
        alphas.push_back(1.0 / (1.0 + std::exp(-u)));
    }
    for (const auto& extra : {pd.alpha_c, pd.alpha_low, pd.alpha_high})
        if (extra && *extra > 0.0 && *extra < 1.0) alphas.push_back(*extra);
    std::sort(alphas.begin(), alphas.end());
    alphas.erase(std::unique(alphas.begin(), alphas.end()), alphas.end());

    pd.grid.resize(alphas.size());
    const unsigned workers = std::min<unsigned>(worker_count(opt.threads), static_cast<unsigned>(alphas.size()));
    std::vector<std::exception_ptr> errors(workers);
    auto work = [&](unsigned w) {
        try {
            for (std::size_t k = w; k < alphas.size(); k += workers) {
                const double a = alphas[k];
                const double ups = upsilon(pair, a);
                AsymptoticLaw law = opt.full_classification ? classify_two(pair.product(a), opt.classify)
                                                            : law_from_upsilon(pair, a, ups, opt.classify);
                pd.grid[k] = PhasePoint{a, ups, law, std::abs(ups) <= opt.classify.warning_band};
            }
        } catch (...) {
            errors[w] = std::current_exception();
        }
    };
    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
        for (auto& t : pool) t.join();
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    return pd;
}

LatticeSpec axis_family(int d, double delta) {
    if (d < 2) throw Error(ErrorCode::InvalidSpec, "axis family needs d >= 2");
    if (!(delta > 0.0 && delta < 1.0)) throw Error(ErrorCode::InvalidSpec, "delta must lie in (0,1)");
    LatticeSpec s;
    s.beta.assign(d, delta / (d - 1));
    s.beta[0] = 1.0 - delta;
    s.p.assign(d, 0.5);
    return s;
}

TunedLattice tune_axis_weights(int d, double target, double tol) {
    if (d < 5) throw Error(ErrorCode::InvalidSpec, "axis-weight tuning needs d >= 5");
    auto psi = [d](double delta) {
        const GreenModelPtr m = make_model(axis_family(d, delta));
        return m->psi_at(m->radius());
    };
    const double hi = 1.0 - 1.0 / d;
    const double lo = 1e-3;
    const double fhi = psi(hi) - target;
    const double flo = psi(lo) - target;
    if (std::abs(fhi) <= tol) return {axis_family(d, hi), hi, fhi + target};
    if (!(flo < 0.0 && fhi > 0.0))
        throw Error(ErrorCode::TargetOutOfRange, "target " + std::to_string(target) + " outside (" +
                                                     std::to_string(flo + target) + ", " + std::to_string(fhi + target) + ")");
    auto f = [&](double delta) { return psi(delta) - target; };
    boost::uintmax_t iters = 200;
    auto stop = [](double a, double b) { return std::abs(b - a) <= 1e-13 * std::max(a, b); };
    const auto r = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, stop, iters);
    const double delta = 0.5 * (r.first + r.second);
    const double got = psi(delta);
    if (std::abs(got - target) > std::max(tol, 1e-9))
        throw Error(ErrorCode::NoConvergence, "tuned Psi misses target by " + std::to_string(got - target));
    return {axis_family(d, delta), delta, got};
}

}  // namespace fprw
