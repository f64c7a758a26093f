#include "fprw/product.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include <boost/math/tools/roots.hpp>

namespace fprw {

namespace {

constexpr double kTieTol = 1e-12;

double toms748(const auto& f, double lo, double hi, double flo, double fhi, const char* what) {
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0.0) == (fhi > 0.0))
        throw Error(ErrorCode::RootNotBracketed, std::string(what) + ": no sign change on the bracket");
    boost::uintmax_t iters = 200;
    auto tol = [](double a, double b) { return std::abs(b - a) <= 1e-12 * std::max(std::abs(a), std::abs(b)); };
    const auto r = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, tol, iters);
    if (iters >= 200) throw Error(ErrorCode::NoConvergence, std::string(what) + ": root search hit the iteration cap");
    return 0.5 * (r.first + r.second);
}

}  // namespace

FreeProduct::FreeProduct(std::vector<GreenModelPtr> factors, std::vector<double> weights)
    : factors_(std::move(factors)) {
    if (factors_.size() < 2) throw Error(ErrorCode::InvalidSpec, "a free product needs at least two factors");
    if (weights.size() != factors_.size())
        throw Error(ErrorCode::InvalidSpec, "number of weights differs from number of factors");
    double sum = 0.0;
    for (double w : weights) {
        if (!(w > 0.0) || !std::isfinite(w)) throw Error(ErrorCode::InvalidSpec, "weights must be positive and finite");
        sum += w;
    }
    renormalized_ = std::abs(sum - 1.0) > 1e-12;
    for (double w : weights) alpha_.push_back(w / sum);
    for (const auto& f : factors_) theta_.push_back(f->theta());
}

FreeProduct FreeProduct::from_spec(const FreeProductSpec& spec) {
    std::vector<GreenModelPtr> models;
    for (const auto& f : spec.factors) models.push_back(make_model(f));
    return FreeProduct(std::move(models), spec.weights);
}

FreeProduct FreeProduct::with_weights(std::vector<double> weights) const { return FreeProduct(factors_, std::move(weights)); }

bool FreeProduct::degenerate() const {
    if (size() != 2) return false;
    for (const auto& f : factors_)
        if (f->finite_order() != 2) return false;
    return true;
}

int FreeProduct::period() const {
    int p = 0;
    for (const auto& f : factors_) p = std::gcd(p, f->period());
    return p;
}

ThetaBar theta_bar(const FreeProduct& fp) {
    ThetaBar tb{ExtReal::infinity(), {}};
    for (std::size_t i = 0; i < fp.size(); ++i) {
        if (fp.theta(i).is_infinite()) continue;
        const double v = fp.theta(i).value() / fp.alpha(i);
        if (tb.value.is_infinite() || v < tb.value.value()) tb.value = ExtReal(v);
    }
    for (std::size_t i = 0; i < fp.size(); ++i) {
        if (tb.value.is_infinite()) {
            tb.argmin.push_back(i);
        } else if (fp.theta(i).is_finite()) {
            const double v = fp.theta(i).value() / fp.alpha(i);
            if (v <= tb.value.value() * (1.0 + kTieTol)) tb.argmin.push_back(i);
        }
    }
    return tb;
}

double psi_of(const FreeProduct& fp, double t) {
    double psi = 1.0;
    for (std::size_t i = 0; i < fp.size(); ++i) {
        const double ti = std::isinf(t) ? t : fp.alpha(i) * t;
        psi += fp.factor(i).psi_w(ti) - 1.0;
    }
    return psi;
}

PhiDerivs phi_of(const FreeProduct& fp, double t) {
    PhiDerivs out{1.0 - static_cast<double>(fp.size()), 0.0, ExtReal(0.0)};
    double d2 = 0.0;
    bool d2_inf = false;
    for (std::size_t i = 0; i < fp.size(); ++i) {
        const double a = fp.alpha(i);
        const PhiDerivs p = fp.factor(i).phi_w(a * t);
        out.value += p.value;
        out.d1 += a * p.d1;
        if (p.d2.is_infinite()) d2_inf = true; else d2 += a * a * p.d2.value();
    }
    out.d2 = d2_inf ? ExtReal::infinity() : ExtReal(d2);
    return out;
}

double psi_bar(const FreeProduct& fp) { return psi_of(fp, theta_bar(fp).value.ieee()); }

ProductAnalytics analyze_product(const FreeProduct& fp) {
    ProductAnalytics pa;
    const ThetaBar tb = theta_bar(fp);
    pa.theta_bar = tb.value;
    pa.argmin = tb.argmin;
    pa.period = fp.period();
    pa.psi_bar = psi_of(fp, tb.value.ieee());
    pa.degenerate = fp.degenerate();
    pa.phi_bar = ExtReal::infinity();
    pa.phi2_bar = ExtReal::infinity();
    if (tb.value.is_finite()) {
        const PhiDerivs ph = phi_of(fp, tb.value.value());
        pa.phi_bar = ExtReal(ph.value);
        pa.phi2_bar = ph.d2;
    }
    if (pa.degenerate) {
        pa.radius = 1.0;
        pa.g_at_radius = ExtReal::infinity();
        pa.gprime_at_radius = ExtReal::infinity();
        pa.t_star = std::numeric_limits<double>::infinity();
        return pa;
    }
    if (pa.psi_bar >= 0.0) {
        const double t = tb.value.value();
        const PhiDerivs ph = phi_of(fp, t);
        pa.t_star = t;
        pa.radius = t / ph.value;
        pa.g_at_radius = ExtReal(ph.value);
        if (pa.psi_bar > 0.0)
            pa.gprime_at_radius = ExtReal(ph.d1 * ph.value / (1.0 - pa.radius * ph.d1));
        else
            pa.gprime_at_radius = ExtReal::infinity();
        return pa;
    }
    // Psi strictly decreases from Psi(0) = 1, so its root lies below theta_bar.
    auto f = [&](double t) { return psi_of(fp, t); };
    double hi;
    double fhi;
    if (tb.value.is_finite()) {
        hi = tb.value.value();
        fhi = pa.psi_bar;
    } else {
        hi = 1.0;
        fhi = f(hi);
        for (int k = 0; fhi >= 0.0; ++k) {
            if (k > 200) throw Error(ErrorCode::RootNotBracketed, "Psi does not become negative");
            hi *= 2.0;
            fhi = f(hi);
        }
    }
    const double t = toms748(f, 0.0, hi, 1.0, fhi, "Psi root");
    const PhiDerivs ph = phi_of(fp, t);
    pa.psi_root_branch = true;
    pa.t_star = t;
    pa.radius = t / ph.value;
    pa.g_at_radius = ExtReal(ph.value);
    pa.gprime_at_radius = ExtReal::infinity();
    return pa;
}

std::pair<double, ExtReal> product_radius(const FreeProduct& fp) {
    const ProductAnalytics pa = analyze_product(fp);
    return {pa.radius, pa.g_at_radius};
}

PowerSeries product_green_series(const std::vector<PowerSeries>& factor_green, const std::vector<double>& alpha,
                                 std::size_t N, double scale, const std::vector<double>& factor_scale) {
    const std::size_t m = factor_green.size();
    if (m < 2 || alpha.size() != m) throw Error(ErrorCode::InvalidSpec, "product series needs m >= 2 factors and weights");
    if (!(scale > 0.0)) throw Error(ErrorCode::InvalidSpec, "series scale must be positive");
    std::vector<double> r = factor_scale;
    if (r.empty()) r.assign(m, 1.0);
    if (r.size() != m) throw Error(ErrorCode::InvalidSpec, "one scale per factor expected");
    PowerSeries G = PowerSeries::constant(1.0, N);
    if (N == 0) return G;
    // With C_i = (U_i(w)/w) o zeta_i and S_j = sum_{i != j} alpha_i C_i:
    //   zeta_j = alpha_j z / (1 - z S_j),  U = z sum_j alpha_j C_j,  G = 1/(1-U).
    // Every coefficient stays nonnegative, so nothing cancels. The recursion
    // runs on G(scale z) with zeta_j measured in units of r_j, which keeps all
    // intermediate coefficients of order one.
    std::vector<std::vector<double>> ut(m), C(m), S(m), R(m);
    std::vector<PowerTable> tables(m);
    for (std::size_t j = 0; j < m; ++j) {
        if (factor_green[j].order() < N) throw Error(ErrorCode::InsufficientData, "factor series shorter than requested order");
        const PowerSeries u = first_return_series(series_dilate(factor_green[j].truncated(N), r[j]));
        ut[j].assign(u.coeffs().begin() + 1, u.coeffs().end());  // order N-1, times r_j^{k+1}
        for (double& c : ut[j]) c /= r[j];
        C[j].assign(N, 0.0);
        S[j].assign(N, 0.0);
        R[j].assign(N, 0.0);
        tables[j].extend(0.0);
        C[j][0] = ut[j][0];
    }
    auto fill_S = [&](std::size_t n) {
        double total = 0.0;
        for (std::size_t i = 0; i < m; ++i) total += alpha[i] * C[i][n];
        for (std::size_t j = 0; j < m; ++j) S[j][n] = total - alpha[j] * C[j][n];
    };
    fill_S(0);
    for (std::size_t n = 1; n < N; ++n) {
        for (std::size_t j = 0; j < m; ++j) {
            const std::size_t k = n - 1;
            double acc = 0.0;
            for (std::size_t l = 0; l < k; ++l) acc += S[j][l] * R[j][k - 1 - l];
            R[j][k] = k == 0 ? 1.0 : scale * acc;
            tables[j].extend(alpha[j] * scale / r[j] * R[j][k]);
            C[j][n] = tables[j].contract(ut[j], n);
        }
        fill_S(n);
    }
    PowerSeries U = PowerSeries::zero(N);
    for (std::size_t n = 1; n <= N; ++n) {
        double acc = 0.0;
        for (std::size_t j = 0; j < m; ++j) acc += alpha[j] * C[j][n - 1];
        U[n] = scale * acc;
    }
    // G = 1 + U G.
    for (std::size_t n = 1; n <= N; ++n) {
        double acc = 0.0;
        for (std::size_t k = 1; k <= n; ++k) acc += U[k] * G[n - k];
        G[n] = acc;
    }
    return G;
}

PowerSeries product_green_series_scaled(const FreeProduct& fp, std::size_t N, double scale) {
    std::vector<PowerSeries> gs;
    std::vector<double> radii;
    for (std::size_t i = 0; i < fp.size(); ++i) {
        gs.push_back(fp.factor(i).series(N));
        radii.push_back(fp.factor(i).radius());
    }
    return product_green_series(gs, fp.alphas(), N, scale, radii);
}

PowerSeries product_green_series(const FreeProduct& fp, std::size_t N) { return product_green_series_scaled(fp, N, 1.0); }

PowerSeries product_green_series_via_phi(const std::vector<PowerSeries>& factor_green,
                                         const std::vector<double>& alpha, std::size_t N) {
    const std::size_t m = factor_green.size();
    if (m < 2 || alpha.size() != m) throw Error(ErrorCode::InvalidSpec, "product series needs m >= 2 factors and weights");
    PowerSeries phi = PowerSeries::constant(1.0 - static_cast<double>(m), N);
    for (std::size_t i = 0; i < m; ++i) {
        const PowerSeries g = factor_green[i].truncated(N);
        PowerSeries w = PowerSeries::zero(N);
        for (std::size_t n = 1; n <= N; ++n) w[n] = g[n - 1];
        const PowerSeries phi_i = series_compose(g, series_reversion(w));
        phi = series_add(phi, series_dilate(phi_i, alpha[i]));
    }
    return solve_implicit_green(phi, N);
}

double product_t_of_z(const FreeProduct& fp, double z, double t_max) {
    if (!(z >= 0.0)) throw Error(ErrorCode::OutOfDomain, "z must be nonnegative");
    if (z == 0.0) return 0.0;
    auto f = [&](double t) { return t / phi_of(fp, t).value - z; };
    const double fhi = f(t_max);
    if (fhi <= 0.0) {
        if (fhi < -1e-12 * z) throw Error(ErrorCode::OutOfDomain, "z beyond the product radius");
        return t_max;
    }
    return toms748(f, 0.0, t_max, -z, fhi, "t(z)");
}

std::vector<double> zeta_by_inversion(const FreeProduct& fp, double z) {
    const ProductAnalytics pa = analyze_product(fp);
    if (pa.degenerate) throw Error(ErrorCode::OutOfDomain, "zeta inversion is not available for the recurrent product");
    if (z > pa.radius * (1.0 + 1e-14)) throw Error(ErrorCode::OutOfDomain, "z beyond the product radius");
    const double t = z >= pa.radius ? pa.t_star : product_t_of_z(fp, z, pa.t_star);
    std::vector<double> out;
    for (std::size_t i = 0; i < fp.size(); ++i) out.push_back(fp.factor(i).invert_w(fp.alpha(i) * t));
    return out;
}

std::pair<double, double> zeta_at(const FreeProduct& fp, double z) {
    if (fp.size() != 2) throw Error(ErrorCode::UnsupportedFactorCount, "zeta_at handles two factors");
    if (!(z >= 0.0)) throw Error(ErrorCode::OutOfDomain, "z must be nonnegative");
    if (z == 0.0) return {0.0, 0.0};
    // U_i(w)/w, from the first-return series near 0 to avoid cancellation.
    std::vector<PowerSeries> ut;
    for (std::size_t i = 0; i < 2; ++i) {
        const PowerSeries u = first_return_series(fp.factor(i).series(64));
        ut.emplace_back(std::vector<double>(u.coeffs().begin() + 1, u.coeffs().end()));
    }
    auto utilde = [&](std::size_t i, double w) {
        const GreenModel& f = fp.factor(i);
        w = std::min(w, f.radius());
        if (w <= 0.25 * f.radius()) return ut[i].evaluate(w);
        const ExtReal g = f.green(w, 0);
        if (g.is_infinite()) return 1.0 / w;
        return (1.0 - 1.0 / g.value()) / w;
    };
    const double a1 = fp.alpha(0);
    const double a2 = fp.alpha(1);
    double z1 = a1 * z;
    double z2 = a2 * z;
    bool damp = false;
    double prev_step = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 100000; ++it) {
        const double d1 = 1.0 - a2 * z * utilde(1, z2);
        const double d2 = 1.0 - a1 * z * utilde(0, z1);
        if (d1 <= 0.0 || d2 <= 0.0) throw Error(ErrorCode::OutOfDomain, "z beyond the product radius");
        double n1 = std::min(a1 * z / d1, fp.factor(0).radius());
        double n2 = std::min(a2 * z / d2, fp.factor(1).radius());
        if (damp) {
            n1 = 0.5 * (z1 + n1);
            n2 = 0.5 * (z2 + n2);
        }
        const double step = std::max(std::abs(n1 - z1), std::abs(n2 - z2));
        if ((n1 - z1) < 0.0 || (n2 - z2) < 0.0) damp = damp || step > prev_step;
        prev_step = step;
        z1 = n1;
        z2 = n2;
        if (step <= 1e-13) return {z1, z2};
    }
    throw Error(ErrorCode::NoConvergence, "zeta fixed point did not converge at z=" + std::to_string(z));
}

SqrtCoefficient sqrt_coefficient_at(const FreeProduct& fp, double t) {
    const PhiDerivs ph = phi_of(fp, t);
    if (ph.d2.is_infinite())
        throw Error(ErrorCode::NeedsDerivative, "Phi'' is infinite at the critical point; the square-root expansion does not apply");
    if (!(ph.d2.value() > 0.0)) throw Error(ErrorCode::NeedsDerivative, "Phi'' must be positive at the critical point");
    const double rho = t / ph.value;
    return {ph.value, -std::sqrt(2.0 * ph.value / (rho * rho * rho * ph.d2.value()))};
}

SqrtCoefficient sqrt_coefficient(const FreeProduct& fp, double tol) {
    const ThetaBar tb = theta_bar(fp);
    if (tb.value.is_infinite()) throw Error(ErrorCode::NotAtCriticality, "theta_bar is infinite");
    const double psi = psi_of(fp, tb.value.value());
    if (std::abs(psi) > tol)
        throw Error(ErrorCode::NotAtCriticality, "|Psi(theta_bar)| = " + std::to_string(std::abs(psi)) + " exceeds tolerance");
    return sqrt_coefficient_at(fp, tb.value.value());
}

}  // namespace fprw
