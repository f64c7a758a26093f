#include <cmath>
#include <limits>
#include <string>

#include "fprw/factors.hpp"

namespace fprw {

namespace {

// |t - theta| within this relative distance counts as t = theta.
constexpr double kThetaSnap = 1e-12;

}  // namespace

double GreenModel::clamp_z(double z) const {
    const double r = radius();
    if (!(z >= 0.0) || z > r * (1.0 + 1e-14))
        throw Error(ErrorCode::OutOfDomain, "z=" + std::to_string(z) + " outside [0, " + std::to_string(r) + "]");
    return std::min(z, r);
}

ExtReal GreenModel::theta() const {
    const ExtReal g = g_at_radius();
    if (g.is_infinite()) return ExtReal::infinity();
    return ExtReal(radius() * g.value());
}

double GreenModel::psi_at(double z) const {
    z = clamp_z(z);
    if (z == 0.0) return 1.0;
    const ExtReal g = green(z, 0);
    if (g.is_infinite()) return psi_limit_at_radius();
    const ExtReal gp = green(z, 1);
    if (gp.is_infinite()) return 0.0;
    const double G = g.value();
    return G * G / (z * gp.value() + G);
}

PhiDerivs GreenModel::phi_derivs_at(double z) const {
    z = clamp_z(z);
    const ExtReal g = green(z, 0);
    const ExtReal gp = green(z, 1);
    if (g.is_infinite())
        throw Error(ErrorCode::NeedsDerivative, "Phi derivatives need finite G at z=" + std::to_string(z));
    const double G = g.value();
    // G' = inf at the radius: Phi' tends to 1/z and Phi'' diverges.
    if (gp.is_infinite()) return PhiDerivs{G, 1.0 / z, ExtReal::infinity()};
    const double Gp = gp.value();
    const double den = G + z * Gp;
    PhiDerivs out{G, Gp / den, ExtReal::infinity()};
    const ExtReal gpp = green(z, 2);
    if (gpp.is_finite()) {
        const double Upp = gpp.value() / (G * G) - 2.0 * Gp * Gp / (G * G * G);
        out.d2 = ExtReal(G * G * G * Upp / (den * den * den));
    }
    return out;
}

double GreenModel::invert_w(double t) const {
    if (!(t >= 0.0)) throw Error(ErrorCode::OutOfDomain, "invert_w needs t >= 0");
    if (t == 0.0) return 0.0;
    const double r = radius();
    const ExtReal th = theta();
    if (th.is_finite()) {
        if (t > th.value() * (1.0 + kThetaSnap))
            throw Error(ErrorCode::OutOfDomain,
                        "t=" + std::to_string(t) + " beyond theta=" + std::to_string(th.value()));
        if (t >= th.value() * (1.0 - kThetaSnap)) return r;
    }
    double lo = 0.0;
    double hi = r;
    if (th.is_infinite()) {
        // w(z) is unbounded but reaches t only at z extremely close to r for
        // slowly divergent G; past the last representable z we saturate.
        const double zmax = std::nextafter(r, 0.0);
        if (zmax * green(zmax, 0).value() <= t) return zmax;
        hi = zmax;
    }
    double z = std::min(t, 0.5 * (lo + hi));
    for (int it = 0; it < 200; ++it) {
        const double G = green(z, 0).value();
        const double f = z * G - t;
        if (f == 0.0) return z;
        if (f < 0.0) lo = z; else hi = z;
        const ExtReal gp = green(z, 1);
        double next = 0.5 * (lo + hi);
        if (gp.is_finite()) {
            const double step = f / (G + z * gp.value());
            const double cand = z - step;
            if (cand > lo && cand < hi) next = cand;
        }
        if (std::abs(next - z) <= 4e-16 * std::max(z, 1e-300) || hi - lo <= 4e-16 * hi) return next;
        z = next;
    }
    throw Error(ErrorCode::NoConvergence, "invert_w did not converge for t=" + std::to_string(t));
}

double GreenModel::psi_w(double t) const {
    const ExtReal th = theta();
    if (std::isinf(t)) {
        if (th.is_finite()) throw Error(ErrorCode::OutOfDomain, "psi_w(inf) with finite theta");
        return psi_limit_at_radius();
    }
    if (th.is_finite() && t >= th.value() * (1.0 - kThetaSnap)) {
        if (t > th.value() * (1.0 + kThetaSnap)) throw Error(ErrorCode::OutOfDomain, "psi_w beyond theta");
        return psi_at(radius());
    }
    return psi_at(invert_w(t));
}

PhiDerivs GreenModel::phi_w(double t) const {
    const ExtReal th = theta();
    if (th.is_finite() && t >= th.value() * (1.0 - kThetaSnap)) {
        if (t > th.value() * (1.0 + kThetaSnap)) throw Error(ErrorCode::OutOfDomain, "phi_w beyond theta");
        return phi_derivs_at(radius());
    }
    return phi_derivs_at(invert_w(t));
}

PowerSeries first_return_series(const PowerSeries& green) {
    // G = 1/(1-U): u_n = g_n - sum_{k=1}^{n-1} u_k g_{n-k}.
    const std::size_t N = green.order();
    PowerSeries u = PowerSeries::zero(N);
    for (std::size_t n = 1; n <= N; ++n) {
        double acc = green[n];
        for (std::size_t k = 1; k < n; ++k) acc -= u[k] * green[n - k];
        u[n] = acc;
    }
    return u;
}

double psi_at(const GreenAnalytics& a, double z) { return a.model->psi_at(z); }
PhiDerivs phi_derivs_at(const GreenAnalytics& a, double z) { return a.model->phi_derivs_at(z); }
double invert_w(const GreenAnalytics& a, double t) { return a.model->invert_w(t); }

}  // namespace fprw
