#include <cmath>
#include <numeric>
#include <string>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <gsl/gsl_sf_bessel.h>

#include "fprw/factors.hpp"

namespace fprw {

LatticeSpec LatticeSpec::simple(int d) {
    if (d < 1) throw Error(ErrorCode::InvalidSpec, "lattice dimension must be >= 1");
    return LatticeSpec{std::vector<double>(d, 1.0 / d), std::vector<double>(d, 0.5)};
}

void LatticeSpec::validate() const {
    if (beta.empty()) throw Error(ErrorCode::InvalidSpec, "lattice needs at least one axis");
    if (beta.size() != p.size()) throw Error(ErrorCode::InvalidSpec, "lattice beta and p lengths differ");
    double sum = 0.0;
    for (std::size_t j = 0; j < beta.size(); ++j) {
        if (!(beta[j] > 0.0)) throw Error(ErrorCode::InvalidSpec, "lattice beta must be positive");
        if (!(p[j] > 0.0 && p[j] < 1.0)) throw Error(ErrorCode::InvalidSpec, "lattice p must lie in (0,1)");
        sum += beta[j];
    }
    if (std::abs(sum - 1.0) > 1e-12) throw Error(ErrorCode::InvalidSpec, "lattice beta must sum to 1");
}

double lattice_radius(const LatticeSpec& spec) {
    spec.validate();
    double rho = 0.0;
    for (std::size_t j = 0; j < spec.beta.size(); ++j) rho += spec.beta[j] * std::sqrt(4.0 * spec.p[j] * (1.0 - spec.p[j]));
    return 1.0 / rho;
}

namespace {

// G^{(k)}(z) = int_0^inf s^k e^{-s} E^{(k)}(z s) ds with E(x) = prod_j I0(a_j x).
// Written with exponentially scaled Bessel functions the weight becomes
// e^{-eps s}, eps = varrho (radius - z).
double laplace_integral(const std::vector<double>& a, double varrho, double radius, double z, int deriv) {
    const double eps = varrho * (radius - z);
    const std::size_t d = a.size();
    auto f = [&](double s) -> double {
        const double base = std::exp(-eps * s);
        if (base == 0.0) return 0.0;
        double prod = 1.0;
        double r1 = 0.0;
        double r2 = 0.0;
        double rp = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            const double y = a[j] * z * s;
            const double i0 = gsl_sf_bessel_I0_scaled(y);
            prod *= i0;
            if (deriv == 0) continue;
            const double i1 = gsl_sf_bessel_I1_scaled(y);
            const double r = a[j] * i1 / i0;
            r1 += r;
            if (deriv == 2) {
                r2 += r * r;
                const double i1p = y < 1e-8 ? 0.5 : i0 - i1 / y;
                rp += a[j] * a[j] * i1p / i0;
            }
        }
        switch (deriv) {
            case 0: return base * prod;
            case 1: return base * s * prod * r1;
            default: return base * s * s * prod * (rp + r1 * r1 - r2);
        }
    };
    thread_local boost::math::quadrature::exp_sinh<double> integrator;
    double err = 0.0;
    double l1 = 0.0;
    return integrator.integrate(f, 1e-13, &err, &l1);
}

class LatticeModel final : public GreenModel {
public:
    explicit LatticeModel(LatticeSpec spec) : spec_(std::move(spec)) {
        spec_.validate();
        varrho_ = 0.0;
        for (std::size_t j = 0; j < spec_.beta.size(); ++j) {
            a_.push_back(spec_.beta[j] * std::sqrt(4.0 * spec_.p[j] * (1.0 - spec_.p[j])));
            varrho_ += a_.back();
        }
        radius_ = 1.0 / varrho_;
    }

    double radius() const override { return radius_; }

    ExtReal green(double z, int deriv) const override {
        if (deriv < 0 || deriv > 2) throw Error(ErrorCode::InvalidSpec, "derivative order must be 0, 1 or 2");
        z = clamp_z(z);
        if (z == 0.0 && deriv == 0) return ExtReal(1.0);
        const int d = spec_.dim();
        if (z == radius_ && d <= 2 * deriv + 2) return ExtReal::infinity();
        return ExtReal(laplace_integral(a_, varrho_, radius_, z, deriv));
    }

    PowerSeries series(std::size_t N) const override { return lattice_series(spec_, N); }
    int period() const override { return 2; }

    std::optional<Singularity> singularity() const override {
        const int d = spec_.dim();
        if (d < 5) return std::nullopt;
        return make_singularity((d - 2) / 2.0, d % 2 == 1 ? 0 : 1);
    }

    std::string kind() const override { return "lattice"; }

private:
    LatticeSpec spec_;
    std::vector<double> a_;
    double varrho_ = 1.0;
    double radius_ = 1.0;
};

}  // namespace

ExtReal lattice_green(const LatticeSpec& spec, double z, int deriv) { return LatticeModel(spec).green(z, deriv); }

PowerSeries lattice_series(const LatticeSpec& spec, std::size_t N) {
    spec.validate();
    const std::size_t M = N / 2;  // only even times carry mass
    std::vector<double> lf(N + 1);
    for (std::size_t n = 0; n <= N; ++n) lf[n] = std::lgamma(static_cast<double>(n) + 1.0);

    // h[m] = return probability at time 2m for the walk on the first j axes.
    std::vector<double> h(M + 1, 0.0);
    double wsum = 0.0;
    for (int j = 0; j < spec.dim(); ++j) {
        const double pq = spec.p[j] * (1.0 - spec.p[j]);
        std::vector<double> r(M + 1);
        r[0] = 1.0;
        for (std::size_t m = 0; m < M; ++m)
            r[m + 1] = r[m] * 2.0 * (2.0 * m + 1.0) / (m + 1.0) * pq;
        wsum += spec.beta[j];
        if (j == 0) {
            h = r;
            continue;
        }
        // Each step uses axis j with probability w, independently.
        const double w = spec.beta[j] / wsum;
        const double lw = std::log(w);
        const double l1w = std::log1p(-w);
        std::vector<double> next(M + 1, 0.0);
        next[0] = 1.0;
        for (std::size_t m = 1; m <= M; ++m) {
            const std::size_t n = 2 * m;
            double acc = 0.0;
            for (std::size_t i = 0; i <= m; ++i) {
                const std::size_t k = 2 * i;
                const double lp = lf[n] - lf[k] - lf[n - k] + k * lw + (n - k) * l1w;
                acc += std::exp(lp) * r[i] * h[m - i];
            }
            next[m] = acc;
        }
        h.swap(next);
    }
    PowerSeries s = PowerSeries::zero(N);
    for (std::size_t m = 0; m <= M; ++m) s[2 * m] = h[m];
    return s;
}

GreenModelPtr make_lattice_model(const LatticeSpec& spec) { return std::make_shared<LatticeModel>(spec); }

}  // namespace fprw
