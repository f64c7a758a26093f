#include <cmath>
#include <string>

#include "fprw/factors.hpp"

namespace fprw {

void HomTreeSpec::validate() const {
    if (q < 3)
        throw Error(ErrorCode::InvalidSpec,
                    "tree degree must be >= 3; for q=2 use two cyclic(2) flip factors (recurrent product)");
}

double tree_radius(const HomTreeSpec& spec) {
    spec.validate();
    return spec.q / (2.0 * std::sqrt(spec.q - 1.0));
}

ExtReal tree_green(const HomTreeSpec& spec, double z, int deriv) {
    spec.validate();
    const double q = spec.q;
    const double r = tree_radius(spec);
    if (!(z >= 0.0) || z > r * (1.0 + 1e-14))
        throw Error(ErrorCode::OutOfDomain, "z=" + std::to_string(z) + " outside [0, radius]");
    z = std::min(z, r);
    // G = 2(q-1) / (q-2+S), S = sqrt(q^2 - 4(q-1) z^2).
    const double c = 2.0 * (q - 1.0);
    const double S = z == r ? 0.0 : std::sqrt(std::max(0.0, q * q - 4.0 * (q - 1.0) * z * z));
    const double D = q - 2.0 + S;
    if (deriv == 0) return ExtReal(c / D);
    if (S == 0.0) return ExtReal::infinity();
    const double S1 = -4.0 * (q - 1.0) * z / S;
    if (deriv == 1) return ExtReal(-c * S1 / (D * D));
    const double S2 = -4.0 * (q - 1.0) * (S - z * S1) / (S * S);
    return ExtReal(-c * (S2 * D - 2.0 * S1 * S1) / (D * D * D));
}

PowerSeries tree_series(const HomTreeSpec& spec, std::size_t N) {
    spec.validate();
    // Distance from the root is a birth-death chain: 0 -> 1 surely, k -> k+1
    // with probability (q-1)/q and k -> k-1 with probability 1/q.
    const double up = (spec.q - 1.0) / spec.q;
    const double down = 1.0 / spec.q;
    const std::size_t K = N / 2 + 2;
    std::vector<double> dist(K + 1, 0.0);
    std::vector<double> next(K + 1);
    dist[0] = 1.0;
    PowerSeries s = PowerSeries::zero(N);
    s[0] = 1.0;
    for (std::size_t n = 1; n <= N; ++n) {
        std::fill(next.begin(), next.end(), 0.0);
        next[1] += dist[0];
        for (std::size_t k = 1; k < K; ++k) {
            next[k + 1] += up * dist[k];
            next[k - 1] += down * dist[k];
        }
        dist.swap(next);
        s[n] = dist[0];
    }
    return s;
}

namespace {

class TreeModel final : public GreenModel {
public:
    explicit TreeModel(HomTreeSpec spec) : spec_(spec), radius_(tree_radius(spec)) {}
    double radius() const override { return radius_; }
    ExtReal green(double z, int deriv) const override {
        if (deriv < 0 || deriv > 2) throw Error(ErrorCode::InvalidSpec, "derivative order must be 0, 1 or 2");
        return tree_green(spec_, clamp_z(z), deriv);
    }
    PowerSeries series(std::size_t N) const override { return tree_series(spec_, N); }
    int period() const override { return 2; }
    std::optional<Singularity> singularity() const override { return make_singularity(0.5, 0); }
    std::string kind() const override { return "tree"; }

private:
    HomTreeSpec spec_;
    double radius_;
};

class ExplicitModel final : public GreenModel {
public:
    explicit ExplicitModel(ExplicitSpec spec) : spec_(std::move(spec)) { spec_.validate(); }

    double radius() const override { return spec_.radius; }

    ExtReal green(double z, int deriv) const override {
        if (deriv < 0 || deriv > 2) throw Error(ErrorCode::InvalidSpec, "derivative order must be 0, 1 or 2");
        z = clamp_z(z);
        if (z == spec_.radius) {
            if (deriv == 0) return spec_.g_at_r;
            if (deriv == 1) return spec_.gprime_at_r;
            return ExtReal::infinity();
        }
        // Interior values from the supplied partial sums.
        double acc = 0.0;
        for (std::size_t n = spec_.coeffs.size(); n-- > static_cast<std::size_t>(deriv);) {
            double f = 1.0;
            for (int k = 0; k < deriv; ++k) f *= static_cast<double>(n - k);
            acc = acc * z + f * spec_.coeffs[n];
        }
        return ExtReal(acc);
    }

    PowerSeries series(std::size_t N) const override {
        if (N + 1 > spec_.coeffs.size())
            throw Error(ErrorCode::InsufficientData, "explicit factor supplies " + std::to_string(spec_.coeffs.size()) +
                                                         " coefficients, order " + std::to_string(N) + " requested");
        return PowerSeries(std::vector<double>(spec_.coeffs.begin(), spec_.coeffs.begin() + N + 1));
    }

    int period() const override { return spec_.period; }
    std::optional<Singularity> singularity() const override { return spec_.sing; }
    std::string kind() const override { return "explicit"; }
    double psi_limit_at_radius() const override { return spec_.psi_limit; }

private:
    ExplicitSpec spec_;
};

}  // namespace

void ExplicitSpec::validate() const {
    if (coeffs.empty() || coeffs[0] != 1.0) throw Error(ErrorCode::InvalidSpec, "explicit coefficients must start with 1");
    for (double c : coeffs)
        if (!(c >= 0.0 && c <= 1.0)) throw Error(ErrorCode::InvalidSpec, "explicit coefficients must lie in [0,1]");
    if (!(radius > 0.0)) throw Error(ErrorCode::InvalidSpec, "explicit radius must be positive");
    if (period < 1) throw Error(ErrorCode::InvalidSpec, "explicit period must be >= 1");
    if (g_at_r.is_finite() && g_at_r.value() < 1.0) throw Error(ErrorCode::InvalidSpec, "g_at_r must be >= 1");
    if (gprime_at_r.is_finite() && g_at_r.is_infinite())
        throw Error(ErrorCode::InvalidSpec, "finite g'(r) requires finite g(r)");
    if (!(psi_limit >= 0.0 && psi_limit <= 1.0)) throw Error(ErrorCode::InvalidSpec, "psi_limit must lie in [0,1]");
}

GreenModelPtr make_tree_model(const HomTreeSpec& spec) { return std::make_shared<TreeModel>(spec); }
GreenModelPtr make_explicit_model(const ExplicitSpec& spec) { return std::make_shared<ExplicitModel>(spec); }

}  // namespace fprw
