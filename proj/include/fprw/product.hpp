#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "fprw/factors.hpp"

namespace fprw {

struct FreeProductSpec {
    std::vector<FactorSpec> factors;
    std::vector<double> weights;
};

// Analysed factors with normalised weights.
class FreeProduct {
public:
    FreeProduct(std::vector<GreenModelPtr> factors, std::vector<double> weights);
    static FreeProduct from_spec(const FreeProductSpec& spec);

    std::size_t size() const noexcept { return factors_.size(); }
    const GreenModel& factor(std::size_t i) const { return *factors_[i]; }
    const GreenModelPtr& factor_ptr(std::size_t i) const { return factors_[i]; }
    double alpha(std::size_t i) const { return alpha_[i]; }
    const std::vector<double>& alphas() const noexcept { return alpha_; }
    ExtReal theta(std::size_t i) const { return theta_[i]; }
    // True when the supplied weights did not already sum to 1.
    bool renormalized() const noexcept { return renormalized_; }
    // (Z/2Z)*(Z/2Z): the only recurrent free product.
    bool degenerate() const;
    int period() const;

    FreeProduct with_weights(std::vector<double> weights) const;

private:
    std::vector<GreenModelPtr> factors_;
    std::vector<double> alpha_;
    std::vector<ExtReal> theta_;
    bool renormalized_ = false;
};

struct ThetaBar {
    ExtReal value;
    std::vector<std::size_t> argmin;
};

ThetaBar theta_bar(const FreeProduct& fp);

// Psi(t) = 1 + sum_i (Psi_i(alpha_i t) - 1); t = inf gives the limit.
double psi_of(const FreeProduct& fp, double t);
// (Phi, Phi', Phi'') at t with Phi(t) = sum_i Phi_i(alpha_i t) - (m - 1).
PhiDerivs phi_of(const FreeProduct& fp, double t);

double psi_bar(const FreeProduct& fp);

struct ProductAnalytics {
    ExtReal theta_bar;
    std::vector<std::size_t> argmin;
    double psi_bar = 0.0;  // at theta_bar, or the t -> inf limit when theta_bar is infinite
    ExtReal phi_bar;       // Phi(theta_bar), infinite when theta_bar is
    ExtReal phi2_bar;      // Phi''(theta_bar)
    double radius = 1.0;
    ExtReal g_at_radius;
    ExtReal gprime_at_radius;
    double t_star = 0.0;  // t at the singularity: theta_bar or the root of Psi
    bool psi_root_branch = false;
    bool degenerate = false;
    int period = 1;
};

ProductAnalytics analyze_product(const FreeProduct& fp);
std::pair<double, ExtReal> product_radius(const FreeProduct& fp);

// Exact Green series of the product through order N.
PowerSeries product_green_series(const FreeProduct& fp, std::size_t N);
// Coefficients c_n scale^n of G(scale z); factor_scale[i] (default 1) only
// conditions the intermediate arithmetic and should be near the factor radius.
PowerSeries product_green_series_scaled(const FreeProduct& fp, std::size_t N, double scale);
PowerSeries product_green_series(const std::vector<PowerSeries>& factor_green, const std::vector<double>& alpha,
                                 std::size_t N, double scale = 1.0, const std::vector<double>& factor_scale = {});
// Same series via Phi = sum Phi_i(alpha_i t) - (m-1) and G = Phi(z G).
// Numerically fragile for large N; used as a cross-check.
PowerSeries product_green_series_via_phi(const std::vector<PowerSeries>& factor_green,
                                         const std::vector<double>& alpha, std::size_t N);

// zeta_1, zeta_2 at z for two factors by monotone fixed-point iteration.
std::pair<double, double> zeta_at(const FreeProduct& fp, double z);
// zeta_i = w_i^{-1}(alpha_i z G(z)), with G(z) from the Phi parametrisation.
std::vector<double> zeta_by_inversion(const FreeProduct& fp, double z);

// Solve t / Phi(t) = z on [0, t_max], i.e. t = z G(z).
double product_t_of_z(const FreeProduct& fp, double z, double t_max);

struct SqrtCoefficient {
    double g0;
    double g1;
};

// G(z) = g0 + g1 sqrt(rho - z) + o(sqrt(rho - z)) at criticality.
SqrtCoefficient sqrt_coefficient(const FreeProduct& fp, double tol = 1e-8);
// The same expansion at any t with Psi(t) = 0 (root branch or criticality).
SqrtCoefficient sqrt_coefficient_at(const FreeProduct& fp, double t);

}  // namespace fprw
