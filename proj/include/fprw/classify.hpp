#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "fprw/product.hpp"

namespace fprw {

enum class LawKind { Inherited, ThreeHalves, OneHalfDegenerate };
enum class Confidence { Exact, NearCritical };

struct ClassifyOptions {
    double critical_tol = 1e-8;  // |Psi| at or below counts as Psi = 0
    double warning_band = 1e-4;
};

// Return probabilities along the period lattice behave like
// C rho^{-n} n^{-lambda} log^{kappa} n.
struct AsymptoticLaw {
    double radius = 1.0;
    int period = 1;
    LawKind kind = LawKind::ThreeHalves;
    std::size_t factor_index = 0;  // meaningful for Inherited
    double lambda = 1.5;
    int kappa = 0;
    Confidence confidence = Confidence::Exact;
    double psi_bar = 0.0;

    std::string label() const;  // "n^-5/2", "n^-3 log n", ...
};

std::string law_kind_name(LawKind k);
std::string exponent_label(double lambda, int kappa);

int period(const FreeProduct& fp);

AsymptoticLaw classify_two(const FreeProduct& fp, const ClassifyOptions& opt = {});
// Left fold (G_1 * ... * G_{m-1}) * G_m; equals classify_two for m = 2.
AsymptoticLaw classify_multi(const FreeProduct& fp, const ClassifyOptions& opt = {});
// theta_bar and Psi over all m factors at once.
AsymptoticLaw classify_direct(const FreeProduct& fp, const ClassifyOptions& opt = {});
AsymptoticLaw classify_from(const FreeProduct& fp, const ProductAnalytics& pa, const ClassifyOptions& opt = {});

// The product walk viewed as a single factor.
GreenModelPtr product_as_factor(const FreeProduct& fp, const ClassifyOptions& opt = {});

struct ExponentFit {
    double lambda;       // Richardson-extrapolated
    double lambda_last;  // raw ratio estimate at the top of the range
    int kappa;
};

// lambda from c_{n+d} rho^d / c_n on the period lattice within n_range. The
// series may already be rescaled, in which case pass radius = 1.
ExponentFit fit_exponent(const PowerSeries& series, double radius, int period, std::size_t n_lo, std::size_t n_hi,
                         int kappa = 0);

// 1/rho from (c_n / c_{n-L})^{1/L} with L six periods, extrapolated linearly in 1/n.
double series_growth_rate(const PowerSeries& series, int period, std::size_t n_hi);

}  // namespace fprw
