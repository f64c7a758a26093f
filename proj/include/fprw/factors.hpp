#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "fprw/extreal.hpp"
#include "fprw/series.hpp"
#include "fprw/singularity.hpp"

namespace fprw {

// Nearest-neighbour walk on Z^d: axis j with probability beta_j, then +1 with
// probability p_j and -1 otherwise.
struct LatticeSpec {
    std::vector<double> beta;
    std::vector<double> p;

    static LatticeSpec simple(int d);
    int dim() const noexcept { return static_cast<int>(beta.size()); }
    void validate() const;
};

// Random walk on a finite group given by its Cayley table and step law mu.
// The transition matrix is P[x][y] = mu[x^{-1} y].
struct FiniteGroupSpec {
    std::vector<std::vector<int>> table;  // table[x][y] = x*y
    int identity = 0;
    std::vector<double> mu;

    static FiniteGroupSpec cyclic(int n, std::vector<double> mu);
    static FiniteGroupSpec flip() { return cyclic(2, {0.0, 1.0}); }
    // Builds mu from a transition matrix, checking group invariance.
    static FiniteGroupSpec from_matrix(std::vector<std::vector<int>> table, int identity,
                                       const std::vector<std::vector<double>>& P);

    int order() const noexcept { return static_cast<int>(table.size()); }
    int inverse(int x) const;
    std::vector<std::vector<double>> matrix() const;
    void validate() const;
};

// Uniform walk on the free product of q copies of Z/2Z (the q-regular tree).
struct HomTreeSpec {
    int q = 3;
    void validate() const;
};

// Return probabilities supplied directly, with user-asserted boundary data.
struct ExplicitSpec {
    std::vector<double> coeffs;
    double radius = 1.0;
    ExtReal g_at_r = ExtReal::infinity();
    ExtReal gprime_at_r = ExtReal::infinity();
    std::optional<Singularity> sing;
    int period = 1;
    double psi_limit = 0.0;  // Psi at infinity, only read when g_at_r is infinite
    void validate() const;
};

using FactorSpec = std::variant<LatticeSpec, FiniteGroupSpec, HomTreeSpec, ExplicitSpec>;

std::string describe(const FactorSpec& spec);

struct PhiDerivs {
    double value;
    double d1;
    ExtReal d2;
};

// Green function G(z) = sum mu^{(n)}(e) z^n of one walk, on [0, radius].
// The w-parametrised quantities take t = z G(z) in [0, theta].
class GreenModel {
public:
    virtual ~GreenModel() = default;

    virtual double radius() const = 0;
    virtual ExtReal green(double z, int deriv) const = 0;
    virtual PowerSeries series(std::size_t N) const = 0;
    virtual int period() const = 0;
    virtual std::optional<Singularity> singularity() const = 0;
    virtual std::string kind() const = 0;
    // Limit of Psi(t) as t -> theta when G or G' is infinite at the radius.
    virtual double psi_limit_at_radius() const { return 0.0; }
    // Group order for finite factors.
    virtual std::optional<int> finite_order() const { return std::nullopt; }

    ExtReal g_at_radius() const { return green(radius(), 0); }
    ExtReal gprime_at_radius() const { return green(radius(), 1); }
    virtual ExtReal theta() const;

    // Psi at t = z G(z) from z.
    virtual double psi_at(double z) const;
    // (Phi, Phi', Phi'') at t = z G(z) from z.
    virtual PhiDerivs phi_derivs_at(double z) const;
    virtual double invert_w(double t) const;

    // Same quantities keyed by t; t may equal theta, and t = inf is allowed
    // for psi_w when theta is infinite (the limit value).
    virtual double psi_w(double t) const;
    virtual PhiDerivs phi_w(double t) const;

protected:
    double clamp_z(double z) const;
};

using GreenModelPtr = std::shared_ptr<const GreenModel>;

GreenModelPtr make_model(const FactorSpec& spec);

struct GreenAnalytics {
    double radius = 1.0;
    ExtReal g_at_r;
    ExtReal gprime_at_r;
    ExtReal theta;
    int period = 1;
    std::optional<Singularity> sing;
    PowerSeries series;
    GreenModelPtr model;
};

GreenAnalytics analyze_factor(const FactorSpec& spec, std::size_t N);
GreenAnalytics analyze_model(GreenModelPtr model, std::size_t N);

// Free functions mirroring the per-type operations.
double lattice_radius(const LatticeSpec& spec);
ExtReal lattice_green(const LatticeSpec& spec, double z, int deriv);
PowerSeries lattice_series(const LatticeSpec& spec, std::size_t N);
double finite_radius(const FiniteGroupSpec& spec);
ExtReal finite_green(const FiniteGroupSpec& spec, double z, int deriv);
PowerSeries finite_series(const FiniteGroupSpec& spec, std::size_t N);
double tree_radius(const HomTreeSpec& spec);
ExtReal tree_green(const HomTreeSpec& spec, double z, int deriv);
PowerSeries tree_series(const HomTreeSpec& spec, std::size_t N);

double psi_at(const GreenAnalytics& a, double z);
PhiDerivs phi_derivs_at(const GreenAnalytics& a, double z);
double invert_w(const GreenAnalytics& a, double t);

// First-return series U = 1 - 1/G.
PowerSeries first_return_series(const PowerSeries& green);

}  // namespace fprw
