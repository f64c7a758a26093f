#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "fprw/classify.hpp"

namespace fprw {

// Two factors with the mixing weight left free.
class FactorPair {
public:
    FactorPair(GreenModelPtr first, GreenModelPtr second);
    static FactorPair from_specs(const FactorSpec& first, const FactorSpec& second);

    const GreenModel& first() const { return *f_[0]; }
    const GreenModel& second() const { return *f_[1]; }
    const GreenModelPtr& ptr(std::size_t i) const { return f_[i]; }
    ExtReal theta(std::size_t i) const { return theta_[i]; }
    FreeProduct product(double alpha1) const;
    bool degenerate() const;

private:
    GreenModelPtr f_[2];
    ExtReal theta_[2];
};

// Psi(theta_bar) with weights (alpha1, 1 - alpha1); alpha1 in [0, 1] with the
// endpoints read as one-sided limits.
double upsilon(const FactorPair& pair, double alpha1);

// theta_1 / (theta_1 + theta_2) with c/(c+inf) = 0; empty when both are infinite.
std::optional<double> critical_alpha(const FactorPair& pair);

struct PhaseRoots {
    std::optional<double> alpha_low;
    std::optional<double> alpha_high;
};

PhaseRoots phase_roots(const FactorPair& pair, double tol = 1e-10);

struct PhaseOptions {
    std::size_t grid = 512;
    bool full_classification = false;  // run classify_two per point (computes radii)
    double critical_window = 1e-6;
    ClassifyOptions classify;
    unsigned threads = 0;  // 0 = hardware concurrency, capped by FPRW_THREADS
};

struct PhasePoint {
    double alpha1;
    double upsilon;
    AsymptoticLaw law;
    bool warning;
};

struct PhaseDiagram {
    std::vector<PhasePoint> grid;
    std::optional<double> alpha_c;
    std::optional<double> alpha_low;
    std::optional<double> alpha_high;
    double upsilon_0 = 0.0;  // limit at alpha1 -> 0
    double upsilon_c = 0.0;  // at alpha_c
    double upsilon_1 = 0.0;  // limit at alpha1 -> 1
    char case_label = 'E';
    bool ambiguous = false;
    std::vector<char> candidates;
    bool degenerate = false;
};

// Case label and roots without a grid.
PhaseDiagram regime_case(const FactorPair& pair, const PhaseOptions& opt = {});
PhaseDiagram sweep(const FactorPair& pair, const PhaseOptions& opt = {});

// Law at alpha1 read off Upsilon, matching classify_two without the radius.
AsymptoticLaw law_from_upsilon(const FactorPair& pair, double alpha1, double ups, const ClassifyOptions& opt = {});

struct TunedLattice {
    LatticeSpec spec;
    double delta;
    double psi;  // Psi_i(theta_i) achieved
};

// Axis weights (1 - delta, delta/(d-1), ...) with p = 1/2 so that
// Psi(theta) = target.
TunedLattice tune_axis_weights(int d, double target, double tol = 1e-12);
LatticeSpec axis_family(int d, double delta);

unsigned worker_count(unsigned requested);

}  // namespace fprw
