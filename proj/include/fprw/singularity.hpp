#pragma once

namespace fprw {

// Leading singular term (rho - z)^q log^k (rho - z) and its Darboux image
// n^{-lambda} log^{kappa} n.
struct Singularity {
    double q = 0.5;
    int k = 0;
    double lambda = 1.5;
    int kappa = 0;
};

struct DarbouxExponents {
    double lambda;
    int kappa;
};

// lambda = q + 1; kappa = k unless q is a positive integer, then k - 1.
DarbouxExponents darboux_map(double q, int k);

Singularity make_singularity(double q, int k);

bool is_integer(double q);

}  // namespace fprw
