#include "fprw/singularity.hpp"

#include <cmath>
#include <string>

#include "fprw/error.hpp"

namespace fprw {

bool is_integer(double q) { return std::abs(q - std::round(q)) < 1e-12; }

DarbouxExponents darboux_map(double q, int k) {
    if (!(q > 0.0) || k < 0)
        throw Error(ErrorCode::InvalidSingularity, "need q > 0 and k >= 0, got q=" + std::to_string(q));
    if (is_integer(q)) {
        if (k == 0)
            throw Error(ErrorCode::InvalidSingularity,
                        "integer exponent q=" + std::to_string(q) + " without a log factor is analytic");
        return {q + 1.0, k - 1};
    }
    return {q + 1.0, k};
}

Singularity make_singularity(double q, int k) {
    const DarbouxExponents e = darboux_map(q, k);
    return Singularity{q, k, e.lambda, e.kappa};
}

}  // namespace fprw
