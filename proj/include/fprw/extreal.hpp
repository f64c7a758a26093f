#pragma once

#include <cmath>
#include <limits>
#include <ostream>

#include "fprw/error.hpp"

namespace fprw {

// A real that may also be +inf. Green-function values at the radius are either
// finite or divergent, and callers must ask which before reading the number.
class ExtReal {
public:
    constexpr ExtReal() = default;
    ExtReal(double v) : v_(v) {  // NOLINT(google-explicit-constructor)
        if (std::isnan(v)) throw Error(ErrorCode::InvalidSpec, "ExtReal constructed from NaN");
    }

    static ExtReal infinity() {
        ExtReal r;
        r.v_ = std::numeric_limits<double>::infinity();
        return r;
    }

    bool is_finite() const noexcept { return std::isfinite(v_); }
    bool is_infinite() const noexcept { return !std::isfinite(v_); }

    double value() const {
        if (!is_finite()) throw Error(ErrorCode::OutOfDomain, "value of an infinite quantity requested");
        return v_;
    }

    // IEEE view: the value or +inf.
    double ieee() const noexcept { return v_; }

    friend bool operator==(const ExtReal& a, const ExtReal& b) noexcept { return a.v_ == b.v_; }
    friend bool operator<(const ExtReal& a, const ExtReal& b) noexcept { return a.v_ < b.v_; }

    friend std::ostream& operator<<(std::ostream& os, const ExtReal& x) {
        if (x.is_infinite()) return os << "inf";
        return os << x.v_;
    }

private:
    double v_ = 0.0;
};

// a/(a+b) with c/(c+inf) = 0 and inf/(inf+c) = 1.
inline double share(const ExtReal& a, const ExtReal& b) {
    if (a.is_infinite() && b.is_infinite())
        throw Error(ErrorCode::OutOfDomain, "share of two infinite quantities is undefined");
    if (a.is_infinite()) return 1.0;
    if (b.is_infinite()) return 0.0;
    return a.value() / (a.value() + b.value());
}

// a/b with a finite and positive, b possibly infinite (then 0).
inline ExtReal ratio(const ExtReal& a, double b) {
    if (a.is_infinite()) return ExtReal::infinity();
    return ExtReal(a.value() / b);
}

}  // namespace fprw
